#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "divcap/capacity.hpp"

namespace divcap {

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("truncated grid field");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace

// Layout (little-endian): int32 n; int32 cells per axis [n]; float64 lo[n];
// float64 hi[n]; float64 node values, axis 0 fastest.
void write_field_binary(std::ostream& os, const GridField& f) {
  const int n = f.dim();
  put_le<std::int32_t>(os, n);
  for (int i = 0; i < n; ++i) put_le<std::int32_t>(os, f.resolution(i));
  for (int i = 0; i < n; ++i) put_le<double>(os, f.box().lo[i]);
  for (int i = 0; i < n; ++i) put_le<double>(os, f.box().hi[i]);
  for (double v : f.values()) put_le<double>(os, v);
}

GridField read_field_binary(std::istream& is) {
  const int n = get_le<std::int32_t>(is);
  require_dim(n);
  std::array<int, kMaxDim> res{};
  for (int i = 0; i < n; ++i) res[i] = get_le<std::int32_t>(is);
  Point lo(n), hi(n);
  for (int i = 0; i < n; ++i) lo[i] = get_le<double>(is);
  for (int i = 0; i < n; ++i) hi[i] = get_le<double>(is);
  GridField f(Box(lo, hi), res);
  for (double& v : f.values()) v = get_le<double>(is);
  return f;
}

void write_field_csv(std::ostream& os, const GridField& f) {
  const int n = f.dim();
  for (int i = 0; i < n; ++i) os << "x" << i << ",";
  os << "value\n";
  os.precision(17);
  for (std::size_t k = 0; k < f.node_count(); ++k) {
    const Point x = f.node(k);
    for (int i = 0; i < n; ++i) os << x[i] << ",";
    os << f[k] << "\n";
  }
}

}  // namespace divcap
