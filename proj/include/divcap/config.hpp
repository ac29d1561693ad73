#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "divcap/certifier.hpp"

namespace divcap {

/// Schema violation; `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + message),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class Command { certify, sweep, content, capacity, frostman, divcheck, weight_info };
std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

struct ContentParams {
  std::vector<int> ks;  ///< empty: 0..generation (Cantor), the budget ladders otherwise
  bool write_cover = true;  ///< per-ball h values of the last cover
};

struct CapacityParams {
  bool write_field = false;  ///< finest field as evidence/capacity_field.csv
};

struct DivcheckParams {
  double base_radius = 0.0;  ///< 0: half the analysis box side
};

struct WeightInfoParams {
  std::optional<Box> region;  ///< default: the analysis box of the set
};

/// A parsed and validated configuration.
struct Config {
  Command command = Command::certify;
  CaseSpec spec;  ///< unused by sweep
  bool has_case = false;
  SweepSettings sweep;
  ContentParams content;
  CapacityParams capacity;
  DivcheckParams divcheck;
  WeightInfoParams weight_info;
};

/// Parses the config text. `cli_command`, when given, must agree with the
/// "command" field (which may then be omitted). Throws ConfigError.
Config parse_config(const std::string& text, std::optional<Command> cli_command = std::nullopt);
Config load_config(const std::filesystem::path& path, std::optional<Command> cli_command = std::nullopt);

/// Applies the --seed override to every seeded component.
void apply_seed(Config& c, std::uint64_t seed);

/// A file to write, relative to the output directory.
struct Artifact {
  std::string path;
  std::string content;
};

/// Runs the command and returns its artifacts; nothing is written.
/// Hard errors propagate as exceptions.
std::vector<Artifact> execute(const Config& c);

/// Writes artifacts under `dir`, creating directories as needed.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

struct RunOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Exit status 0 ok, 1 hard error, 2 config error. Outputs are written only
/// after the command has finished; diagnostics go to `log`.
int run_config(const std::filesystem::path& path, std::optional<Command> cli_command, const RunOptions& opt,
               std::ostream& log);

}  // namespace divcap
