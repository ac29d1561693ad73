#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "divcap/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"divcap: removability certificates for weighted divergence equations"};
  app.require_subcommand(1, 1);
  std::string config;
  divcap::RunOptions opt;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  for (const char* name : {"certify", "sweep", "content", "capacity", "frostman", "divcheck", "weight-info"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "override every seed in the config");
    sub->add_option("--threads", threads, "OpenMP thread count");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const auto command = divcap::parse_command(app.get_subcommands().front()->get_name());
  opt.out = out;
  opt.seed = seed;
  opt.threads = threads;
  return divcap::run_config(config, command, opt, std::cerr);
}
