#include <iostream>

#include <CLI11.hpp>

#include "wavelab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Travelling-front stability lab"};
  app.require_subcommand(1);

  wavelab::CommandOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;

  for (const auto& name : wavelab::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "key=value configuration file");
    sub->add_option("--seed", seed, "override mc.master_seed");
    sub->add_option("--out", out, "override output.directory");
    sub->callback([&, sub, name] {
      opts.subcommand = name;
      if (sub->count("--config")) opts.config_path = config;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--out")) opts.out_dir = out;
    });
  }

  CLI11_PARSE(app, argc, argv);
  return wavelab::run_command(opts, std::cout, std::cerr);
}
