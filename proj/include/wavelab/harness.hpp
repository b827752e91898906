#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wavelab/config.hpp"
#include "wavelab/dynamics.hpp"
#include "wavelab/stochastic.hpp"

namespace wavelab {

/// Grid [-L_factor/k, L_factor/k] with grid.n nodes and the derived model.
Problem make_problem(const ExperimentConfig& cfg);

/// Initial perturbation u0 from the init section.
Field make_initial(const ExperimentConfig& cfg, const Problem& pb);

/// Horizon-guard allowance for |C|: 2 |y0| + 1.
double phase_budget(const ExperimentConfig& cfg);

/// Effective time step (time.dt, or the default when it is 0).
double effective_dt(const ExperimentConfig& cfg, const ModelParams& p);

TrialConfig make_trial_config(const ExperimentConfig& cfg);

struct CommandOptions {
  std::string subcommand;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand end to end: parses the config, writes the manifest,
/// payload files and summary into the output directory. Returns 0 iff every
/// acceptance predicate of the run holds, 1 when a predicate fails and 2 on
/// configuration or runtime errors (recorded in the manifest).
int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Same, for an already parsed configuration.
int run_experiment(const ExperimentConfig& cfg, const std::string& subcommand, std::ostream& out,
                   std::ostream& err);

}  // namespace wavelab
