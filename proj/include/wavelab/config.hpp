#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace wavelab {

/// Flat experiment description. Text form is one `section.key=value` per
/// line; `#` starts a comment. Unknown keys are rejected.
struct ExperimentConfig {
  struct Model {
    double nu = 1.0;
    double b = 2.0;
    double a = 0.25;
    double m_factor = 2.0;
    double delta = 0.5;
    bool operator==(const Model&) const = default;
  } model;

  struct GridSection {
    double L_factor = 40.0;  // half width in units of 1/k
    long n = 4001;
    bool operator==(const GridSection&) const = default;
  } grid;

  struct Time {
    double dt = 0.0;  // 0 selects 1e-3 min(1, 1/(b eta))
    double T_end = 20.0;
    double T_max = 50.0;
    long sample_every = 100;
    bool operator==(const Time&) const = default;
  } time;

  struct Init {
    std::string family = "bump";  // bump | shifted-wave | zero
    double amplitude = 1e-3;
    double center = 0.0;
    double width = 1.0;
    double y0 = 0.0;
    double radius_fraction = 0.0;  // > 0 rescales the bump to this fraction of delta kappa*/(b(4+a))
    bool operator==(const Init&) const = default;
  } init;

  struct Noise {
    double epsilon_Q = 1.0;
    double ell = 0.0;  // 0 selects 1/k
    double epsilon_sigma = 0.0;
    bool operator==(const Noise&) const = default;
  } noise;

  struct Mc {
    long n_trials = 200;
    std::uint64_t master_seed = 12345;
    long workers = 0;  // 0 = hardware concurrency
    bool operator==(const Mc&) const = default;
  } mc;

  struct Verify {
    long n_random = 1000;
    double rel_tol = 1e-6;
    bool operator==(const Verify&) const = default;
  } verify;

  struct Output {
    std::string directory = "wavelab-out";
    bool operator==(const Output&) const = default;
  } output;

  /// Sections that appeared explicitly in the parsed text.
  std::set<std::string> sections_set;

  bool operator==(const ExperimentConfig& o) const {
    return model == o.model && grid == o.grid && time == o.time && init == o.init &&
           noise == o.noise && mc == o.mc && verify == o.verify && output == o.output;
  }
};

/// Parses and validates. Errors are ConfigError with the offending key and
/// line number in the message.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Canonical key -> value strings, in key order.
std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg);

}  // namespace wavelab
