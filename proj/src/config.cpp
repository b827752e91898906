#include "wavelab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "wavelab/errors.hpp"

namespace wavelab {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& what) {
  std::ostringstream msg;
  msg << "config";
  if (line > 0) msg << " line " << line;
  msg << ": " << key << ": " << what;
  throw ConfigError(msg.str());
}

double to_double(std::string_view value, const std::string& key, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    fail(key, line, "expected a finite number, got '" + std::string(value) + "'");
  }
  return out;
}

template <class Int>
Int to_integer(std::string_view value, const std::string& key, int line) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(key, line, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

struct Binding {
  std::function<void(std::string_view, const std::string&, int)> set;
  std::function<std::string()> get;
};

std::map<std::string, Binding> bindings(ExperimentConfig& c) {
  std::map<std::string, Binding> b;
  auto real = [&b](const std::string& key, double& slot) {
    b[key] = {[&slot](std::string_view v, const std::string& k, int l) { slot = to_double(v, k, l); },
              [&slot] { return fmt_double(slot); }};
  };
  auto integer = [&b](const std::string& key, long& slot) {
    b[key] = {[&slot](std::string_view v, const std::string& k, int l) {
                slot = to_integer<long>(v, k, l);
              },
              [&slot] { return std::to_string(slot); }};
  };
  auto text = [&b](const std::string& key, std::string& slot) {
    b[key] = {[&slot](std::string_view v, const std::string&, int) { slot = std::string(v); },
              [&slot] { return slot; }};
  };
  real("model.nu", c.model.nu);
  real("model.b", c.model.b);
  real("model.a", c.model.a);
  real("model.m_factor", c.model.m_factor);
  real("model.delta", c.model.delta);
  real("grid.L_factor", c.grid.L_factor);
  integer("grid.n", c.grid.n);
  real("time.dt", c.time.dt);
  real("time.T_end", c.time.T_end);
  real("time.T_max", c.time.T_max);
  integer("time.sample_every", c.time.sample_every);
  text("init.family", c.init.family);
  real("init.amplitude", c.init.amplitude);
  real("init.center", c.init.center);
  real("init.width", c.init.width);
  real("init.y0", c.init.y0);
  real("init.radius_fraction", c.init.radius_fraction);
  real("noise.epsilon_Q", c.noise.epsilon_Q);
  real("noise.ell", c.noise.ell);
  real("noise.epsilon_sigma", c.noise.epsilon_sigma);
  integer("mc.n_trials", c.mc.n_trials);
  b["mc.master_seed"] = {[&c](std::string_view v, const std::string& k, int l) {
                           c.mc.master_seed = to_integer<std::uint64_t>(v, k, l);
                         },
                         [&c] { return std::to_string(c.mc.master_seed); }};
  integer("mc.workers", c.mc.workers);
  integer("verify.n_random", c.verify.n_random);
  real("verify.rel_tol", c.verify.rel_tol);
  text("output.directory", c.output.directory);
  return b;
}

void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
  auto check = [&lines](bool ok, const std::string& key, const std::string& what) {
    if (ok) return;
    const auto it = lines.find(key);
    fail(key, it == lines.end() ? 0 : it->second, what);
  };
  check(c.model.nu > 0.0, "model.nu", "must be > 0");
  check(c.model.b > 0.0, "model.b", "must be > 0");
  check(c.model.a > 0.0 && c.model.a < 1.0, "model.a", "must lie in (0, 1)");
  check(c.model.m_factor >= 1.0, "model.m_factor", "must be >= 1 (m >= C*)");
  check(c.model.delta > 0.0 && c.model.delta < 1.0, "model.delta", "must lie in (0, 1)");
  check(c.grid.L_factor > 0.0, "grid.L_factor", "must be > 0");
  check(c.grid.n >= 3 && c.grid.n % 2 == 1, "grid.n", "must be odd and >= 3");
  check(c.time.dt >= 0.0, "time.dt", "must be >= 0 (0 selects the default)");
  check(c.time.T_end > 0.0, "time.T_end", "must be > 0");
  check(c.time.T_max > 0.0, "time.T_max", "must be > 0");
  check(c.time.sample_every >= 1, "time.sample_every", "must be >= 1");
  check(c.init.family == "bump" || c.init.family == "shifted-wave" || c.init.family == "zero",
        "init.family", "must be one of bump, shifted-wave, zero");
  check(c.init.width > 0.0, "init.width", "must be > 0");
  check(c.init.radius_fraction >= 0.0 && c.init.radius_fraction < 1.0, "init.radius_fraction",
        "must lie in [0, 1)");
  check(c.noise.epsilon_Q >= 0.0, "noise.epsilon_Q", "must be >= 0");
  check(c.noise.ell >= 0.0, "noise.ell", "must be >= 0 (0 selects 1/k)");
  check(c.noise.epsilon_sigma >= 0.0, "noise.epsilon_sigma", "must be >= 0");
  check(c.mc.n_trials >= 1, "mc.n_trials", "must be >= 1");
  check(c.mc.workers >= 0, "mc.workers", "must be >= 0");
  check(c.verify.n_random >= 0, "verify.n_random", "must be >= 0");
  check(c.verify.rel_tol > 0.0, "verify.rel_tol", "must be > 0");
  check(!c.output.directory.empty(), "output.directory", "must not be empty");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  auto table = bindings(cfg);
  std::map<std::string, int> lines;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": expected key=value, got '" << line << "'";
      throw ConfigError(msg.str());
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) fail(key, line_no, "unknown key");
    if (lines.count(key)) fail(key, line_no, "duplicate key");
    it->second.set(value, key, line_no);
    lines[key] = line_no;
    cfg.sections_set.insert(key.substr(0, key.find('.')));
  }
  validate(cfg, lines);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  std::map<std::string, std::string> out;
  for (const auto& [key, binding] : bindings(copy)) out[key] = binding.get();
  return out;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const auto& [key, value] : config_entries(cfg)) out << key << '=' << value << '\n';
  return out.str();
}

}  // namespace wavelab
