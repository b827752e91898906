#include "wavelab/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wavelab/errors.hpp"
#include "wavelab/inequality_lab.hpp"
#include "wavelab/ndjson.hpp"

namespace fs = std::filesystem;

namespace wavelab {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kManifest = "manifest.json";

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

json constants_json(const ExperimentConfig& cfg) {
  const ModelParams p =
      derive_constants(cfg.model.nu, cfg.model.b, cfg.model.a, cfg.model.m_factor);
  json j;
  j["k"] = p.k;
  j["c"] = p.c;
  j["eta"] = p.eta;
  j["kappa_star"] = p.kappa_star;
  j["C_star"] = p.C_star;
  j["c_star"] = p.c_star;
  j["m"] = p.m;
  j["decay_radius"] = decay_radius(p, cfg.model.delta);
  return j;
}

/// Payload files kept in memory until the run succeeds, so a failed run
/// leaves only the manifest behind.
struct Payload {
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
  bool accepted = true;
};

const std::map<std::string, std::set<std::string>>& used_sections() {
  static const std::map<std::string, std::set<std::string>> m = {
      {"constants", {"model", "output"}},
      {"verify", {"model", "grid", "verify", "mc", "output"}},
      {"simulate-det", {"model", "grid", "time", "init", "output"}},
      {"simulate-stoch", {"model", "grid", "time", "init", "noise", "mc", "output"}},
      {"exit-mc", {"model", "grid", "time", "init", "noise", "mc", "output"}},
  };
  return m;
}

JsonLine sample_line(const DetSample& s) {
  JsonLine l;
  l.add("t", s.t)
      .add("norm_h", s.norm_h)
      .add("norm_v", s.norm_v)
      .add("C", s.C)
      .add("Cdot", s.Cdot)
      .add("envelope", s.envelope)
      .add("lem0_envelope", s.lem0_envelope)
      .add("norm_u_sq", s.norm_u_sq)
      .add("energy_residual", s.energy_residual);
  return l;
}

Payload run_constants(const ExperimentConfig& cfg) {
  const ModelParams p =
      derive_constants(cfg.model.nu, cfg.model.b, cfg.model.a, cfg.model.m_factor);
  JsonLine l;
  l.add("nu", p.nu).add("b", p.b).add("a", p.a).add("k", p.k).add("c", p.c).add("eta", p.eta);
  l.add("kappa_star", p.kappa_star).add("C_star", p.C_star).add("c_star", p.c_star);
  l.add("m", p.m).add("decay_radius", decay_radius(p, cfg.model.delta));
  Payload out;
  out.files.emplace_back("constants.json", l.str() + "\n");
  std::ostringstream s;
  s << std::setprecision(6);
  s << "k = " << p.k << "\nc = " << p.c << "\neta = " << p.eta << "\nkappa* = " << p.kappa_star
    << "\nC* = " << p.C_star << "\nc* = " << p.c_star << "\nm = " << p.m
    << "\ndecay radius = " << decay_radius(p, cfg.model.delta) << "\n";
  out.summary = s.str();
  return out;
}

Payload run_verify(const ExperimentConfig& cfg) {
  const Problem pb = make_problem(cfg);
  const InequalityLab lab(pb.params, pb.grid, cfg.verify.rel_tol);
  std::vector<IneqReport> reports = lab.named_examples();
  const auto sweep = lab.random_sweep(static_cast<std::size_t>(cfg.verify.n_random),
                                      cfg.mc.master_seed, static_cast<unsigned>(cfg.mc.workers));
  reports.insert(reports.end(), sweep.begin(), sweep.end());

  JsonLine grid;
  grid.add("L", pb.grid.half_width()).add("n", static_cast<long>(pb.grid.size()));
  std::string body;
  std::map<std::string, std::pair<long, long>> tally;  // check -> (total, failed)
  std::map<std::string, double> worst;
  Payload out;
  for (const auto& r : reports) {
    JsonLine l;
    l.add("name", r.name).add("lhs", r.lhs).add("rhs", r.rhs).add("slack", r.slack);
    l.add("pass", r.pass).add("seed", r.seed).add("grid", grid);
    body += l.str() + "\n";
    const std::string check = r.name.substr(0, r.name.find('['));
    auto& t = tally[check];
    ++t.first;
    if (!r.pass) {
      ++t.second;
      out.accepted = false;
    }
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    if (scale == 0.0) continue;  // both sides vanish identically
    const double rel = r.slack / scale;
    auto it = worst.find(check);
    if (it == worst.end() || rel < it->second) worst[check] = rel;
  }
  out.files.emplace_back("verify.ndjson", body);
  std::ostringstream s;
  s << "check                    reports  failures  min relative slack\n";
  for (const auto& [name, t] : tally) {
    s << std::left << std::setw(25) << name << std::setw(9) << t.first << std::setw(10) << t.second
      << std::setprecision(3) << worst[name] << "\n";
  }
  s << (out.accepted ? "all inequalities hold\n" : "FAILURES present\n");
  out.summary = s.str();
  return out;
}

Payload run_simulate_det(const ExperimentConfig& cfg) {
  const Problem pb = make_problem(cfg);
  const Field u0 = make_initial(cfg, pb);
  DetOptions opt;
  opt.dt = effective_dt(cfg, pb.params);
  opt.t_end = cfg.time.T_end;
  opt.sample_every = cfg.time.sample_every;
  opt.c_budget = phase_budget(cfg);
  const double radius = decay_radius(pb.params, cfg.model.delta);
  const double n0 = norm_h(pb.grid, make_state(pb, u0).u);
  const bool certificate = n0 < radius;
  if (certificate) opt.delta = cfg.model.delta;
  const DetTrajectory tr = run_det(pb, u0, opt);

  std::string body;
  for (const auto& s : tr.samples) body += sample_line(s).str() + "\n";
  JsonLine summary;
  summary.add("summary", true)
      .add("fitted_rate", tr.fitted_rate)
      .add("theoretical_rate", tr.theoretical_rate)
      .add("certificate_requested", certificate)
      .add("certificate_ok", tr.certificate_ok)
      .add("max_envelope_ratio", tr.max_envelope_ratio)
      .add("growth_envelope_ok", tr.growth_envelope_ok)
      .add("u0_norm", tr.u0_norm)
      .add("final_norm_h", tr.samples.empty() ? tr.u0_norm : tr.samples.back().norm_h)
      .add("final_C", tr.final_state.C);
  body += summary.str() + "\n";

  Payload out;
  out.accepted = tr.growth_envelope_ok && (!certificate || tr.certificate_ok);
  out.files.emplace_back("simulate-det.ndjson", body);
  std::ostringstream s;
  s << std::setprecision(6);
  s << "||u0||_H = " << tr.u0_norm << " (decay radius " << radius << ")\n";
  s << "samples = " << tr.samples.size() << ", final C = " << tr.final_state.C << "\n";
  s << "fitted decay rate = " << tr.fitted_rate;
  if (certificate) {
    s << ", certified rate = " << tr.theoretical_rate << "\n";
    s << "max ||u~||/envelope = " << tr.max_envelope_ratio
      << (tr.certificate_ok ? " (certificate holds)\n" : " (certificate VIOLATED)\n");
  } else {
    s << "\ninitial data outside the decay radius; no certificate requested\n";
  }
  s << "growth envelope " << (tr.growth_envelope_ok ? "holds" : "VIOLATED") << "\n";
  out.summary = s.str();
  return out;
}

Payload run_simulate_stoch(const ExperimentConfig& cfg) {
  TrialConfig tc = make_trial_config(cfg);
  tc.t_max = cfg.time.T_end;
  check_trial_config(tc);
  std::vector<DetSample> samples;
  const std::uint64_t seed = cfg.mc.master_seed;
  const TrialRecord rec = run_trial(tc, seed, &samples, cfg.time.sample_every);

  std::string body;
  for (const auto& s : samples) {
    JsonLine l = sample_line(s);
    l.add("noise_seed", seed);
    body += l.str() + "\n";
  }
  JsonLine summary;
  summary.add("summary", true)
      .add("noise_seed", seed)
      .add("exited", rec.exited)
      .add("exit_time", rec.exit_time)
      .add("max_norm", rec.max_norm)
      .add("exit_radius", tc.problem.params.c_star)
      .add("final_C", rec.final_C)
      .add("steps", rec.steps);
  body += summary.str() + "\n";

  Payload out;
  out.files.emplace_back("simulate-stoch.ndjson", body);
  std::ostringstream s;
  s << std::setprecision(6);
  s << "noise seed = " << seed << ", steps = " << rec.steps << "\n";
  s << "max ||u~||_H = " << rec.max_norm << " (exit radius " << tc.problem.params.c_star << ")\n";
  if (rec.exited) {
    s << "exited at t = " << rec.exit_time << "\n";
  } else {
    s << "no exit before T = " << tc.t_max << "\n";
  }
  out.summary = s.str();
  return out;
}

Payload run_exit_mc(const ExperimentConfig& cfg) {
  const TrialConfig tc = make_trial_config(cfg);
  const ExitStats st = exit_probability_mc(tc, cfg.mc.n_trials, cfg.mc.master_seed,
                                           static_cast<unsigned>(cfg.mc.workers));
  JsonLine l;
  l.add("n_trials", st.n_trials)
      .add("n_exits", st.n_exits)
      .add("p_hat", st.p_hat)
      .add("wilson_lo", st.wilson_lo)
      .add("wilson_hi", st.wilson_hi)
      .add("theorem_bound", st.theorem_bound)
      .add("censored_at_T_max", st.censored_at_t_max)
      .add("T_max", st.t_max)
      .add("master_seed", cfg.mc.master_seed)
      .add("censoring",
           "trials reaching T_max without exit count as no-exit; this can only lower p_hat, "
           "which is conservative for an upper bound");
  std::string trials;
  for (std::size_t i = 0; i < st.trials.size(); ++i) {
    const auto& r = st.trials[i];
    JsonLine t;
    t.add("trial", static_cast<long>(i)).add("seed", r.seed).add("exited", r.exited);
    t.add("exit_time", r.exit_time).add("max_norm", r.max_norm).add("final_C", r.final_C);
    trials += t.str() + "\n";
  }
  Payload out;
  out.accepted = st.wilson_lo <= st.theorem_bound;
  out.files.emplace_back("exit-mc.json", l.str() + "\n");
  out.files.emplace_back("exit-mc-trials.ndjson", trials);
  std::ostringstream s;
  s << std::setprecision(6);
  s << "trials = " << st.n_trials << ", exits = " << st.n_exits << ", censored at T_max = "
    << st.censored_at_t_max << "\n";
  s << "p_hat = " << st.p_hat << ", 95% Wilson [" << st.wilson_lo << ", " << st.wilson_hi << "]\n";
  s << "theorem bound = " << st.theorem_bound
    << (out.accepted ? " (consistent)\n" : " (Wilson lower bound EXCEEDS the bound)\n");
  out.summary = s.str();
  return out;
}

Payload dispatch(const ExperimentConfig& cfg, const std::string& sub) {
  if (sub == "constants") return run_constants(cfg);
  if (sub == "verify") return run_verify(cfg);
  if (sub == "simulate-det") return run_simulate_det(cfg);
  if (sub == "simulate-stoch") return run_simulate_stoch(cfg);
  if (sub == "exit-mc") return run_exit_mc(cfg);
  throw ConfigError("unknown subcommand '" + sub + "'");
}

json base_manifest(const std::string& sub, const std::string& started) {
  json m;
  m["tool"] = "wavelab";
  m["version"] = WAVELAB_VERSION;
  m["subcommand"] = sub;
  m["started_at"] = started;
  return m;
}

void write_manifest(const fs::path& dir, const json& m) {
  write_file(dir / kManifest, m.dump(2) + "\n");
}

}  // namespace

Problem make_problem(const ExperimentConfig& cfg) {
  const ModelParams p =
      derive_constants(cfg.model.nu, cfg.model.b, cfg.model.a, cfg.model.m_factor);
  return Problem{p, Grid(cfg.grid.L_factor / p.k, static_cast<std::size_t>(cfg.grid.n))};
}

Field make_initial(const ExperimentConfig& cfg, const Problem& pb) {
  const auto& in = cfg.init;
  const double k = pb.params.k;
  if (in.family == "zero") return Field(pb.grid.size());
  if (in.family == "shifted-wave") {
    return sample(pb.grid, [&](double x) { return tw_value(x + in.y0, k) - tw_value(x, k); });
  }
  if (in.family == "bump") {
    Field u = sample(pb.grid, [&](double x) {
      const double z = (x - in.center) / in.width;
      return in.amplitude * std::exp(-0.5 * z * z);
    });
    if (in.radius_fraction > 0.0) {
      Field clamped = make_state(pb, u).u;
      const double n = norm_h(pb.grid, clamped);
      if (n == 0.0) throw ConfigError("init.amplitude must be nonzero when init.radius_fraction > 0");
      const double target = in.radius_fraction * decay_radius(pb.params, cfg.model.delta);
      for (auto& x : clamped) x *= target / n;
      return clamped;
    }
    return u;
  }
  throw ConfigError("init.family must be bump, shifted-wave or zero");
}

double phase_budget(const ExperimentConfig& cfg) {
  return cfg.init.family == "shifted-wave" ? 2.0 * std::abs(cfg.init.y0) + 1.0 : 1.0;
}

double effective_dt(const ExperimentConfig& cfg, const ModelParams& p) {
  return cfg.time.dt > 0.0 ? cfg.time.dt : default_dt(p);
}

TrialConfig make_trial_config(const ExperimentConfig& cfg) {
  const Problem pb = make_problem(cfg);
  const double ell = cfg.noise.ell > 0.0 ? cfg.noise.ell : 1.0 / pb.params.k;
  TrialConfig tc{pb, NoiseModel::gaussian(pb.grid, cfg.noise.epsilon_Q, ell),
                 SigmaModel{cfg.noise.epsilon_sigma}, make_initial(cfg, pb)};
  tc.dt = effective_dt(cfg, pb.params);
  tc.t_max = cfg.time.T_max;
  tc.c_budget = phase_budget(cfg);
  return tc;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"constants", "verify", "simulate-det",
                                             "simulate-stoch", "exit-mc"};
  return s;
}

int run_experiment(const ExperimentConfig& cfg, const std::string& sub, std::ostream& out,
                   std::ostream& err) {
  const std::string started = utc_now();
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);

  json m = base_manifest(sub, started);
  json echo;
  for (const auto& [key, value] : config_entries(cfg)) echo[key] = value;
  m["config"] = echo;
  m["config_text"] = serialize_config(cfg);
  m["status"] = "running";
  try {
    m["constants"] = constants_json(cfg);
  } catch (const std::exception&) {
    m["constants"] = nullptr;
  }
  write_manifest(dir, m);

  std::vector<std::string> warnings;
  const auto& used = used_sections().count(sub) ? used_sections().at(sub) : std::set<std::string>{};
  for (const auto& section : cfg.sections_set) {
    if (!used.count(section)) {
      warnings.push_back("section '" + section + "' is not used by " + sub);
      err << "warning: " << warnings.back() << "\n";
    }
  }
  m["warnings"] = warnings;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Payload payload = dispatch(cfg, sub);
    json files = json::object();
    for (const auto& [name, text] : payload.files) {
      write_file(dir / name, text);
      files[name] = {{"sha256", sha256_hex(text)}, {"bytes", text.size()}};
    }
    write_file(dir / "summary.txt", payload.summary);
    files["summary.txt"] = {{"sha256", sha256_hex(payload.summary)},
                            {"bytes", payload.summary.size()}};
    m["files"] = files;
    m["accepted"] = payload.accepted;
    m["status"] = "ok";
    out << payload.summary;
    m["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m["finished_at"] = utc_now();
    write_manifest(dir, m);
    return payload.accepted ? 0 : 1;
  } catch (const std::exception& e) {
    m["status"] = "error";
    m["error"] = e.what();
    m["files"] = json::object();
    m["finished_at"] = utc_now();
    write_manifest(dir, m);
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const std::string started = utc_now();
  ExperimentConfig cfg;
  try {
    if (opts.config_path) cfg = load_config(*opts.config_path);
  } catch (const std::exception& e) {
    const fs::path dir = opts.out_dir.value_or(ExperimentConfig{}.output.directory);
    fs::create_directories(dir);
    json m = base_manifest(opts.subcommand, started);
    m["config_path"] = *opts.config_path;
    m["status"] = "error";
    m["error"] = e.what();
    m["files"] = json::object();
    m["finished_at"] = utc_now();
    write_manifest(dir, m);
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (opts.seed) cfg.mc.master_seed = *opts.seed;
  if (opts.out_dir) cfg.output.directory = *opts.out_dir;
  return run_experiment(cfg, opts.subcommand, out, err);
}

}  // namespace wavelab
