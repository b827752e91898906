#include "wavelab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wavelab/errors.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/rng.hpp"

namespace wavelab {

NoiseModel NoiseModel::gaussian(const Grid& grid, double eps_q, double ell) {
  if (!(std::isfinite(eps_q) && eps_q >= 0.0)) throw ConfigError("noise.epsilon_Q must be >= 0");
  if (!(std::isfinite(ell) && ell > 0.0)) throw ConfigError("noise.ell must be positive");
  NoiseModel m(grid);
  m.gaussian_ = true;
  m.eps_q_ = eps_q;
  m.ell_ = ell;
  // Entries below 1e-17 of the peak are dropped; they are invisible next to
  // the diagonal in double precision.
  const std::size_t n = grid.size();
  for (std::size_t d = 0; d < n; ++d) {
    const double r = static_cast<double>(d) * grid.dx();
    const double g = std::exp(-r * r / (2.0 * ell * ell));
    if (d > 0 && g < 1e-17) break;
    m.toeplitz_.push_back(eps_q * g);
  }
  m.finish();
  return m;
}

NoiseModel NoiseModel::from_kernel(const Grid& grid,
                                   const std::function<double(double, double)>& k) {
  NoiseModel m(grid);
  const std::size_t n = grid.size();
  const double span = 2.0 * grid.half_width();
  m.dense_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = grid.x(i);
    double peak = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double kij = k(xi, grid.x(j));
      if (!std::isfinite(kij)) throw ConfigError("noise kernel has non-finite entries");
      m.dense_[i * n + j] = kij;
      peak = std::max(peak, std::abs(kij));
    }
    // A square-integrable row has decayed well before a full domain length away.
    const double tail = std::max(std::abs(k(xi, xi - span)), std::abs(k(xi, xi + span)));
    if (!(tail <= 1e-6 * peak) && peak > 0.0) {
      std::ostringstream msg;
      msg << "noise kernel row at x = " << xi << " does not decay (|k| = " << tail
          << " at distance " << span << "); k(x, .) must be square integrable";
      throw ConfigError(msg.str());
    }
  }
  m.finish();
  return m;
}

double NoiseModel::kernel(std::size_t i, std::size_t j) const {
  if (gaussian_) {
    const std::size_t d = i > j ? i - j : j - i;
    return d < toeplitz_.size() ? toeplitz_[d] : 0.0;
  }
  return dense_[i * grid_.size() + j];
}

void NoiseModel::finish() {
  const std::size_t n = grid_.size();
  const double dx = grid_.dx();
  row_energy_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double kij = kernel(i, j);
      const double weight = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      sum += weight * kij * kij;
    }
    row_energy_[i] = sum * dx;
    if (!std::isfinite(row_energy_[i])) throw ConfigError("noise kernel row is not integrable");
  }
}

Field NoiseModel::apply(std::span<const double> xi) const {
  const std::size_t n = grid_.size();
  if (xi.size() != n) throw ShapeError("noise vector length does not match grid");
  const double dx = grid_.dx();
  Field out(n);
  if (gaussian_) {
    const std::size_t band = toeplitz_.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > band ? i - band : 0;
      const std::size_t hi = std::min(n - 1, i + band);
      double sum = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) sum += toeplitz_[i > j ? i - j : j - i] * xi[j];
      out[i] = sum * dx;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &dense_[i * n];
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += row[j] * xi[j];
      out[i] = sum * dx;
    }
  }
  return out;
}

double compute_m_sqrtq(const NoiseModel& noise) {
  if (noise.is_gaussian()) {
    return noise.eps_q() * noise.eps_q() * noise.ell() * std::sqrt(std::numbers::pi);
  }
  return grid_m_sqrtq(noise);
}

double grid_m_sqrtq(const NoiseModel& noise) {
  const auto& r = noise.row_energy();
  return *std::max_element(r.begin(), r.end());
}

double SigmaModel::operator()(double v) const {
  const double c = std::clamp(v, 0.0, 1.0);
  return epsilon * c * (1.0 - c);
}

Field sample_increment(const NoiseModel& noise, double dt, std::mt19937_64& rng) {
  const Grid& g = noise.grid();
  if (!(dt >= 0.0)) throw PreconditionError("increment time step must be non-negative");
  if (dt == 0.0) return Field(g.size());
  std::normal_distribution<double> normal(0.0, std::sqrt(dt / g.dx()));
  std::vector<double> xi(g.size());
  for (double& x : xi) x = normal(rng);
  return noise.apply(xi);
}

PhaseState step_em_with_increment(const Problem& pb, const SigmaModel& sigma,
                                  const PhaseState& s, double dt, const Field& increment) {
  check_shape(pb.grid, increment);
  const Field wave_now = wave_at(pb, pb.params.c * s.t);
  Field forcing(increment.size());
  for (std::size_t i = 0; i < forcing.size(); ++i) {
    forcing[i] = sigma(s.u[i] + wave_now[i]) * increment[i];
  }
  return step_det(pb, s, dt, &forcing);
}

PhaseState step_em(const Problem& pb, const NoiseModel& noise, const SigmaModel& sigma,
                   const PhaseState& s, double dt, std::mt19937_64& rng) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  return step_em_with_increment(pb, sigma, s, dt, sample_increment(noise, dt, rng));
}

double hilbert_schmidt_sq(const NoiseModel& noise, const Field& sigma_values) {
  const Grid& g = noise.grid();
  check_shape(g, sigma_values);
  Field density(g.size());
  const auto& energy = noise.row_energy();
  for (std::size_t i = 0; i < g.size(); ++i) {
    density[i] = sigma_values[i] * sigma_values[i] * energy[i];
  }
  return integrate(g, density);
}

double wave_min_norm_sq(double k) { return (2.0 * std::numbers::ln2 - 1.0) / k; }

void check_trial_config(const TrialConfig& cfg) {
  const ModelParams& p = cfg.problem.params;
  if (!(cfg.noise.grid() == cfg.problem.grid)) throw ConfigError("noise model grid mismatch");
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0)) throw ConfigError("dt and T_max must be positive");
  if (!(cfg.sigma.epsilon >= 0.0)) throw ConfigError("noise.epsilon_sigma must be >= 0");
  const double lip = cfg.sigma.lipschitz();
  const double strength = compute_m_sqrtq(cfg.noise) * lip * lip;
  if (strength > p.kappa_star / 4.0) {
    std::ostringstream msg;
    msg << "noise too strong: M_sqrtQ Lip_sigma^2 = " << strength
        << " exceeds kappa*/4 = " << p.kappa_star / 4.0;
    throw ConfigError(msg.str());
  }
  check_horizon(cfg.problem, cfg.t_max, cfg.c_budget);
}

TrialRecord run_trial(const TrialConfig& cfg, std::uint64_t seed, std::vector<DetSample>* samples,
                      long sample_every) {
  check_trial_config(cfg);
  const Problem& pb = cfg.problem;
  const double radius = pb.params.c_star;
  std::mt19937_64 rng = make_rng(seed);

  TrialRecord rec;
  rec.seed = seed;
  PhaseState state = make_state(pb, cfg.u0);
  const double u0_norm = norm_h(pb.grid, state.u);

  auto observe = [&](const PhaseState& s, double residual) {
    const double nh = norm_h(pb.grid, s.u_tilde);
    rec.max_norm = std::max(rec.max_norm, nh);
    if (!rec.exited && nh > radius) {
      rec.exited = true;
      rec.exit_time = s.t;
    }
    if (samples != nullptr && (s.step % sample_every == 0 || s.step == 0)) {
      DetSample d{};
      d.t = s.t;
      d.norm_h = nh;
      d.norm_v = norm_v(pb.grid, s.u_tilde);
      d.C = s.C;
      d.Cdot = s.Cdot;
      d.envelope = std::numeric_limits<double>::quiet_NaN();
      d.lem0_envelope =
          std::exp(2.0 * pb.params.b * pb.params.eta * s.t) * u0_norm * u0_norm;
      d.norm_u_sq = inner_h(pb.grid, s.u, s.u);
      d.energy_residual = residual;
      samples->push_back(d);
    }
  };

  const long steps = std::lround(cfg.t_max / cfg.dt);
  observe(state, 0.0);
  for (long n = 1; n <= steps; ++n) {
    if (rec.exited && samples == nullptr) break;
    PhaseState next;
    try {
      next = step_em(pb, cfg.noise, cfg.sigma, state, cfg.dt, rng);
    } catch (const BlowUpError& e) {
      std::ostringstream msg;
      msg << e.what() << " (trial seed " << seed << ")";
      throw BlowUpError(msg.str(), e.step());
    }
    const double residual =
        samples != nullptr && next.step % sample_every == 0
            ? energy_identity_residual(pb, state, next)
            : 0.0;
    observe(next, residual);
    state = std::move(next);
  }
  rec.steps = state.step;
  rec.final_C = state.C;
  return rec;
}

WilsonInterval wilson_interval(long successes, long trials) {
  if (trials <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The endpoints are exactly 0 and 1 when the sample is all failures or all
  // successes; the formula only reproduces that up to rounding.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

double exit_probability_bound(const TrialConfig& cfg) {
  const ModelParams& p = cfg.problem.params;
  const Field u_tilde0 = make_state(cfg.problem, cfg.u0).u_tilde;
  const double init = inner_h(cfg.problem.grid, u_tilde0, u_tilde0);
  const double lip = cfg.sigma.lipschitz();
  const double noise = 4.0 * compute_m_sqrtq(cfg.noise) * lip * lip / p.kappa_star *
                       wave_min_norm_sq(p.k);
  return (init + noise) / (p.c_star * p.c_star);
}

ExitStats exit_probability_mc(const TrialConfig& cfg, long n_trials, std::uint64_t master_seed,
                              unsigned workers) {
  if (n_trials < 1) throw ConfigError("mc.n_trials must be >= 1");
  check_trial_config(cfg);
  ExitStats st;
  st.n_trials = n_trials;
  st.t_max = cfg.t_max;
  st.theorem_bound = exit_probability_bound(cfg);
  st.trials.resize(static_cast<std::size_t>(n_trials));
  parallel_for(st.trials.size(), workers, [&](std::size_t i) {
    st.trials[i] = run_trial(cfg, mix_seed(master_seed, i));
  });
  for (const TrialRecord& r : st.trials) st.n_exits += r.exited ? 1 : 0;
  st.censored_at_t_max = st.n_trials - st.n_exits;
  st.p_hat = static_cast<double>(st.n_exits) / static_cast<double>(st.n_trials);
  const WilsonInterval w = wilson_interval(st.n_exits, st.n_trials);
  st.wilson_lo = w.lo;
  st.wilson_hi = w.hi;
  return st;
}

}  // namespace wavelab
