#pragma once

// Multiplicative Q-Wiener forcing of the Nagumo front:
//
//   dv = [nu v_xx + b f(v)] dt + sigma(v) dW^Q,
//
// where sqrt(Q) has the integral kernel k(x, y). Increments are realised on
// the grid as K xi dx with K_ij = k(x_i, x_j) and xi_i ~ N(0, dt/dx), which
// gives the discrete covariance dt dx sum_m K_im K_jm.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "wavelab/dynamics.hpp"

namespace wavelab {

class NoiseModel {
 public:
  /// k(x, y) = eps_q exp(-(x - y)^2 / (2 ell^2)); stored as one banded
  /// Toeplitz row.
  static NoiseModel gaussian(const Grid& grid, double eps_q, double ell);

  /// Arbitrary square-root covariance kernel, stored densely. Throws
  /// ConfigError when a row is not square-integrable on the grid.
  static NoiseModel from_kernel(const Grid& grid, const std::function<double(double, double)>& k);

  const Grid& grid() const { return grid_; }
  bool is_gaussian() const { return gaussian_; }
  double eps_q() const { return eps_q_; }
  double ell() const { return ell_; }

  /// K_ij = k(x_i, x_j)
  double kernel(std::size_t i, std::size_t j) const;

  /// Trapezoid value of int k(x_i, y)^2 dy for each row.
  const std::vector<double>& row_energy() const { return row_energy_; }

  /// K xi dx
  Field apply(std::span<const double> xi) const;

 private:
  explicit NoiseModel(const Grid& grid) : grid_(grid) {}
  void finish();

  Grid grid_;
  bool gaussian_ = false;
  double eps_q_ = 0.0;
  double ell_ = 0.0;
  std::vector<double> toeplitz_;  // k(|i - j| dx) up to a relative 1e-17 cut
  std::vector<double> dense_;     // row-major n x n for general kernels
  std::vector<double> row_energy_;
};

/// M = sup_x int k(x, y)^2 dy. Closed form eps_q^2 ell sqrt(pi) for the
/// gaussian family, otherwise the largest row quadrature.
double compute_m_sqrtq(const NoiseModel& noise);

/// Largest row quadrature, regardless of family.
double grid_m_sqrtq(const NoiseModel& noise);

/// sigma(v) = eps clamp(v)(1 - clamp(v)), clamp to [0, 1]. Vanishes at 0 and 1
/// and outside [0, 1]; Lipschitz with constant eps.
struct SigmaModel {
  double epsilon = 0.0;
  double operator()(double v) const;
  double lipschitz() const { return epsilon; }
};

/// Draws xi ~ N(0, dt/dx) per node and returns K xi dx. dt = 0 gives zero.
Field sample_increment(const NoiseModel& noise, double dt, std::mt19937_64& rng);

/// Euler-Maruyama step with a given increment: the deterministic IMEX step
/// plus sigma(u + v_TW(. + ct)) * increment in the explicit part.
PhaseState step_em_with_increment(const Problem& pb, const SigmaModel& sigma,
                                  const PhaseState& s, double dt, const Field& increment);

PhaseState step_em(const Problem& pb, const NoiseModel& noise, const SigmaModel& sigma,
                   const PhaseState& s, double dt, std::mt19937_64& rng);

/// Discrete ||Sigma(u)||_{L2(H)}^2 = sum_i w_i sigma_i^2 int k(x_i, y)^2 dy,
/// w the trapezoid weights, sigma_i the dispersion at node i.
double hilbert_schmidt_sq(const NoiseModel& noise, const Field& sigma_values);

/// ||min(v, 1 - v)||_H^2 = (2 ln 2 - 1) / k
double wave_min_norm_sq(double k);

struct TrialConfig {
  Problem problem;
  NoiseModel noise;
  SigmaModel sigma;
  Field u0;
  double dt = 1e-2;
  double t_max = 50.0;
  double c_budget = 1.0;  // horizon-guard allowance for |C|
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool exited = false;
  double exit_time = std::numeric_limits<double>::infinity();
  double max_norm = 0.0;  // running max of ||u~||_H
  double final_C = 0.0;
  long steps = 0;
};

/// Validates M Lip_sigma^2 <= kappa*/4 and the horizon guard.
void check_trial_config(const TrialConfig& cfg);

/// Integrates until T_max or the first step with ||u~||_H > c*. When
/// `samples` is given the run continues to T_max and every
/// `sample_every`-th step is recorded; the exit flag still marks the first
/// crossing.
TrialRecord run_trial(const TrialConfig& cfg, std::uint64_t seed,
                      std::vector<DetSample>* samples = nullptr, long sample_every = 1);

struct ExitStats {
  long n_trials = 0;
  long n_exits = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double theorem_bound = 0.0;
  double t_max = 0.0;
  long censored_at_t_max = 0;  // trials that reached T_max without exiting
  std::vector<TrialRecord> trials;
};

struct WilsonInterval {
  double lo;
  double hi;
};

/// 95% Wilson score interval.
WilsonInterval wilson_interval(long successes, long trials);

/// (||u~(0)||^2 + 4 M Lip^2 / kappa* ||min(v, 1-v)||^2) / c*^2
double exit_probability_bound(const TrialConfig& cfg);

/// Trial i uses the stream seed mix_seed(master_seed, i), so results do not
/// depend on the number of workers.
ExitStats exit_probability_mc(const TrialConfig& cfg, long n_trials, std::uint64_t master_seed,
                              unsigned workers = 0);

}  // namespace wavelab
