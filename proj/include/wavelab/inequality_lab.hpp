#pragma once

// Quadrature certificates for the functional inequalities behind the
// spectral-gap estimate: weighted Poincare and Hardy inequalities in the
// ground-state measure w^2 dx (w = v_x), the resulting bound on the
// linearised quadratic form, and the monotonicity / coercivity / remainder
// bounds of the perturbation equation.
//
// Every check returns both sides of its inequality and the signed slack
// rhs - lhs. A check passes when slack >= -tolerance, where the tolerance is
// relative to the larger side.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wavelab/grid.hpp"
#include "wavelab/wave_core.hpp"

namespace wavelab {

struct IneqReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;  // 0 for deterministic inputs
};

IneqReport make_report(std::string name, double lhs, double rhs, double rel_tol,
                       std::uint64_t seed = 0);

/// A sampled function together with its derivative. Generated families carry
/// the analytic derivative; arbitrary fields fall back to the difference
/// gradient via from_field().
struct TestFunction {
  Field value;
  Field deriv;
};

TestFunction from_field(const Grid& grid, const Field& f);

enum class Family { GaussianBump, ShiftedWaveDerivative, RandomFourier, ExtremalH0 };

const char* family_name(Family f);

struct TestFunctionSpec {
  Family family = Family::GaussianBump;
  std::vector<double> centers;     // bump centers / wave shifts / cutoff center (first entry)
  std::vector<double> widths;      // bump widths / cutoff radius (first entry)
  std::vector<double> amplitudes;  // one per bump / wave copy / overall scale for Fourier sums
  double offset = 0.0;             // constant added to the whole function
  std::uint64_t seed = 0;          // drives the Fourier modes
};

TestFunction make_test_function(const Grid& grid, const ModelParams& p,
                                const TestFunctionSpec& spec);

/// Draws a random spec of the given family. With `compact` the result has no
/// constant offset and decays to round-off inside the grid.
TestFunctionSpec random_spec(Family family, const ModelParams& p, bool compact,
                             std::mt19937_64& rng);

class InequalityLab {
 public:
  InequalityLab(ModelParams params, Grid grid, double rel_tol = 1e-6);

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  double rel_tol() const { return rel_tol_; }
  const Field& wave() const { return v_; }
  const Field& ground_state() const { return w_; }

  /// int h^2 w^2 <= 4/(3k^2) int h_x^2 w^2 + 6/k (int h w^2)^2
  IneqReport poincare(const TestFunction& h, std::uint64_t seed = 0) const;

  struct Extremal {
    TestFunction h0;
    double mean;             // int h0 w^2, expected 0
    double second_moment;    // int h0^2 w^2, expected k^2/3
    double gradient_energy;  // int h0_x^2 w^2, expected k^4/4
    IneqReport report;
  };
  /// Equality case h0 = v_xx v_x^{-3/2} of the Poincare inequality, which
  /// shows 4/(3k^2) cannot be lowered.
  Extremal poincare_extremal() const;

  /// On [0, inf): int h^2 w^2 <= 1/k^2 int h_x^2 w^2 + 12/k (int h w^2)^2.
  /// Only the x >= 0 half of the input is used.
  IneqReport hardy_halfline(const TestFunction& h, std::uint64_t seed = 0) const;

  /// For h(0) = 0: int_0^inf h^2 w_x^2 <= int_0^inf h_x^2 w^2, the mirrored
  /// statement on (-inf, 0] and the full-line sum. Throws PreconditionError
  /// when |h(0)| > 1e-12.
  std::vector<IneqReport> hardy_weighted(const TestFunction& h, std::uint64_t seed = 0) const;

  /// |int h^2 w_x w| <= 1/k int h_x^2 w^2 + 6/k (int h w^2)^2
  IneqReport perturbation(const TestFunction& h, std::uint64_t seed = 0) const;

  /// int u_x^2 + int u^2 <= q1 int h_x^2 w^2 + q2 <u, v_x>^2 with u = h w,
  /// q1 = 5 (1 + nu/b), q2 = 18 sqrt(2/(nu b)) (nu + b).
  IneqReport norm_equivalence(const TestFunction& u, std::uint64_t seed = 0) const;

  /// -nu int u_x^2 + b int f'(v) u^2 <= -kappa* ||u||_V^2 + C* <u, v_x>^2
  IneqReport spectral_gap(const TestFunction& u, std::uint64_t seed = 0) const;

  /// For u = h w: <nu u_xx + b f'(v) u, u>
  ///   <= -2 min(a, 1-a) nu int h_x^2 w^2 + 6 |1 - 2a| nu <h, w^2>^2
  IneqReport substitution_form(const TestFunction& h, std::uint64_t seed = 0) const;

  /// Monotonicity and coercivity of nu Lap_h + b G, and the cubic remainder
  /// bound, against the wave translated by `phase`. Uses the discrete
  /// Laplacian and the difference-gradient V norm.
  std::vector<IneqReport> form_bounds(const Field& u, const Field& u2, double phase,
                                      std::uint64_t seed = 0) const;

  /// The fixed example inputs for every check (constant, zero, extremal and
  /// single-bump functions), each report named `check[input]`.
  std::vector<IneqReport> named_examples() const;

  /// Randomised suite: `per_check` draws for each inequality. Per-draw seeds
  /// are derived from `seed`, so the result does not depend on `workers`.
  std::vector<IneqReport> random_sweep(std::size_t per_check, std::uint64_t seed,
                                       unsigned workers = 0) const;

 private:
  IneqReport report(std::string name, double lhs, double rhs, std::uint64_t seed) const {
    return make_report(std::move(name), lhs, rhs, rel_tol_, seed);
  }
  double weighted(const Field& f, const Field& g, const Field& weight) const;

  ModelParams params_;
  Grid grid_;
  double rel_tol_;
  Field v_;       // v(x)
  Field w_;       // w = v_x
  Field w_x_;     // w_x = v_xx
  Field fprime_;  // f'(v(x))
};

}  // namespace wavelab
