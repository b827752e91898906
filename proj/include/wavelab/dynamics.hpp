#pragma once

// Time integration of the perturbation u = v - v_TW(. + ct) of the Nagumo
// front, coupled to the phase-adaptation ODE
//
//   C'(t) = -m <v_TW'(. + C + ct), v_TW(. + C + ct) - v(t)>,   C(0) = 0,
//
// which relaxes C towards the translate of the front closest to v. The
// adapted perturbation u~ = v - v_TW(. + C + ct) is reconstructed after every
// step. Diffusion is implicit, reaction and phase explicit (first order IMEX).

#include <optional>
#include <vector>

#include "wavelab/grid.hpp"
#include "wavelab/wave_core.hpp"

namespace wavelab {

struct Problem {
  ModelParams params;
  Grid grid;
};

struct PhaseState {
  double t = 0.0;
  double C = 0.0;
  double Cdot = 0.0;
  long step = 0;
  Field u;        // v - v_TW(. + ct)
  Field u_tilde;  // v - v_TW(. + C + ct)
};

/// v_TW(x + shift) on the grid.
Field wave_at(const Problem& pb, double shift);

/// u~ = u + v_TW(. + ct) - v_TW(. + C + ct).
Field adapted_perturbation(const Problem& pb, double t, double C, const Field& u);

/// Initial state at t = 0, C = 0. Boundary values of u0 are clamped to zero
/// (homogeneous Dirichlet closure for the perturbation).
PhaseState make_state(const Problem& pb, Field u0);

/// B(t, C) = <v_TW'(. + C + ct), v_TW(. + C + ct) - v>, v the full solution.
double phase_rhs(const Problem& pb, double t, double C, const Field& v);

/// One IMEX step. `forcing`, when given, is added to the explicit right-hand
/// side before the diffusion solve (the stochastic stepper passes its noise
/// term here). Throws BlowUpError on non-finite values.
PhaseState step_det(const Problem& pb, const PhaseState& s, double dt,
                    const Field* forcing = nullptr);

/// |d/dt (1/2 ||u~||^2) - rhs| for the step s0 -> s1, where the time
/// derivative is the forward difference and
///   rhs = -nu ||u~_x||^2 + b <G~(u~), u~> - m <v_TW'(. + C + ct), u~>^2
/// is evaluated at s0. The gradient term uses u~ and the discrete Dirichlet
/// energy of the stepping Laplacian.
double energy_identity_residual(const Problem& pb, const PhaseState& s0, const PhaseState& s1);

/// Throws ConfigError unless |c| t_end + c_budget + 10/k < L - 5/k, i.e. the
/// moving front stays well inside the truncated domain.
void check_horizon(const Problem& pb, double t_end, double c_budget);

struct DetSample {
  double t;
  double norm_h;         // ||u~||_H
  double norm_v;         // ||u~||_V
  double C;
  double Cdot;
  double envelope;       // exp(-(1 - delta) kappa* t) ||u0||_H, NaN without delta
  double lem0_envelope;  // exp(2 b eta t) ||u0||_H^2
  double norm_u_sq;      // ||u||_H^2
  double energy_residual;
};

struct DetOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  long sample_every = 100;            // steps between samples
  std::optional<double> delta;        // request the decay certificate
  double c_budget = 1.0;              // expected sup |C| for the horizon guard
  double certificate_slack = 0.05;    // allowed relative excess over the envelope
};

struct DetTrajectory {
  std::vector<DetSample> samples;
  PhaseState final_state;
  double u0_norm = 0.0;
  double fitted_rate = 0.0;       // -slope of log ||u~||_H after the first 10% of the run
  double theoretical_rate = 0.0;  // (1 - delta) kappa*, 0 without delta
  double max_envelope_ratio = 0.0;
  bool certificate_ok = true;     // norm_h <= (1 + slack) envelope at every sample
  bool growth_envelope_ok = true;  // ||u||^2 <= exp(2 b eta t) ||u0||^2 at every sample
};

/// Integrates from u0 to t_end. With options.delta set, u0 must satisfy the
/// smallness condition ||u0||_H < delta kappa* / (b (4 + a)).
DetTrajectory run_det(const Problem& pb, const Field& u0, const DetOptions& options);

/// Least-squares decay rate of log(norm) over samples with t >= t_from.
double fit_decay_rate(const std::vector<DetSample>& samples, double t_from);

/// Default step 1e-3 min(1, 1/(b eta)).
double default_dt(const ModelParams& p);

}  // namespace wavelab
