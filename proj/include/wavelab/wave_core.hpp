#pragma once

// Closed-form Nagumo travelling front, the cubic reaction term and the
// stability constants derived from (nu, b, a).

namespace wavelab {

struct ModelParams {
  double nu = 1.0;  // diffusion coefficient
  double b = 2.0;   // reaction strength
  double a = 0.25;  // threshold, 0 < a < 1

  double k = 0.0;           // front steepness sqrt(b / (2 nu))
  double c = 0.0;           // front speed sqrt(2 nu b) (1/2 - a); the front moves towards -inf
  double eta = 0.0;         // sup of f'
  double kappa_star = 0.0;  // spectral gap of the linearisation off the translation mode
  double C_star = 0.0;      // weight of the translation mode in the gap estimate
  double c_star = 0.0;      // exit radius kappa_star / (2 b (4 + a))
  double m = 0.0;           // phase relaxation rate, m = m_factor * C_star
};

/// Validates (nu, b, a, m_factor) and fills every derived constant.
///
/// The spectral gap uses min(a, 1 - a), which is symmetric under a -> 1 - a.
ModelParams derive_constants(double nu, double b, double a, double m_factor = 2.0);

/// Radius of the ball in which the deterministic decay estimate applies:
/// delta * kappa_star / (b (4 + a)).
double decay_radius(const ModelParams& p, double delta);

/// f(v) = v (1 - v) (v - a)
double reaction(double v, double a);

struct ReactionDerivatives {
  double d1;
  double d2;
  double d3;
};

ReactionDerivatives reaction_derivatives(double v, double a);

/// sup over the real line of f'(v) = (1 - a + a^2) / 3.
double reaction_sup_derivative(double a);

struct WaveProfile {
  double v;
  double v_x;
  double v_xx;
  double v_xxx;
};

/// v(x) = 1 / (1 + exp(-k x)) together with analytic derivatives.
WaveProfile tw_profile(double x, const ModelParams& p);

/// Profile value only; cheaper inner-loop variant of tw_profile.
double tw_value(double x, double k);

/// v_x = k v (1 - v), evaluated without cancellation in the tails.
double tw_slope(double x, double k);

}  // namespace wavelab
