#include "wavelab/wave_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavelab/errors.hpp"

namespace wavelab {

namespace {

void require(bool ok, const char* name, double value, const char* range) {
  if (ok) return;
  std::ostringstream msg;
  msg << "model parameter " << name << " = " << value << " outside " << range;
  throw ConfigError(msg.str());
}

}  // namespace

ModelParams derive_constants(double nu, double b, double a, double m_factor) {
  require(std::isfinite(nu) && nu > 0.0, "nu", nu, "(0, inf)");
  require(std::isfinite(b) && b > 0.0, "b", b, "(0, inf)");
  require(std::isfinite(a) && a > 0.0 && a < 1.0, "a", a, "(0, 1)");
  require(std::isfinite(m_factor) && m_factor >= 1.0, "m_factor", m_factor, "[1, inf)");

  ModelParams p;
  p.nu = nu;
  p.b = b;
  p.a = a;
  p.k = std::sqrt(b / (2.0 * nu));
  p.c = std::sqrt(2.0 * nu * b) * (0.5 - a);
  p.eta = reaction_sup_derivative(a);
  p.kappa_star = 0.4 * (nu * b / (nu + b)) * std::min(a, 1.0 - a);
  p.C_star = 6.0 * (nu + b);
  p.c_star = p.kappa_star / (2.0 * b * (4.0 + a));
  p.m = m_factor * p.C_star;
  return p;
}

double decay_radius(const ModelParams& p, double delta) {
  return delta * p.kappa_star / (p.b * (4.0 + p.a));
}

double reaction(double v, double a) { return v * (1.0 - v) * (v - a); }

ReactionDerivatives reaction_derivatives(double v, double a) {
  // f(v) = -v^3 + (1 + a) v^2 - a v
  return {-3.0 * v * v + 2.0 * (1.0 + a) * v - a, -6.0 * v + 2.0 * (1.0 + a), -6.0};
}

double reaction_sup_derivative(double a) { return (1.0 - a + a * a) / 3.0; }

double tw_value(double x, double k) { return 1.0 / (1.0 + std::exp(-k * x)); }

double tw_slope(double x, double k) {
  // k e^{-k|x|} / (1 + e^{-k|x|})^2 is even in x and never overflows.
  const double e = std::exp(-k * std::abs(x));
  const double d = 1.0 + e;
  return k * e / (d * d);
}

WaveProfile tw_profile(double x, const ModelParams& p) {
  const double k = p.k;
  const double v = tw_value(x, k);
  const double v_x = tw_slope(x, k);
  const double q = v * (1.0 - v);
  return {v, v_x, k * (1.0 - 2.0 * v) * v_x, k * k * (1.0 - 6.0 * q) * v_x};
}

}  // namespace wavelab
