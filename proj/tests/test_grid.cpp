#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wavelab/errors.hpp"
#include "wavelab/grid.hpp"
#include "wavelab/wave_core.hpp"

using namespace wavelab;

namespace {

Field wave_slope_field(const Grid& g, double k) {
  return sample(g, [k](double x) { return tw_slope(x, k); });
}

double min_part_sq(const Grid& g, double k) {
  const Field m = sample(g, [k](double x) {
    const double v = tw_value(x, k);
    return std::min(v, 1.0 - v);
  });
  return inner_h(g, m, m);
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("construction") {
  const Grid g(2.0, 5);
  CHECK(g.dx() == 1.0);
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(g.center()) == 0.0);
  CHECK(g.x(4) == 2.0);
  CHECK_THROWS_AS(Grid(2.0, 4), ConfigError);
  CHECK_THROWS_AS(Grid(2.0, 1), ConfigError);
  CHECK_THROWS_AS(Grid(0.0, 5), ConfigError);
  CHECK_THROWS_AS(Grid(-1.0, 5), ConfigError);
}

TEST_CASE("shape mismatch") {
  const Grid g(1.0, 5);
  CHECK_THROWS_AS(norm_h(g, Field(7)), ShapeError);
  CHECK_THROWS_AS(inner_h(g, Field(5), Field(3)), ShapeError);
  CHECK_THROWS_AS(laplacian(g, Field(4)), ShapeError);
}

TEST_CASE("trapezoid quadrature") {
  const Grid g(40.0, 4001);
  CHECK(integrate(g, Field(g.size())) == 0.0);
  const Field gauss = sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(std::abs(integrate(g, gauss) - std::sqrt(std::numbers::pi)) < 1e-13);
  CHECK(std::abs(integrate_upper_half(g, gauss) - 0.5 * std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("wave-derivative moments") {
  const Grid g(40.0, 4001);
  const Field w = wave_slope_field(g, 1.0);
  const Field w2 = sample(g, [](double x) { return std::pow(tw_slope(x, 1.0), 2); });
  CHECK(std::abs(integrate(g, w2) - 1.0 / 6.0) < 1e-6);
  CHECK(std::abs(integrate_upper_half(g, w2) - 1.0 / 12.0) < 1e-6);
  CHECK(std::abs(norm_h(g, w) * norm_h(g, w) - 1.0 / 6.0) < 1e-6);
  CHECK(norm_h(g, Field(g.size())) == 0.0);
}

TEST_CASE("second-order convergence of the wave quadratures") {
  // Closed forms: int w^2 = k/6, int w_x^2 = k^3/30, int min(v,1-v)^2 = (2 ln2 - 1)/k.
  const double k = 1.0;
  const double exact_min = (2.0 * std::log(2.0) - 1.0) / k;

  // independent oracle for the last closed form: Simpson on [0, 60] with a fine step
  double simpson = 0.0;
  const int m = 600000;
  const double h = 60.0 / m;
  for (int i = 0; i <= m; ++i) {
    const double v = tw_value(-i * h, k);
    const double wgt = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += wgt * v * v;
  }
  simpson *= 2.0 * h / 3.0;
  CHECK(std::abs(simpson - exact_min) < 1e-12);

  double prev = 0.0;
  for (std::size_t n : {81u, 161u, 321u}) {
    const Grid g(40.0, n);
    const double err = std::abs(min_part_sq(g, k) - exact_min);
    if (prev > 0.0) {
      const double ratio = prev / err;
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
    prev = err;
  }

  // w^2 and w_x^2 are smooth, so the trapezoid rule is far better than second
  // order; check that the error is at most second order.
  for (std::size_t n : {161u, 321u}) {
    const Grid g(40.0, n);
    const Field wx = sample(g, [k](double x) {
      const double v = tw_value(x, k);
      return k * (1 - 2 * v) * tw_slope(x, k);
    });
    CHECK(std::abs(inner_h(g, wx, wx) - k * k * k / 30.0) < g.dx() * g.dx());
    const Field w = wave_slope_field(g, k);
    CHECK(std::abs(inner_h(g, w, w) - k / 6.0) < g.dx() * g.dx());
  }
}

TEST_CASE("V norm dominates H norm") {
  const Grid g(10.0, 201);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  for (int t = 0; t < 50; ++t) {
    Field f(g.size());
    for (auto& x : f) x = d(rng);
    CHECK(norm_v(g, f) >= norm_h(g, f));
  }
}

TEST_CASE("gradient is second order including the ends") {
  double prev = 0.0;
  for (std::size_t n : {101u, 201u, 401u}) {
    const Grid g(2.0, n);
    const Field f = sample(g, [](double x) { return std::sin(1.3 * x); });
    const Field df = gradient(g, f);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(df[i] - 1.3 * std::cos(1.3 * g.x(i))));
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("laplacian leaves boundary rows at zero") {
  const Grid g(1.0, 11);
  const Field f = sample(g, [](double x) { return x * x; });
  const Field l = laplacian(g, f);
  CHECK(l[0] == 0.0);
  CHECK(l[10] == 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(l[i] == doctest::Approx(2.0));
}

TEST_CASE("diffusion solve on the first Dirichlet eigenvector") {
  const double L = 5.0;
  const Grid g(L, 101);
  const Field e = sample(g, [L](double x) { return std::sin(std::numbers::pi * (x + L) / (2 * L)); });
  Field e0 = e;
  e0[0] = 0.0;
  e0[g.size() - 1] = 0.0;
  const double s = std::sin(std::numbers::pi * g.dx() / (4 * L));
  const double lam = 4.0 / (g.dx() * g.dx()) * s * s;
  for (double coeff : {0.0, 1e-3, 0.5, 10.0}) {
    const Field out = diffusion_solve(g, e0, coeff);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(out[i] - e0[i] / (1 + coeff * lam)) < 1e-13);
    }
  }
  CHECK_THROWS_AS(diffusion_solve(g, e0, -1.0), PreconditionError);
}

TEST_CASE("diffusion solve residual") {
  const Grid g(3.0, 301);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d;
  Field rhs(g.size());
  for (auto& x : rhs) x = d(rng);
  rhs[0] = rhs[g.size() - 1] = 0.0;
  const double coeff = 0.37;
  const Field out = diffusion_solve(g, rhs, coeff);
  const Field lap = laplacian(g, out);
  double res = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    res = std::max(res, std::abs(out[i] - coeff * lap[i] - rhs[i]));
    sup = std::max(sup, std::abs(rhs[i]));
  }
  CHECK(res <= 1e-12 * sup);
}

TEST_CASE("discrete integration by parts") {
  // |<Lap f, g> + <grad f, grad g>| = O(dx) ||f|| ||g|| for compactly supported f, g
  double prev = 0.0;
  for (std::size_t n : {201u, 401u, 801u}) {
    const Grid g(6.0, n);
    const Field f = sample(g, [](double x) { return std::exp(-x * x); });
    const Field h = sample(g, [](double x) { return x * std::exp(-0.5 * (x - 1) * (x - 1)); });
    const double lhs = std::abs(inner_h(g, laplacian(g, f), h) + inner_h(g, gradient(g, f), gradient(g, h)));
    CHECK(lhs <= g.dx() * norm_h(g, f) * norm_h(g, h));
    if (prev > 0.0) CHECK(lhs < prev);
    prev = lhs;
  }
}

TEST_CASE("dirichlet energy is the forward-difference sum") {
  const Grid g(2.0, 41);
  Field f = sample(g, [](double x) { return std::cos(x) + 0.3 * x; });
  f[0] = f[g.size() - 1] = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) sum += std::pow(f[i + 1] - f[i], 2) / g.dx();
  CHECK(dirichlet_energy(g, f) == doctest::Approx(sum).epsilon(1e-12));
  CHECK(dirichlet_energy(g, f) >= 0.0);
}

}
