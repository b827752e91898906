#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "wavelab/errors.hpp"
#include "wavelab/inequality_lab.hpp"

using namespace wavelab;

namespace {

ModelParams ref() { return derive_constants(1.0, 2.0, 0.25); }

TestFunction bump(const Grid& g, double c, double s, double amp = 1.0) {
  TestFunction t{Field(g.size()), Field(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = (g.x(i) - c) / s;
    t.value[i] = amp * std::exp(-0.5 * z * z);
    t.deriv[i] = -z / s * t.value[i];
  }
  return t;
}

TestFunction constant(const Grid& g, double value) {
  return {Field(g.size(), value), Field(g.size(), 0.0)};
}

}  // namespace

TEST_SUITE("inequality_lab") {

TEST_CASE("report semantics") {
  const IneqReport ok = make_report("x", 1.0, 1.0 - 1e-7, 1e-6);
  CHECK(ok.pass);
  CHECK(ok.slack == doctest::Approx(-1e-7));
  const IneqReport bad = make_report("x", 1.0, 1.0 - 1e-5, 1e-6);
  CHECK_FALSE(bad.pass);
  const IneqReport zero = make_report("x", 0.0, 0.0, 1e-6);
  CHECK(zero.pass);
  CHECK(zero.slack == 0.0);
  CHECK(make_report("x", 1e-19, 0.0, 1e-6).pass);  // floor of 1e-12 on the scale
  CHECK_FALSE(make_report("x", 1e-13, 0.0, 1e-6).pass);
}

TEST_CASE("Poincare on constants and on a bump against an independent evaluation") {
  const ModelParams p = ref();
  const Grid g(40.0, 4001);
  const InequalityLab lab(p, g);

  const IneqReport one = lab.poincare(constant(g, 1.0));
  CHECK(one.lhs == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  CHECK(one.rhs == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  CHECK(std::abs(one.slack) < 1e-12);
  CHECK(one.pass);

  const IneqReport zero = lab.poincare(constant(g, 0.0));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  const TestFunction h = bump(g, 0.7, 1.3, 2.0);
  double a = 0, b = 0, m = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = tw_slope(g.x(i), p.k);
    const double wt = (i == 0 || i + 1 == g.size()) ? 0.5 * g.dx() : g.dx();
    a += wt * h.value[i] * h.value[i] * w * w;
    b += wt * h.deriv[i] * h.deriv[i] * w * w;
    m += wt * h.value[i] * w * w;
  }
  const IneqReport r = lab.poincare(h, 9);
  CHECK(r.lhs == doctest::Approx(a).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(4.0 / 3.0 * b + 6.0 * m * m).epsilon(1e-12));
  CHECK(r.seed == 9);
  CHECK(r.pass);
}

TEST_CASE("Poincare extremal is an equality case") {
  for (double b : {2.0, 4.5}) {
    const ModelParams p = derive_constants(1.0, b, 0.25);
    const Grid g(40.0 / p.k, 4001);
    const InequalityLab lab(p, g);
    const auto ex = lab.poincare_extremal();
    const double k2 = p.k * p.k;
    CHECK(std::abs(ex.mean) < 1e-8);
    CHECK(std::abs(ex.second_moment - k2 / 3.0) < 1e-6 * k2);
    CHECK(std::abs(ex.gradient_energy - k2 * k2 / 4.0) < 1e-6 * k2 * k2);
    CHECK(std::abs(ex.report.slack) <= 1e-4 * k2 / 3.0);
    CHECK(ex.report.pass);
    // h0 = k (1 - 2v) w^{-1/2}
    const std::size_t i = g.center() + 100;
    const double v = tw_value(g.x(i), p.k);
    CHECK(ex.h0.value[i] == doctest::Approx(p.k * (1 - 2 * v) / std::sqrt(tw_slope(g.x(i), p.k))));
  }
}

TEST_CASE("Hardy half-line equality for constants") {
  const Grid g(40.0, 4001);
  const InequalityLab lab(ref(), g);
  const IneqReport r = lab.hardy_halfline(constant(g, 1.0));
  CHECK(r.lhs == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(std::abs(r.slack) < 1e-12);
  CHECK(lab.hardy_halfline(bump(g, 2.0, 1.0)).pass);
}

TEST_CASE("weighted Hardy requires h(0) = 0") {
  const Grid g(40.0, 4001);
  const InequalityLab lab(ref(), g);
  CHECK_THROWS_AS(lab.hardy_weighted(constant(g, 1.0)), PreconditionError);
  const auto reports = lab.hardy_weighted(constant(g, 0.0));
  CHECK(reports.size() == 3);
  for (const auto& r : reports) CHECK(r.pass);
  TestFunction xb = bump(g, 0.0, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    xb.deriv[i] = xb.value[i] + x * xb.deriv[i];
    xb.value[i] *= x;
  }
  const auto rs = lab.hardy_weighted(xb);
  // the full-line report is the sum of the two halves
  CHECK(rs[2].lhs == doctest::Approx(rs[0].lhs + rs[1].lhs));
  CHECK(rs[2].rhs == doctest::Approx(rs[0].rhs + rs[1].rhs));
  for (const auto& r : rs) CHECK(r.pass);
}

TEST_CASE("perturbation check vanishes for even h") {
  const Grid g(40.0, 4001);
  const InequalityLab lab(ref(), g);
  CHECK(lab.perturbation(bump(g, 0.0, 1.0)).lhs < 1e-15);
  CHECK(lab.perturbation(bump(g, 1.0, 1.0)).lhs > 1e-4);
}

TEST_CASE("norm equivalence and spectral gap on the translation mode") {
  const ModelParams p = ref();
  const Grid g(40.0, 4001);
  const InequalityLab lab(p, g);
  TestFunction w{lab.ground_state(), Field(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = tw_value(g.x(i), p.k);
    w.deriv[i] = p.k * (1 - 2 * v) * w.value[i];
  }
  const double q2 = 18.0 * std::sqrt(2.0 / (p.nu * p.b)) * (p.nu + p.b);
  const IneqReport ne = lab.norm_equivalence(w);
  CHECK(ne.lhs == doctest::Approx(1.0 / 30.0 + 1.0 / 6.0).epsilon(1e-9));
  CHECK(ne.rhs == doctest::Approx(q2 / 36.0).epsilon(1e-9));

  const IneqReport sg = lab.spectral_gap(w);
  CHECK(std::abs(sg.lhs) < 1e-12);
  CHECK(sg.rhs == doctest::Approx(-p.kappa_star * (1.0 / 30.0 + 1.0 / 6.0) + p.C_star / 36.0).epsilon(1e-9));
  CHECK(sg.pass);
}

TEST_CASE("substitution form on h = 1 reduces to the eigen-relation") {
  const ModelParams p = ref();
  const Grid g(40.0, 4001);
  const InequalityLab lab(p, g);
  const IneqReport r = lab.substitution_form(constant(g, 1.0));
  CHECK(std::abs(r.lhs) < 1e-12);
  CHECK(r.rhs == doctest::Approx(6.0 * 0.5 / 36.0).epsilon(1e-9));
}

TEST_CASE("form bounds trivial cases") {
  const Grid g(20.0, 801);
  const InequalityLab lab(ref(), g);
  const Field z(g.size());
  const Field b = bump(g, 0.3, 1.0).value;
  const auto same = lab.form_bounds(b, b, 0.4);
  REQUIRE(same.size() == 3);
  CHECK(same[0].lhs == 0.0);
  CHECK(same[0].rhs == 0.0);
  const auto at_zero = lab.form_bounds(z, b, 0.0);
  CHECK(at_zero[1].lhs == 0.0);
  CHECK(at_zero[1].rhs == 0.0);
  CHECK(at_zero[2].lhs == 0.0);
  CHECK(at_zero[2].rhs == 0.0);
  for (const auto& r : at_zero) CHECK(r.pass);
}

TEST_CASE("named examples all hold") {
  const InequalityLab lab(ref(), Grid(40.0, 4001));
  const auto reports = lab.named_examples();
  CHECK(reports.size() > 20);
  for (const auto& r : reports) {
    CAPTURE(r.name);
    CHECK(r.pass);
  }
}

TEST_CASE("random sweep passes and is independent of the worker count") {
  const InequalityLab lab(derive_constants(0.6, 1.7, 0.35), Grid(40.0 / std::sqrt(1.7 / 1.2), 2001));
  const auto one = lab.random_sweep(30, 99, 1);
  const auto two = lab.random_sweep(30, 99, 3);
  REQUIRE(one.size() == two.size());
  std::map<std::string, int> count;
  for (std::size_t i = 0; i < one.size(); ++i) {
    CAPTURE(one[i].name);
    CHECK(one[i].pass);
    CHECK(one[i].name == two[i].name);
    CHECK(one[i].lhs == two[i].lhs);
    CHECK(one[i].rhs == two[i].rhs);
    CHECK(one[i].seed == two[i].seed);
    ++count[one[i].name.substr(0, one[i].name.find('['))];
  }
  for (const char* check : {"poincare", "hardy_halfline", "hardy_weighted_upper", "perturbation",
                            "norm_equivalence", "spectral_gap", "substitution_form",
                            "monotonicity", "coercivity", "remainder"}) {
    CAPTURE(check);
    CHECK(count[check] == 30);
  }
  const auto other = lab.random_sweep(30, 100, 1);
  CHECK(other[0].lhs != one[0].lhs);
}

TEST_CASE("random families are compactly supported and finite") {
  const ModelParams p = ref();
  const Grid g(40.0, 4001);
  std::mt19937_64 rng(5);
  for (Family f : {Family::GaussianBump, Family::RandomFourier, Family::ShiftedWaveDerivative}) {
    for (int t = 0; t < 20; ++t) {
      const TestFunction h = make_test_function(g, p, random_spec(f, p, true, rng));
      CHECK(h.value.all_finite());
      CHECK(h.deriv.all_finite());
      CHECK(std::abs(h.value[0]) < 1e-12);
      CHECK(std::abs(h.value[g.size() - 1]) < 1e-12);
    }
  }
}

TEST_CASE("slacks converge under refinement") {
  const ModelParams p = ref();
  const auto slack_at = [&](std::size_t n) {
    const Grid g(20.0, n);
    return InequalityLab(p, g).perturbation(bump(g, 1.0, 0.8)).slack;
  };
  const double limit = slack_at(8001);
  double prev = std::abs(slack_at(101) - limit);
  for (std::size_t n : {201u, 401u}) {
    const double err = std::abs(slack_at(n) - limit);
    CHECK((err < 1e-13 || prev / err > 3.5));
    prev = err;
  }
}

}
