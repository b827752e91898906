#include <doctest.h>

#include <cmath>
#include <random>

#include "wavelab/dynamics.hpp"
#include "wavelab/errors.hpp"

using namespace wavelab;

namespace {

Problem reference_problem(std::size_t n = 801, double L = 40.0) {
  return Problem{derive_constants(1.0, 2.0, 0.25), Grid(L, n)};
}

Field bump(const Grid& g, double amp, double c = 0.0, double s = 1.0) {
  return sample(g, [=](double x) { return amp * std::exp(-0.5 * (x - c) * (x - c) / (s * s)); });
}

double norm_of(const Grid& g, const Field& f) { return norm_h(g, f); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero perturbation is a fixed point for any dt") {
  const Problem pb = reference_problem();
  for (double dt : {1e-3, 0.05, 0.7}) {
    PhaseState s = make_state(pb, Field(pb.grid.size()));
    for (int i = 0; i < 50; ++i) s = step_det(pb, s, dt);
    for (double v : s.u) CHECK(v == 0.0);
    for (double v : s.u_tilde) CHECK(v == 0.0);
    CHECK(s.C == 0.0);
    CHECK(s.Cdot == 0.0);
  }
}

TEST_CASE("adapted perturbation invariant") {
  const Problem pb = reference_problem();
  PhaseState s = make_state(pb, bump(pb.grid, 0.1));
  for (int i = 0; i < 20; ++i) s = step_det(pb, s, 0.01);
  CHECK(s.C != 0.0);
  const double ct = pb.params.c * s.t;
  for (std::size_t i = 0; i < pb.grid.size(); i += 7) {
    const double x = pb.grid.x(i);
    const double expect = s.u[i] + tw_value(x + ct, pb.params.k) - tw_value(x + s.C + ct, pb.params.k);
    CHECK(s.u_tilde[i] == doctest::Approx(expect).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("make_state clamps the boundary values") {
  const Problem pb = reference_problem(101, 10.0);
  const PhaseState s = make_state(pb, Field(pb.grid.size(), 0.3));
  CHECK(s.u[0] == 0.0);
  CHECK(s.u[100] == 0.0);
  CHECK(s.u[50] == 0.3);
  CHECK(s.t == 0.0);
  CHECK(s.C == 0.0);
}

TEST_CASE("phase right-hand side") {
  const Problem pb = reference_problem(2001);
  const double t = 0.8;
  const Field v = wave_at(pb, pb.params.c * t);
  CHECK(phase_rhs(pb, t, 0.0, v) == 0.0);
  for (double C : {-0.05, -1e-3, 1e-3, 0.05}) {
    const double B = phase_rhs(pb, t, C, v);
    CHECK((B > 0) == (C > 0));
    // B ~ C ||w||^2 for small C
    if (std::abs(C) < 1e-2) CHECK(B / C == doctest::Approx(1.0 / 6.0).epsilon(1e-2));
  }
}

TEST_CASE("phase right-hand side is Lipschitz in C uniformly in t") {
  const Problem pb = reference_problem(2001);
  const Grid& g = pb.grid;
  const Field u = bump(g, 0.2, 1.0, 1.5);
  const double k = pb.params.k;
  const double nw = std::sqrt(k / 6.0), nwx = std::sqrt(k * k * k / 30.0);
  const double K = nwx * (norm_of(g, u) + 2.0 * nw) + nw * nw;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dc(-1.0, 1.0);
  for (double t : {0.0, 1.0, 5.0, 20.0}) {
    Field v = wave_at(pb, pb.params.c * t);
    for (std::size_t i = 0; i < g.size(); ++i) v[i] += u[i];
    for (int r = 0; r < 200; ++r) {
      const double c1 = dc(rng), c2 = dc(rng);
      const double diff = std::abs(phase_rhs(pb, t, c1, v) - phase_rhs(pb, t, c2, v));
      CHECK(diff <= K * std::abs(c1 - c2) * (1 + 1e-9));
    }
  }
}

TEST_CASE("shifted wave relaxes: C -> y0 and the adapted norm decreases") {
  const Problem pb = reference_problem(1601);
  const double y0 = 0.5;
  const Field u0 = sample(pb.grid, [&](double x) {
    return tw_value(x + y0, pb.params.k) - tw_value(x, pb.params.k);
  });
  DetOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 4.0;
  opt.sample_every = 100;
  opt.c_budget = 2;
  const DetTrajectory tr = run_det(pb, u0, opt);
  CHECK(std::abs(tr.final_state.C - y0) < 1e-2);
  double prev = tr.samples.front().norm_h;
  for (const auto& s : tr.samples) {
    if (s.t < 0.1 || prev < 1e-4) {
      prev = s.norm_h;
      continue;
    }
    CHECK(s.norm_h <= prev);
    prev = s.norm_h;
  }
  CHECK(tr.samples.back().norm_h < 1e-3);
  CHECK(tr.growth_envelope_ok);
}

TEST_CASE("time-step self-convergence is first order") {
  const Problem pb = reference_problem(401);
  const Field u0 = bump(pb.grid, 0.15, 0.5, 1.0);
  const auto final_norm = [&](double dt) {
    PhaseState s = make_state(pb, u0);
    const long steps = std::lround(1.0 / dt);
    for (long i = 0; i < steps; ++i) s = step_det(pb, s, dt);
    return std::pair{norm_h(pb.grid, s.u_tilde), s.C};
  };
  const auto [n1, c1] = final_norm(0.02);
  const auto [n2, c2] = final_norm(0.01);
  const auto [n3, c3] = final_norm(0.005);
  const double r_norm = std::abs(n1 - n2) / std::abs(n2 - n3);
  const double r_phase = std::abs(c1 - c2) / std::abs(c2 - c3);
  CHECK(r_norm == doctest::Approx(2.0).epsilon(0.15));
  CHECK(r_phase == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("run_det on zero data") {
  const Problem pb = reference_problem(201);
  DetOptions opt;
  opt.dt = 0.01;
  opt.t_end = 1.0;
  opt.sample_every = 10;
  opt.delta = 0.5;
  const DetTrajectory tr = run_det(pb, Field(pb.grid.size()), opt);
  CHECK(tr.samples.size() == 11);
  for (const auto& s : tr.samples) {
    CHECK(s.norm_h == 0.0);
    CHECK(s.norm_v == 0.0);
    CHECK(s.C == 0.0);
    CHECK(s.energy_residual == 0.0);
  }
  CHECK(tr.certificate_ok);
  CHECK(tr.growth_envelope_ok);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
}

TEST_CASE("decay certificate on a short run") {
  const Problem pb = reference_problem(801, 30.0);
  Field u0 = bump(pb.grid, 1.0);
  const double target = 0.5 * decay_radius(pb.params, 0.5);
  const double n0 = norm_h(pb.grid, u0);
  for (auto& x : u0) x *= target / n0;
  DetOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 5.0;
  opt.sample_every = 100;
  opt.delta = 0.5;
  const DetTrajectory tr = run_det(pb, u0, opt);
  CHECK(tr.certificate_ok);
  CHECK(tr.max_envelope_ratio <= 1.05);
  CHECK(tr.theoretical_rate == doctest::Approx(0.5 / 15.0));
}

TEST_CASE("growth envelope holds for large data") {
  const Problem pb = reference_problem(801);
  DetOptions opt;
  opt.dt = 2e-3;
  opt.t_end = 3.0;
  opt.sample_every = 50;
  const DetTrajectory tr = run_det(pb, bump(pb.grid, 0.6, -1.0, 2.0), opt);
  CHECK(tr.growth_envelope_ok);
  for (const auto& s : tr.samples) CHECK(s.norm_u_sq <= s.lem0_envelope * (1 + 1e-12));
}

TEST_CASE("smallness condition, horizon guard and blow-up") {
  const Problem pb = reference_problem(401);
  DetOptions opt;
  opt.dt = 0.01;
  opt.t_end = 1.0;
  opt.delta = 0.5;
  CHECK_THROWS_AS(run_det(pb, bump(pb.grid, 0.1), opt), ConfigError);

  CHECK_NOTHROW(check_horizon(pb, 40.0, 1.0));
  CHECK_THROWS_AS(check_horizon(pb, 50.0, 1.0), ConfigError);
  DetOptions longrun;
  longrun.t_end = 200.0;
  CHECK_THROWS_AS(run_det(pb, Field(pb.grid.size()), longrun), ConfigError);

  PhaseState s = make_state(pb, Field(pb.grid.size()));
  s.u[100] = std::nan("");
  CHECK_THROWS_AS(step_det(pb, s, 0.01), BlowUpError);
  try {
    step_det(pb, s, 0.01);
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 1);
  }
  CHECK_THROWS_AS(step_det(pb, make_state(pb, Field(pb.grid.size())), 0.0), PreconditionError);
}

TEST_CASE("energy identity residual") {
  const Problem pb = reference_problem(801);
  const PhaseState z = make_state(pb, Field(pb.grid.size()));
  CHECK(energy_identity_residual(pb, z, step_det(pb, z, 0.01)) == 0.0);

  const auto mean_residual = [&](double dt) {
    PhaseState s = make_state(pb, bump(pb.grid, 0.1, 0.3, 1.0));
    double sum = 0.0;
    const long steps = std::lround(1.0 / dt);
    for (long i = 0; i < steps; ++i) {
      const PhaseState next = step_det(pb, s, dt);
      sum += energy_identity_residual(pb, s, next);
      s = next;
    }
    return sum / static_cast<double>(steps);
  };
  const double r1 = mean_residual(0.02), r2 = mean_residual(0.01);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("decay-rate fit and default step") {
  std::vector<DetSample> s;
  for (int i = 0; i <= 20; ++i) {
    DetSample d{};
    d.t = 0.5 * i;
    d.norm_h = 3.0 * std::exp(-0.21 * d.t);
    s.push_back(d);
  }
  CHECK(fit_decay_rate(s, 1.0) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(default_dt(derive_constants(1, 2, 0.25)) == 1e-3);
  const ModelParams stiff = derive_constants(1, 10, 0.25);
  CHECK(default_dt(stiff) == doctest::Approx(1e-3 / (10 * stiff.eta)));
}

}
