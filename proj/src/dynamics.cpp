#include "wavelab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavelab/errors.hpp"

namespace wavelab {

Field wave_at(const Problem& pb, double shift) {
  const Grid& g = pb.grid;
  Field out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = tw_value(g.x(i) + shift, pb.params.k);
  return out;
}

namespace {

Field slope_at(const Problem& pb, double shift) {
  const Grid& g = pb.grid;
  Field out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = tw_slope(g.x(i) + shift, pb.params.k);
  return out;
}

// u + V(. + ct) - V(. + C + ct); the fixed-frame wave is passed in when the
// caller already has it.
Field adapted_from(const Problem& pb, double t, double C, const Field& u, const Field& wave) {
  const Field shifted = wave_at(pb, pb.params.c * t + C);
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + wave[i] - shifted[i];
  return out;
}

void require_finite(const Field& f, const char* what, long step) {
  if (f.all_finite()) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " at step " << step;
  throw BlowUpError(msg.str(), step);
}

}  // namespace

Field adapted_perturbation(const Problem& pb, double t, double C, const Field& u) {
  check_shape(pb.grid, u);
  return adapted_from(pb, t, C, u, wave_at(pb, pb.params.c * t));
}

PhaseState make_state(const Problem& pb, Field u0) {
  check_shape(pb.grid, u0);
  require_finite(u0, "initial perturbation", 0);
  u0[0] = 0.0;
  u0[u0.size() - 1] = 0.0;
  PhaseState s;
  s.u_tilde = adapted_perturbation(pb, 0.0, 0.0, u0);
  s.u = std::move(u0);
  return s;
}

double phase_rhs(const Problem& pb, double t, double C, const Field& v) {
  check_shape(pb.grid, v);
  const double shift = pb.params.c * t + C;
  const Field wave = wave_at(pb, shift);
  const Field slope = slope_at(pb, shift);
  Field diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = wave[i] - v[i];
  return inner_h(pb.grid, slope, diff);
}

PhaseState step_det(const Problem& pb, const PhaseState& s, double dt, const Field* forcing) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const ModelParams& p = pb.params;
  const Grid& g = pb.grid;
  const std::size_t n = g.size();

  const Field wave_now = wave_at(pb, p.c * s.t);
  Field rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double reaction_term = reaction(s.u[i] + wave_now[i], p.a) - reaction(wave_now[i], p.a);
    rhs[i] = s.u[i] + dt * p.b * reaction_term;
  }
  if (forcing != nullptr) {
    check_shape(g, *forcing);
    for (std::size_t i = 0; i < n; ++i) rhs[i] += (*forcing)[i];
  }
  rhs[0] = 0.0;
  rhs[n - 1] = 0.0;

  PhaseState next;
  next.step = s.step + 1;
  next.t = s.t + dt;
  next.u = diffusion_solve(g, rhs, p.nu * dt);
  require_finite(next.u, "perturbation", next.step);

  // Phase update with the post-step field and the phase from the start of the step:
  // B(t+dt, C) = -<V'(. + C + c(t+dt)), u~(t+dt, C)>.
  const Field wave_next = wave_at(pb, p.c * next.t);
  const double shift = p.c * next.t + s.C;
  const Field slope = slope_at(pb, shift);
  const Field u_tilde_frozen = adapted_from(pb, next.t, s.C, next.u, wave_next);
  const double B = -inner_h(g, slope, u_tilde_frozen);
  next.Cdot = -p.m * B;
  next.C = s.C + dt * next.Cdot;
  if (!std::isfinite(next.C)) {
    throw BlowUpError("non-finite phase at step " + std::to_string(next.step), next.step);
  }
  next.u_tilde = adapted_from(pb, next.t, next.C, next.u, wave_next);
  return next;
}

double energy_identity_residual(const Problem& pb, const PhaseState& s0, const PhaseState& s1) {
  const ModelParams& p = pb.params;
  const Grid& g = pb.grid;
  const double dt = s1.t - s0.t;
  if (!(dt > 0.0)) throw PreconditionError("states must be consecutive in time");

  const double e0 = 0.5 * inner_h(g, s0.u_tilde, s0.u_tilde);
  const double e1 = 0.5 * inner_h(g, s1.u_tilde, s1.u_tilde);

  const double shift = p.c * s0.t + s0.C;
  const Field wave = wave_at(pb, shift);
  const Field slope = slope_at(pb, shift);
  Field gtilde(wave.size());
  for (std::size_t i = 0; i < wave.size(); ++i) {
    gtilde[i] = reaction(s0.u_tilde[i] + wave[i], p.a) - reaction(wave[i], p.a);
  }
  const double proj = inner_h(g, slope, s0.u_tilde);
  const double rhs = -p.nu * dirichlet_energy(g, s0.u_tilde) +
                     p.b * inner_h(g, gtilde, s0.u_tilde) - p.m * proj * proj;
  return std::abs((e1 - e0) / dt - rhs);
}

void check_horizon(const Problem& pb, double t_end, double c_budget) {
  const double k = pb.params.k;
  const double reach = std::abs(pb.params.c) * t_end + std::abs(c_budget) + 10.0 / k;
  const double room = pb.grid.half_width() - 5.0 / k;
  if (!(reach < room)) {
    std::ostringstream msg;
    msg << "horizon guard: front travel |c| T + |C|max + 10/k = " << reach
        << " must stay below L - 5/k = " << room << "; enlarge the grid or shorten the run";
    throw ConfigError(msg.str());
  }
}

double fit_decay_rate(const std::vector<DetSample>& samples, double t_from) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const DetSample& s : samples) {
    if (s.t < t_from || !(s.norm_h > 0.0)) continue;
    const double y = std::log(s.norm_h);
    n += 1;
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -(n * sxy - sx * sy) / denom;
}

double default_dt(const ModelParams& p) { return 1e-3 * std::min(1.0, 1.0 / (p.b * p.eta)); }

DetTrajectory run_det(const Problem& pb, const Field& u0, const DetOptions& opt) {
  const ModelParams& p = pb.params;
  if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
  if (opt.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  check_horizon(pb, opt.t_end, opt.c_budget);

  DetTrajectory traj;
  PhaseState state = make_state(pb, u0);
  traj.u0_norm = norm_h(pb.grid, state.u);
  if (opt.delta) {
    const double delta = *opt.delta;
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    const double radius = decay_radius(p, delta);
    if (!(traj.u0_norm < radius)) {
      std::ostringstream msg;
      msg << "decay certificate needs ||u0||_H = " << traj.u0_norm
          << " < delta kappa*/(b(4+a)) = " << radius;
      throw ConfigError(msg.str());
    }
    traj.theoretical_rate = (1.0 - delta) * p.kappa_star;
  }

  const double u0_sq = traj.u0_norm * traj.u0_norm;
  auto record = [&](const PhaseState& s, double residual) {
    DetSample d;
    d.t = s.t;
    d.norm_h = norm_h(pb.grid, s.u_tilde);
    d.norm_v = norm_v(pb.grid, s.u_tilde);
    d.C = s.C;
    d.Cdot = s.Cdot;
    d.envelope = opt.delta ? std::exp(-traj.theoretical_rate * s.t) * traj.u0_norm
                           : std::numeric_limits<double>::quiet_NaN();
    d.lem0_envelope = std::exp(2.0 * p.b * p.eta * s.t) * u0_sq;
    d.norm_u_sq = inner_h(pb.grid, s.u, s.u);
    d.energy_residual = residual;
    if (opt.delta && d.envelope > 0.0) {
      const double ratio = d.norm_h / d.envelope;
      traj.max_envelope_ratio = std::max(traj.max_envelope_ratio, ratio);
      if (ratio > 1.0 + opt.certificate_slack) traj.certificate_ok = false;
    }
    if (d.norm_u_sq > d.lem0_envelope * (1.0 + 1e-9) + 1e-300) traj.growth_envelope_ok = false;
    traj.samples.push_back(d);
  };

  const long steps = std::lround(opt.t_end / opt.dt);
  record(state, 0.0);
  for (long n = 1; n <= steps; ++n) {
    PhaseState next = step_det(pb, state, opt.dt);
    if (n % opt.sample_every == 0 || n == steps) {
      record(next, energy_identity_residual(pb, state, next));
    }
    state = std::move(next);
  }
  traj.final_state = std::move(state);
  traj.fitted_rate = fit_decay_rate(traj.samples, 0.1 * opt.t_end);
  return traj;
}

}  // namespace wavelab
