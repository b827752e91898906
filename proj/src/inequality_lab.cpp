#include "wavelab/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "wavelab/errors.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/rng.hpp"

namespace wavelab {

IneqReport make_report(std::string name, double lhs, double rhs, double rel_tol,
                       std::uint64_t seed) {
  IneqReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = rel_tol * std::max({std::abs(lhs), std::abs(rhs), 1e-12});
  r.pass = std::isfinite(r.slack) && r.slack >= -r.tolerance;
  r.seed = seed;
  return r;
}

TestFunction from_field(const Grid& grid, const Field& f) { return {f, gradient(grid, f)}; }

const char* family_name(Family f) {
  switch (f) {
    case Family::GaussianBump: return "gaussian-bump";
    case Family::ShiftedWaveDerivative: return "shifted-wave-derivative";
    case Family::RandomFourier: return "random-fourier";
    case Family::ExtremalH0: return "extremal-h0";
  }
  return "unknown";
}

namespace {

constexpr int kFourierModes = 20;

double first_or(const std::vector<double>& v, double fallback) {
  return v.empty() ? fallback : v.front();
}

}  // namespace

TestFunction make_test_function(const Grid& grid, const ModelParams& p,
                                const TestFunctionSpec& spec) {
  const std::size_t n = grid.size();
  const double k = p.k;
  TestFunction out{Field(n, spec.offset), Field(n, 0.0)};

  switch (spec.family) {
    case Family::GaussianBump: {
      if (spec.centers.size() != spec.widths.size() ||
          spec.centers.size() != spec.amplitudes.size()) {
        throw PreconditionError("gaussian-bump spec needs matching centers/widths/amplitudes");
      }
      for (std::size_t j = 0; j < spec.centers.size(); ++j) {
        const double c = spec.centers[j];
        const double s2 = spec.widths[j] * spec.widths[j];
        const double amp = spec.amplitudes[j];
        for (std::size_t i = 0; i < n; ++i) {
          const double d = grid.x(i) - c;
          const double g = amp * std::exp(-d * d / (2.0 * s2));
          out.value[i] += g;
          out.deriv[i] -= d / s2 * g;
        }
      }
      break;
    }
    case Family::ShiftedWaveDerivative: {
      if (spec.centers.size() != spec.amplitudes.size()) {
        throw PreconditionError("shifted-wave-derivative spec needs matching centers/amplitudes");
      }
      const double peak = k / 4.0;
      for (std::size_t j = 0; j < spec.centers.size(); ++j) {
        const double scale = spec.amplitudes[j] / peak;
        for (std::size_t i = 0; i < n; ++i) {
          const WaveProfile w = tw_profile(grid.x(i) - spec.centers[j], p);
          out.value[i] += scale * w.v_x;
          out.deriv[i] += scale * w.v_xx;
        }
      }
      break;
    }
    case Family::RandomFourier: {
      std::mt19937_64 rng = make_rng(spec.seed);
      std::uniform_real_distribution<double> freq(0.0, 3.0 * k);
      std::normal_distribution<double> coef(0.0, 1.0 / std::sqrt(double(kFourierModes)));
      std::array<double, kFourierModes> om{}, ca{}, cb{};
      for (int j = 0; j < kFourierModes; ++j) {
        om[j] = freq(rng);
        ca[j] = coef(rng);
        cb[j] = coef(rng);
      }
      const double x0 = first_or(spec.centers, 0.0);
      const double r = first_or(spec.widths, 2.0 / k);
      const double amp = first_or(spec.amplitudes, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        double g = 0.0, gx = 0.0;
        for (int j = 0; j < kFourierModes; ++j) {
          const double cs = std::cos(om[j] * x);
          const double sn = std::sin(om[j] * x);
          g += ca[j] * cs + cb[j] * sn;
          gx += om[j] * (cb[j] * cs - ca[j] * sn);
        }
        const double d = x - x0;
        const double chi = std::exp(-d * d / (2.0 * r * r));
        const double chi_x = -d / (r * r) * chi;
        out.value[i] += amp * g * chi;
        out.deriv[i] += amp * (gx * chi + g * chi_x);
      }
      break;
    }
    case Family::ExtremalH0: {
      // h0 = v_xx v_x^{-3/2} = k (1 - 2v) w^{-1/2},  h0_x = -(k^2/2) w^{-1/2}
      const double amp = first_or(spec.amplitudes, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double v = tw_value(x, k);
        const double inv_sqrt_w = 1.0 / std::sqrt(tw_slope(x, k));
        out.value[i] += amp * k * (1.0 - 2.0 * v) * inv_sqrt_w;
        out.deriv[i] += -amp * 0.5 * k * k * inv_sqrt_w;
      }
      break;
    }
  }
  return out;
}

TestFunctionSpec random_spec(Family family, const ModelParams& p, bool compact,
                             std::mt19937_64& rng) {
  const double k = p.k;
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  TestFunctionSpec spec;
  spec.family = family;
  switch (family) {
    case Family::GaussianBump: {
      const int count = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int j = 0; j < count; ++j) {
        spec.centers.push_back(uni(-8.0 / k, 8.0 / k));
        spec.widths.push_back(uni(0.3 / k, 4.0 / k));
        spec.amplitudes.push_back(uni(-2.0, 2.0));
      }
      break;
    }
    case Family::ShiftedWaveDerivative: {
      const int count = std::uniform_int_distribution<int>(1, 2)(rng);
      for (int j = 0; j < count; ++j) {
        spec.centers.push_back(uni(-6.0 / k, 6.0 / k));
        spec.amplitudes.push_back(uni(-2.0, 2.0));
      }
      break;
    }
    case Family::RandomFourier:
      spec.centers.push_back(uni(-6.0 / k, 6.0 / k));
      spec.widths.push_back(uni(1.0 / k, 3.0 / k));
      spec.amplitudes.push_back(uni(0.2, 2.0));
      spec.seed = rng();
      break;
    case Family::ExtremalH0:
      spec.amplitudes.push_back(uni(-2.0, 2.0));
      break;
  }
  if (!compact && family != Family::ExtremalH0) spec.offset = uni(-2.0, 2.0);
  return spec;
}

InequalityLab::InequalityLab(ModelParams params, Grid grid, double rel_tol)
    : params_(params), grid_(grid), rel_tol_(rel_tol) {
  const std::size_t n = grid_.size();
  v_ = Field(n);
  w_ = Field(n);
  w_x_ = Field(n);
  fprime_ = Field(n);
  for (std::size_t i = 0; i < n; ++i) {
    const WaveProfile wp = tw_profile(grid_.x(i), params_);
    v_[i] = wp.v;
    w_[i] = wp.v_x;
    w_x_[i] = wp.v_xx;
    fprime_[i] = reaction_derivatives(wp.v, params_.a).d1;
  }
}

double InequalityLab::weighted(const Field& f, const Field& g, const Field& weight) const {
  Field prod(grid_.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * g[i] * weight[i];
  return integrate(grid_, prod);
}

namespace {

Field square(const Field& f) {
  Field out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * f[i];
  return out;
}

Field times(const Field& f, const Field& g) {
  Field out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

void check_pair(const Grid& grid, const TestFunction& t) {
  check_shape(grid, t.value);
  check_shape(grid, t.deriv);
}

}  // namespace

IneqReport InequalityLab::poincare(const TestFunction& h, std::uint64_t seed) const {
  check_pair(grid_, h);
  const double k = params_.k;
  const Field w2 = square(w_);
  const double lhs = weighted(h.value, h.value, w2);
  const double energy = weighted(h.deriv, h.deriv, w2);
  const double mean = integrate(grid_, times(h.value, w2));
  return report("poincare", lhs, 4.0 / (3.0 * k * k) * energy + 6.0 / k * mean * mean, seed);
}

InequalityLab::Extremal InequalityLab::poincare_extremal() const {
  TestFunctionSpec spec;
  spec.family = Family::ExtremalH0;
  Extremal e;
  e.h0 = make_test_function(grid_, params_, spec);
  const Field w2 = square(w_);
  e.mean = integrate(grid_, times(e.h0.value, w2));
  e.second_moment = weighted(e.h0.value, e.h0.value, w2);
  e.gradient_energy = weighted(e.h0.deriv, e.h0.deriv, w2);
  e.report = poincare(e.h0);
  e.report.name = "poincare_extremal";
  return e;
}

IneqReport InequalityLab::hardy_halfline(const TestFunction& h, std::uint64_t seed) const {
  check_pair(grid_, h);
  const double k = params_.k;
  const Field w2 = square(w_);
  const double lhs = integrate_upper_half(grid_, times(square(h.value), w2));
  const double energy = integrate_upper_half(grid_, times(square(h.deriv), w2));
  const double mean = integrate_upper_half(grid_, times(h.value, w2));
  return report("hardy_halfline", lhs, energy / (k * k) + 12.0 / k * mean * mean, seed);
}

std::vector<IneqReport> InequalityLab::hardy_weighted(const TestFunction& h,
                                                      std::uint64_t seed) const {
  check_pair(grid_, h);
  const std::size_t c = grid_.center();
  if (std::abs(h.value[c]) > 1e-12) {
    std::ostringstream msg;
    msg << "weighted Hardy inequality needs h(0) = 0, got h(0) = " << h.value[c];
    throw PreconditionError(msg.str());
  }
  const Field wx2 = square(w_x_);
  const Field w2 = square(w_);
  const Field lhs_density = times(square(h.value), wx2);
  const Field rhs_density = times(square(h.deriv), w2);

  // Lower half via the reflection x -> -x; w^2 and w_x^2 are even.
  const std::size_t n = grid_.size();
  Field lhs_mirror(n), rhs_mirror(n);
  for (std::size_t i = 0; i < n; ++i) {
    lhs_mirror[i] = lhs_density[n - 1 - i];
    rhs_mirror[i] = rhs_density[n - 1 - i];
  }

  std::vector<IneqReport> out;
  out.push_back(report("hardy_weighted_upper", integrate_upper_half(grid_, lhs_density),
                       integrate_upper_half(grid_, rhs_density), seed));
  out.push_back(report("hardy_weighted_lower", integrate_upper_half(grid_, lhs_mirror),
                       integrate_upper_half(grid_, rhs_mirror), seed));
  out.push_back(report("hardy_weighted_full", integrate(grid_, lhs_density),
                       integrate(grid_, rhs_density), seed));
  return out;
}

IneqReport InequalityLab::perturbation(const TestFunction& h, std::uint64_t seed) const {
  check_pair(grid_, h);
  const double k = params_.k;
  const Field w2 = square(w_);
  const double lhs = std::abs(integrate(grid_, times(square(h.value), times(w_x_, w_))));
  const double energy = weighted(h.deriv, h.deriv, w2);
  const double mean = integrate(grid_, times(h.value, w2));
  return report("perturbation", lhs, energy / k + 6.0 / k * mean * mean, seed);
}

IneqReport InequalityLab::norm_equivalence(const TestFunction& u, std::uint64_t seed) const {
  check_pair(grid_, u);
  const double nu = params_.nu;
  const double b = params_.b;
  const double k = params_.k;
  const double q1 = 5.0 * (1.0 + nu / b);
  const double q2 = 18.0 * std::sqrt(2.0 / (nu * b)) * (nu + b);
  // With h = u / w: h_x w = u_x - (w_x / w) u = u_x - k (1 - 2v) u, no division by w.
  Field hx_w(u.value.size());
  for (std::size_t i = 0; i < hx_w.size(); ++i) {
    hx_w[i] = u.deriv[i] - k * (1.0 - 2.0 * v_[i]) * u.value[i];
  }
  const double lhs = inner_h(grid_, u.deriv, u.deriv) + inner_h(grid_, u.value, u.value);
  const double proj = inner_h(grid_, u.value, w_);
  return report("norm_equivalence", lhs, q1 * inner_h(grid_, hx_w, hx_w) + q2 * proj * proj,
                seed);
}

IneqReport InequalityLab::spectral_gap(const TestFunction& u, std::uint64_t seed) const {
  check_pair(grid_, u);
  const double grad2 = inner_h(grid_, u.deriv, u.deriv);
  const double l2 = inner_h(grid_, u.value, u.value);
  const double lhs = -params_.nu * grad2 + params_.b * weighted(u.value, u.value, fprime_);
  const double proj = inner_h(grid_, u.value, w_);
  const double rhs = -params_.kappa_star * (grad2 + l2) + params_.C_star * proj * proj;
  return report("spectral_gap", lhs, rhs, seed);
}

IneqReport InequalityLab::substitution_form(const TestFunction& h, std::uint64_t seed) const {
  check_pair(grid_, h);
  const double nu = params_.nu;
  const double a = params_.a;
  const std::size_t n = grid_.size();
  Field u(n), u_x(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = h.value[i] * w_[i];
    u_x[i] = h.deriv[i] * w_[i] + h.value[i] * w_x_[i];
  }
  const double lhs = -nu * inner_h(grid_, u_x, u_x) + params_.b * weighted(u, u, fprime_);
  const Field w2 = square(w_);
  const double energy = weighted(h.deriv, h.deriv, w2);
  const double mean = integrate(grid_, times(h.value, w2));
  const double rhs =
      -2.0 * std::min(a, 1.0 - a) * nu * energy + 6.0 * std::abs(1.0 - 2.0 * a) * nu * mean * mean;
  return report("substitution_form", lhs, rhs, seed);
}

namespace {

struct ShiftedWave {
  Field v;
  Field d2;  // f''(v)
};

ShiftedWave shifted_wave(const Grid& grid, const ModelParams& p, double phase) {
  ShiftedWave s{Field(grid.size()), Field(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.v[i] = tw_value(grid.x(i) + phase, p.k);
    s.d2[i] = reaction_derivatives(s.v[i], p.a).d2;
  }
  return s;
}

Field drift(const Grid& grid, const ModelParams& p, const Field& u, const Field& wave) {
  Field out = laplacian(grid, u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p.nu * out[i] + p.b * (reaction(u[i] + wave[i], p.a) - reaction(wave[i], p.a));
  }
  return out;
}

}  // namespace

std::vector<IneqReport> InequalityLab::form_bounds(const Field& u, const Field& u2, double phase,
                                                   std::uint64_t seed) const {
  check_shape(grid_, u);
  check_shape(grid_, u2);
  const ModelParams& p = params_;
  const ShiftedWave wave = shifted_wave(grid_, p, phase);
  const std::size_t n = grid_.size();

  const Field a1 = drift(grid_, p, u, wave.v);
  const Field a2 = drift(grid_, p, u2, wave.v);
  Field diff(n), adiff(n), rem(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = u[i] - u2[i];
    adiff[i] = a1[i] - a2[i];
    // f'' (v) u^2 / 2 + f''' u^3 / 6 with f''' = -6
    rem[i] = 0.5 * wave.d2[i] * u[i] * u[i] - u[i] * u[i] * u[i];
  }
  const double l2 = inner_h(grid_, u, u);
  const double nv = norm_v(grid_, u);

  std::vector<IneqReport> out;
  out.push_back(report("monotonicity", inner_h(grid_, adiff, diff),
                       p.b * p.eta * inner_h(grid_, diff, diff), seed));
  out.push_back(report("coercivity", inner_h(grid_, a1, u),
                       -p.nu * nv * nv + (p.b * p.eta + p.nu) * l2, seed));
  out.push_back(report("remainder", inner_h(grid_, rem, u), (4.0 + p.a) * l2 * nv, seed));
  return out;
}

std::vector<IneqReport> InequalityLab::random_sweep(std::size_t per_check, std::uint64_t seed,
                                                    unsigned workers) const {
  constexpr std::size_t kChecks = 10;
  constexpr std::array<Family, 3> families = {Family::GaussianBump, Family::RandomFourier,
                                              Family::ShiftedWaveDerivative};
  const std::size_t total = kChecks * per_check;
  std::vector<std::vector<IneqReport>> slots(total);

  parallel_for(total, workers, [&](std::size_t task) {
    const std::size_t check = task / per_check;
    const std::size_t j = task % per_check;
    const std::uint64_t s = mix_seed(seed, task);
    std::mt19937_64 rng = make_rng(s);
    const Family fam = families[j % families.size()];
    auto draw = [&](bool compact) {
      return make_test_function(grid_, params_, random_spec(fam, params_, compact, rng));
    };
    auto phase = [&] { return std::uniform_real_distribution<double>(-5.0, 5.0)(rng); };
    std::vector<IneqReport>& out = slots[task];
    switch (check) {
      case 0: out.push_back(poincare(draw(false), s)); break;
      case 1: out.push_back(hardy_halfline(draw(false), s)); break;
      case 2: {
        TestFunction h = draw(false);
        const double h0 = h.value[grid_.center()];
        for (double& x : h.value) x -= h0;
        out = hardy_weighted(h, s);
        break;
      }
      case 3: out.push_back(perturbation(draw(false), s)); break;
      case 4: out.push_back(norm_equivalence(draw(true), s)); break;
      case 5: out.push_back(substitution_form(draw(false), s)); break;
      case 6: out.push_back(spectral_gap(draw(true), s)); break;
      default: {
        const Field u = draw(true).value;
        const Field u2 = draw(true).value;
        const std::vector<IneqReport> forms = form_bounds(u, u2, phase(), s);
        out.push_back(forms[check - 7]);
        break;
      }
    }
  });

  std::vector<IneqReport> all;
  all.reserve(total + 2 * per_check);
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

std::vector<IneqReport> InequalityLab::named_examples() const {
  const std::size_t n = grid_.size();
  const double k = params_.k;
  auto bump = [&](double center, double width) {
    TestFunctionSpec spec;
    spec.centers = {center};
    spec.widths = {width};
    spec.amplitudes = {1.0};
    return make_test_function(grid_, params_, spec);
  };
  auto tagged = [](IneqReport r, const char* input) {
    r.name += std::string("[") + input + "]";
    return r;
  };
  const TestFunction zero{Field(n), Field(n)};
  const TestFunction one{Field(n, 1.0), Field(n)};
  const TestFunction wave_slope{w_, w_x_};

  TestFunction x_bump{Field(n), Field(n)};
  TestFunction tanh_kx{Field(n), Field(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.x(i);
    const double g = std::exp(-x * x / 2.0);
    x_bump.value[i] = x * g;
    x_bump.deriv[i] = (1.0 - x * x) * g;
    const double th = std::tanh(k * x);
    tanh_kx.value[i] = th;
    tanh_kx.deriv[i] = k * (1.0 - th * th);
  }

  std::vector<IneqReport> out;
  out.push_back(tagged(poincare(one), "h=1"));
  out.push_back(tagged(poincare(zero), "h=0"));
  out.push_back(poincare_extremal().report);
  out.push_back(tagged(hardy_halfline(one), "h=1"));
  out.push_back(tagged(hardy_halfline(zero), "h=0"));
  out.push_back(tagged(hardy_halfline(bump(2.0 / k, 1.0 / k)), "bump@2"));
  const std::pair<const TestFunction*, const char*> weighted_inputs[] = {
      {&zero, "h=0"}, {&x_bump, "h=x*bump"}, {&tanh_kx, "h=tanh(kx)"}};
  for (const auto& [h, label] : weighted_inputs) {
    for (IneqReport& r : hardy_weighted(*h)) out.push_back(tagged(r, label));
  }
  out.push_back(tagged(perturbation(bump(0.0, 1.0 / k)), "even-bump"));
  out.push_back(tagged(perturbation(zero), "h=0"));
  out.push_back(tagged(perturbation(bump(1.0 / k, 1.0 / k)), "bump@1"));
  out.push_back(tagged(norm_equivalence(zero), "u=0"));
  out.push_back(tagged(norm_equivalence(wave_slope), "u=w"));
  out.push_back(tagged(norm_equivalence(bump(0.0, 0.3 / k)), "narrow-bump"));
  out.push_back(tagged(spectral_gap(zero), "u=0"));
  out.push_back(tagged(spectral_gap(wave_slope), "u=v_x"));
  out.push_back(tagged(substitution_form(zero), "h=0"));
  out.push_back(tagged(substitution_form(one), "h=1"));
  out.push_back(tagged(substitution_form(bump(1.0 / k, 1.0 / k)), "bump@1"));
  const Field b1 = bump(0.5 / k, 1.0 / k).value;
  for (IneqReport& r : form_bounds(b1, b1, 0.0)) out.push_back(tagged(r, "u=u2"));
  for (IneqReport& r : form_bounds(zero.value, b1, 0.0)) out.push_back(tagged(r, "u=0"));
  return out;
}

}  // namespace wavelab
