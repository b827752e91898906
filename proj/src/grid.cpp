#include "wavelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavelab/errors.hpp"

namespace wavelab {

Grid::Grid(double half_width, std::size_t n) : half_width_(half_width), n_(n), dx_(0.0) {
  if (!(std::isfinite(half_width) && half_width > 0.0)) {
    throw ConfigError("grid half width must be positive and finite");
  }
  if (n < 3 || n % 2 == 0) {
    std::ostringstream msg;
    msg << "grid point count must be odd and >= 3, got " << n;
    throw ConfigError(msg.str());
  }
  dx_ = 2.0 * half_width / static_cast<double>(n - 1);
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field sample(const Grid& grid, const std::function<double(double)>& fn) {
  Field out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.x(i));
  return out;
}

void check_shape(const Grid& grid, const Field& f) {
  if (f.size() != grid.size()) {
    std::ostringstream msg;
    msg << "field has " << f.size() << " values but grid has " << grid.size() << " nodes";
    throw ShapeError(msg.str());
  }
}

double integrate(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw ShapeError("integrand length does not match grid");
  }
  const std::size_t n = values.size();
  double sum = 0.5 * (values[0] + values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) sum += values[i];
  return sum * grid.dx();
}

double integrate(const Grid& grid, const Field& f) { return integrate(grid, f.span()); }

double integrate_upper_half(const Grid& grid, const Field& f) {
  check_shape(grid, f);
  const std::size_t n = f.size();
  const std::size_t c = grid.center();
  double sum = 0.5 * (f[c] + f[n - 1]);
  for (std::size_t i = c + 1; i + 1 < n; ++i) sum += f[i];
  return sum * grid.dx();
}

double inner_h(const Grid& grid, const Field& f, const Field& g) {
  check_shape(grid, f);
  check_shape(grid, g);
  const std::size_t n = f.size();
  double sum = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i] * g[i];
  return sum * grid.dx();
}

double norm_h(const Grid& grid, const Field& f) { return std::sqrt(inner_h(grid, f, f)); }

Field gradient(const Grid& grid, const Field& f) {
  check_shape(grid, f);
  const std::size_t n = f.size();
  const double h = grid.dx();
  Field g(n);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return g;
}

double norm_v(const Grid& grid, const Field& f) {
  const Field g = gradient(grid, f);
  return std::sqrt(inner_h(grid, g, g) + inner_h(grid, f, f));
}

Field laplacian(const Grid& grid, const Field& f) {
  check_shape(grid, f);
  const std::size_t n = f.size();
  const double inv_h2 = 1.0 / (grid.dx() * grid.dx());
  Field out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
  return out;
}

Field diffusion_solve(const Grid& grid, const Field& rhs, double coeff) {
  check_shape(grid, rhs);
  if (!(coeff >= 0.0)) throw PreconditionError("diffusion coefficient must be non-negative");
  const std::size_t n = rhs.size();
  Field out = rhs;
  if (coeff == 0.0) return out;

  // Interior unknowns 1..n-2; boundary values enter the first and last rows.
  const double r = coeff / (grid.dx() * grid.dx());
  const double diag = 1.0 + 2.0 * r;
  const double off = -r;
  std::vector<double> cprime(n, 0.0);
  std::vector<double> dprime(n, 0.0);

  double d1 = rhs[1] + r * rhs[0];
  if (n == 3) {
    out[1] = (rhs[1] + r * (rhs[0] + rhs[2])) / diag;
    return out;
  }
  cprime[1] = off / diag;
  dprime[1] = d1 / diag;
  for (std::size_t i = 2; i + 1 < n; ++i) {
    double di = rhs[i];
    if (i == n - 2) di += r * rhs[n - 1];
    const double denom = diag - off * cprime[i - 1];
    cprime[i] = off / denom;
    dprime[i] = (di - off * dprime[i - 1]) / denom;
  }
  out[n - 2] = dprime[n - 2];
  for (std::size_t i = n - 2; i-- > 1;) out[i] = dprime[i] - cprime[i] * out[i + 1];
  return out;
}

double dirichlet_energy(const Grid& grid, const Field& f) {
  return -inner_h(grid, laplacian(grid, f), f);
}

}  // namespace wavelab
