#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wavelab {

/// Uniform grid on [-L, L] with an odd number of points so that x = 0 is a node.
class Grid {
 public:
  Grid(double half_width, std::size_t n);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double x(std::size_t i) const { return -half_width_ + static_cast<double>(i) * dx_; }
  std::size_t center() const { return n_ / 2; }

  bool operator==(const Grid&) const = default;

 private:
  double half_width_;
  std::size_t n_;
  double dx_;
};

/// Real function sampled on a Grid.
class Field {
 public:
  Field() = default;
  explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit Field(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool all_finite() const;

  bool operator==(const Field&) const = default;

 private:
  std::vector<double> values_;
};

Field sample(const Grid& grid, const std::function<double(double)>& fn);

/// Throws ShapeError unless the field has one value per grid node.
void check_shape(const Grid& grid, const Field& f);

/// Composite trapezoid rule over [-L, L].
double integrate(const Grid& grid, std::span<const double> values);
double integrate(const Grid& grid, const Field& f);

/// Composite trapezoid rule over [0, L] (the upper half of the grid).
double integrate_upper_half(const Grid& grid, const Field& f);

double inner_h(const Grid& grid, const Field& f, const Field& g);
double norm_h(const Grid& grid, const Field& f);

/// Second-order difference gradient: centered inside, one-sided at the ends.
Field gradient(const Grid& grid, const Field& f);

/// ||f||_V^2 = int f_x^2 + int f^2 with the difference gradient.
double norm_v(const Grid& grid, const Field& f);

/// Standard three-point second difference on interior nodes; zero rows at the
/// two boundary nodes (homogeneous Dirichlet closure).
Field laplacian(const Grid& grid, const Field& f);

/// Solves (I - coeff * laplacian) out = rhs with a tridiagonal direct solve.
/// Boundary rows are the identity, so boundary values pass through unchanged.
Field diffusion_solve(const Grid& grid, const Field& rhs, double coeff);

/// Dirichlet energy -<laplacian(f), f> with the trapezoid inner product.
double dirichlet_energy(const Grid& grid, const Field& f);

}  // namespace wavelab
