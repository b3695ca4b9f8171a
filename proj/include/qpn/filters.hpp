#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpn/numerics.hpp"

namespace qpn {

/// Tabulated radial profile of the nonclassicality filter
///
///   Omega_w(xi) = (1/N) \int d^2eta exp(-|eta|^4) exp(-|xi/w + eta|^4),
///
/// sampled on a uniform grid b in [0, b_max] and interpolated with cubic
/// Lagrange stencils. Immutable after construction.
class FilterSpec {
 public:
  static constexpr double kMaxStep = 0.005;

  double width() const { return width_; }
  double tol() const { return tol_; }
  double b_max() const { return b_max_; }
  double step() const { return table_.step(); }

  /// Interpolated Omega_w(b); zero beyond b_max.
  double value(double b) const;

  /// Tabulated nodes b_i = i * step(), i = 0 .. size-1; the last node is
  /// b_max.
  std::vector<double> nodes() const;
  std::vector<double> tabulated() const;

  friend FilterSpec build_filter(double width, double tol);

 private:
  FilterSpec() = default;
  double width_ = 0.0;
  double tol_ = 0.0;
  double b_max_ = 0.0;
  std::size_t n_nodes_ = 0;
  UniformCubicTable table_;
};

/// Unnormalized integral of the filter definition at unit width,
/// \int d^2eta exp(-|eta|^4 - |u + eta|^4), for real u >= 0.
double unit_filter_integral(double u);

FilterSpec build_filter(double width, double tol);

double filter_value(const FilterSpec& f, double b);

/// Radial 2D Fourier transform (2/pi) \int_0^inf b Omega_w(b) J0(2 r b) db,
/// i.e. the filtered quasiprobability of the vacuum at |beta| = r. Its
/// integral over the plane is Omega_w(0) = 1.
std::vector<double> filter_fourier(const FilterSpec& f, std::span<const double> r_grid);

/// Header `# w=<W> b_max=<B> tol=<T>`, then rows `b,omega` at the table nodes.
void write_filter_csv(const FilterSpec& f, const std::string& path);

}  // namespace qpn
