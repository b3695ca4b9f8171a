#pragma once

#include <span>
#include <string>
#include <vector>

namespace qpn {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped onto [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Pairwise (cascade) summation; result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Values on a uniform grid x0 + i*h, evaluated by 4-point Lagrange cubic
/// interpolation. Stencils are shifted inward at the ends of the table.
class UniformCubicTable {
 public:
  UniformCubicTable() = default;
  UniformCubicTable(double x0, double step, std::vector<double> values);

  double operator()(double x) const;
  double x0() const { return x0_; }
  double step() const { return h_; }
  double x_last() const { return x0_ + h_ * static_cast<double>(v_.size() - 1); }
  std::span<const double> values() const { return v_; }

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> v_;
};

/// Values and first derivatives on a uniform grid, cubic Hermite between
/// nodes.
class UniformHermiteTable {
 public:
  UniformHermiteTable() = default;
  UniformHermiteTable(double x0, double step, std::vector<double> values,
                      std::vector<double> derivs);

  double operator()(double x) const;
  bool contains(double x) const { return x >= x0_ && x <= x_last_; }
  double x_last() const { return x_last_; }

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  double x_last_ = 0.0;
  std::vector<double> v_;
  std::vector<double> d_;
};

/// Natural cubic spline through (x_i, y_i), x strictly increasing, n >= 3.
class NaturalSpline {
 public:
  NaturalSpline(std::span<const double> x, std::span<const double> y);
  ~NaturalSpline();
  NaturalSpline(const NaturalSpline&) = delete;
  NaturalSpline& operator=(const NaturalSpline&) = delete;

  double operator()(double x) const;
  double integral(double a, double b) const;

 private:
  std::vector<double> x_, y_;
  void* spline_ = nullptr;
  void* accel_ = nullptr;
};

double trapezoid(std::span<const double> x, std::span<const double> y);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
/// Fixed number of significant digits (%.*g style).
std::string format_double_digits(double v, int digits);
double parse_double(const std::string& text);

}  // namespace qpn
