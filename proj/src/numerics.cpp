#include "qpn/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "qpn/error.hpp"

namespace qpn {

QuadratureRule gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // Newton iteration on P_n from the Tricomi initial guess; nodes come in
  // symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // refresh the derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

namespace {
double pairwise(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise(values.data(), values.size());
}

UniformCubicTable::UniformCubicTable(double x0, double step, std::vector<double> values)
    : x0_(x0), h_(step), v_(std::move(values)) {
  require(v_.size() >= 4, "cubic table needs at least 4 nodes");
  require(step > 0.0, "cubic table step must be positive");
}

double UniformCubicTable::operator()(double x) const {
  const double t = (x - x0_) / h_;
  const auto last = static_cast<std::ptrdiff_t>(v_.size()) - 1;
  auto i = static_cast<std::ptrdiff_t>(std::floor(t));
  // stencil i-1 .. i+2
  std::ptrdiff_t s = std::clamp<std::ptrdiff_t>(i - 1, 0, last - 3);
  const double u = t - static_cast<double>(s);  // position relative to node s
  const double* p = v_.data() + s;
  const double l0 = -(u - 1) * (u - 2) * (u - 3) / 6.0;
  const double l1 = u * (u - 2) * (u - 3) / 2.0;
  const double l2 = -u * (u - 1) * (u - 3) / 2.0;
  const double l3 = u * (u - 1) * (u - 2) / 6.0;
  return l0 * p[0] + l1 * p[1] + l2 * p[2] + l3 * p[3];
}

UniformHermiteTable::UniformHermiteTable(double x0, double step, std::vector<double> values,
                                         std::vector<double> derivs)
    : x0_(x0), h_(step), v_(std::move(values)), d_(std::move(derivs)) {
  require(v_.size() >= 2 && v_.size() == d_.size(), "hermite table: size mismatch");
  x_last_ = x0_ + h_ * static_cast<double>(v_.size() - 1);
}

double UniformHermiteTable::operator()(double x) const {
  const double t = (x - x0_) / h_;
  auto i = static_cast<std::size_t>(t);
  if (i >= v_.size() - 1) i = v_.size() - 2;
  const double u = t - static_cast<double>(i);
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  return h00 * v_[i] + h10 * h_ * d_[i] + h01 * v_[i + 1] + h11 * h_ * d_[i + 1];
}

NaturalSpline::NaturalSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  require(x_.size() == y_.size() && x_.size() >= 3, "spline needs >= 3 matching points");
  for (std::size_t i = 1; i < x_.size(); ++i)
    require(x_[i] > x_[i - 1], "spline abscissae must be strictly increasing");
  gsl_set_error_handler_off();
  auto* s = gsl_spline_alloc(gsl_interp_cspline, x_.size());
  gsl_spline_init(s, x_.data(), y_.data(), x_.size());
  spline_ = s;
  accel_ = gsl_interp_accel_alloc();
}

NaturalSpline::~NaturalSpline() {
  gsl_spline_free(static_cast<gsl_spline*>(spline_));
  gsl_interp_accel_free(static_cast<gsl_interp_accel*>(accel_));
}

double NaturalSpline::operator()(double x) const {
  return gsl_spline_eval(static_cast<gsl_spline*>(spline_), x,
                         static_cast<gsl_interp_accel*>(accel_));
}

double NaturalSpline::integral(double a, double b) const {
  return gsl_spline_eval_integ(static_cast<gsl_spline*>(spline_), a, b,
                               static_cast<gsl_interp_accel*>(accel_));
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(ErrorKind::Contract, "format_double: conversion failed");
  return std::string(buf, end);
}

std::string format_double_digits(double v, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  if (ec != std::errc{}) fail(ErrorKind::Contract, "format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b < e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e || b == e)
    fail(ErrorKind::Parse, "not a number: '" + text + "'");
  return v;
}

}  // namespace qpn
