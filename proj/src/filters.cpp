#include "qpn/filters.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "qpn/error.hpp"

namespace qpn {

namespace {

constexpr int kRadialNodes = 160;
constexpr double kExponentCut = 40.0;  // integrand below e^-40 of its peak

}  // namespace

// With zeta = eta + u/2 and c = u/2 the exponent becomes
//   2c^4 + 2r^4 + 4c^2 r^2 + 8c^2 r^2 cos^2(theta),
// and the angular integral is 2 pi exp(-4c^2r^2) I0(4c^2r^2).
double unit_filter_integral(double u) {
  require(u >= 0.0 && std::isfinite(u), "unit_filter_integral: u must be finite and >= 0");
  const double c2 = 0.25 * u * u;
  // radius beyond which 2r^4 + 4c^2 r^2 exceeds the cut
  const double r2 = (-4.0 * c2 + std::sqrt(16.0 * c2 * c2 + 8.0 * kExponentCut)) / 4.0;
  const double radius = std::sqrt(r2);
  static thread_local QuadratureRule unit = gauss_legendre(kRadialNodes, 0.0, 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const double r = radius * unit.nodes[i];
    const double rr = r * r;
    const double z = 4.0 * c2 * rr;
    sum += unit.weights[i] * r * std::exp(-2.0 * rr * rr - z) * gsl_sf_bessel_I0_scaled(z);
  }
  return 2.0 * std::numbers::pi * radius * sum * std::exp(-2.0 * c2 * c2);
}

FilterSpec build_filter(double width, double tol) {
  if (!(width > 0.0) || !std::isfinite(width))
    fail(ErrorKind::Parameter, "build_filter: width must be positive");
  if (!(tol > 0.0) || tol > 1e-3)
    fail(ErrorKind::Parameter, "build_filter: tol must lie in (0, 1e-3]");

  const double norm = unit_filter_integral(0.0);
  const double h = FilterSpec::kMaxStep;

  std::vector<double> values;
  values.push_back(1.0);
  double peak = 1.0;
  bool past_peak = false;
  std::size_t last = 0;
  for (std::size_t i = 1;; ++i) {
    const double b = h * static_cast<double>(i);
    const double v = unit_filter_integral(b / width) / norm;
    values.push_back(v);
    const double weighted = std::exp(0.5 * b * b) * v;
    if (weighted >= peak) {
      peak = weighted;
    } else {
      past_peak = true;
    }
    if (past_peak && weighted < tol) {
      last = i;
      break;
    }
    if (i > 1000000) fail(ErrorKind::Contract, "build_filter: tail never dropped below tol");
  }
  // three guard nodes keep the interpolation stencil inside the table
  for (std::size_t k = 1; k <= 3; ++k) {
    const double b = h * static_cast<double>(last + k);
    values.push_back(unit_filter_integral(b / width) / norm);
  }

  FilterSpec f;
  f.width_ = width;
  f.tol_ = tol;
  f.b_max_ = h * static_cast<double>(last);
  f.n_nodes_ = last + 1;
  f.table_ = UniformCubicTable(0.0, h, std::move(values));
  return f;
}

double FilterSpec::value(double b) const {
  if (!(b >= 0.0)) fail(ErrorKind::Parameter, "filter_value: b must be >= 0");
  if (b > b_max_) return 0.0;
  return table_(b);
}

std::vector<double> FilterSpec::nodes() const {
  std::vector<double> out(n_nodes_);
  for (std::size_t i = 0; i < n_nodes_; ++i) out[i] = step() * static_cast<double>(i);
  return out;
}

std::vector<double> FilterSpec::tabulated() const {
  auto v = table_.values();
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n_nodes_)};
}

double filter_value(const FilterSpec& f, double b) { return f.value(b); }

std::vector<double> filter_fourier(const FilterSpec& f, std::span<const double> r_grid) {
  const double bmax = f.b_max();
  const auto unit = gauss_legendre(32, 0.0, 1.0);
  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r >= 0.0)) fail(ErrorKind::Parameter, "filter_fourier: radii must be >= 0");
    // ~ one 32-point panel per half oscillation of J0(2 r b)
    const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * r * bmax / std::numbers::pi)) + 1);
    const double width = bmax / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = width * p;
      for (std::size_t i = 0; i < unit.size(); ++i) {
        const double b = a + width * unit.nodes[i];
        sum += width * unit.weights[i] * b * f.value(b) * std::cyl_bessel_j(0.0, 2.0 * r * b);
      }
    }
    out.push_back(2.0 / std::numbers::pi * sum);
  }
  return out;
}

void write_filter_csv(const FilterSpec& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "# w=" << format_double(f.width()) << " b_max=" << format_double(f.b_max()) << " tol="
      << format_double(f.tol()) << '\n';
  const auto b = f.nodes();
  const auto v = f.tabulated();
  for (std::size_t i = 0; i < b.size(); ++i) out << format_double(b[i]) << ',' << format_double(v[i]) << '\n';
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

}  // namespace qpn
