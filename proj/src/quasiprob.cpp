#include "qpn/quasiprob.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qpn/error.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelNodes = 16;
constexpr std::size_t kBlock = 2048;
// Imaginary parts of the Fourier integral are discarded below this level.
constexpr double kImagTolerance = 1e-8;
// Minimum below which a direct (noise-free) grid counts as negative.
constexpr double kNumericalZero = 1e-8;

struct PolarRule {
  std::vector<double> b;
  std::vector<double> wb;  // GL weight * b * Omega(b)
  int angles = 0;
};

PolarRule polar_rule(const FilterSpec& f, double max_beta, double extent) {
  const double k = 2.0 * (max_beta + extent);
  const double phase = f.b_max() * k;
  const int panels = std::max(4, static_cast<int>(std::ceil(phase / kPi)) + 2);
  PolarRule r;
  const double h = f.b_max() / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule q = gauss_legendre(kPanelNodes, p * h, (p + 1) * h);
    for (std::size_t i = 0; i < q.size(); ++i) {
      r.b.push_back(q.nodes[i]);
      r.wb.push_back(q.weights[i] * q.nodes[i] * f.value(q.nodes[i]));
    }
  }
  r.angles = std::max(32, 4 * static_cast<int>(std::ceil((phase + 30.0) / 4.0)));
  return r;
}

double state_extent(const StateModel& s) { return std::sqrt(mean_photon_number(s)) + 2.0; }

void finish_imag(QuasiprobGrid& out, double residue) {
  out.imag_residue = residue;
  if (!(residue < kImagTolerance))
    fail(ErrorKind::Contract, "imaginary residue " + format_double(residue) + " of the Fourier integral exceeds " +
                                  format_double(kImagTolerance));
}

}  // namespace

GridSpec GridSpec::square(double half_width, int n) {
  GridSpec g;
  g.layout = Layout::Square;
  g.half_width = half_width;
  g.nx = g.ny = n;
  g.validate();
  return g;
}

GridSpec GridSpec::radial(double r_max, int n) {
  GridSpec g;
  g.layout = Layout::Radial;
  g.half_width = r_max;
  g.nx = n;
  g.ny = 1;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  require(std::isfinite(half_width) && half_width >= 0.0, "grid half width must be >= 0");
  require(nx >= 1 && ny >= 1, "grid needs at least one point per axis");
  require(static_cast<double>(nx) * ny <= 4.0e6, "grid has too many points");
  if (layout == Layout::Radial) require(ny == 1, "radial grids have ny = 1");
}

double GridSpec::spacing() const {
  if (layout == Layout::Radial) return nx > 1 ? half_width / (nx - 1) : 0.0;
  double d = 0.0;
  if (nx > 1) d = std::max(d, 2.0 * half_width / (nx - 1));
  if (ny > 1) d = std::max(d, 2.0 * half_width / (ny - 1));
  return d;
}

cplx GridSpec::point(std::size_t i) const {
  const std::size_t ix = i % static_cast<std::size_t>(nx);
  const std::size_t iy = i / static_cast<std::size_t>(nx);
  if (layout == Layout::Radial) return {nx > 1 ? half_width * static_cast<double>(ix) / (nx - 1) : 0.0, 0.0};
  auto coord = [&](std::size_t k, int n) {
    return n > 1 ? -half_width + 2.0 * half_width * static_cast<double>(k) / (n - 1) : 0.0;
  };
  return {coord(ix, nx), coord(iy, ny)};
}

double GridSpec::max_modulus() const {
  if (layout == Layout::Radial) return half_width;
  return std::hypot(nx > 1 ? half_width : 0.0, ny > 1 ? half_width : 0.0);
}

double QuasiprobGrid::mass() const {
  if (spec.layout == GridSpec::Layout::Radial) {
    std::vector<double> r(values.size()), y(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      r[i] = spec.point(i).real();
      y[i] = 2.0 * kPi * r[i] * values[i];
    }
    return values.size() > 1 ? trapezoid(r, y) : 0.0;
  }
  const double dx = spec.nx > 1 ? 2.0 * spec.half_width / (spec.nx - 1) : 1.0;
  const double dy = spec.ny > 1 ? 2.0 * spec.half_width / (spec.ny - 1) : 1.0;
  return pairwise_sum(values) * dx * dy;
}

void check_resolution(const GridSpec& g, const FilterSpec& f) {
  const double limit = kPi / (2.0 * f.b_max());
  if (g.spacing() > limit)
    fail(ErrorKind::Resolution, "grid spacing " + format_double(g.spacing()) + " exceeds pi/(2 b_max) = " +
                                    format_double(limit) + " for w=" + format_double(f.width()));
}

QuasiprobGrid nqd_from_char_fn(const std::function<cplx(cplx)>& phi, double extent, const FilterSpec& f,
                               const GridSpec& grid, const std::string& source) {
  grid.validate();
  check_resolution(grid, f);
  if (grid.layout == GridSpec::Layout::Radial) return nqd_angular_average(phi, extent, f, grid, source);

  const PolarRule rule = polar_rule(f, grid.max_modulus(), extent);
  const int m = rule.angles;
  const double scale = 2.0 * kPi / m / (kPi * kPi);
  std::vector<double> xr, xi;
  std::vector<cplx> c;
  xr.reserve(rule.b.size() * m);
  xi.reserve(rule.b.size() * m);
  c.reserve(rule.b.size() * m);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * kPi * j / m;
    const double ct = std::cos(th), st = std::sin(th);
    for (std::size_t k = 0; k < rule.b.size(); ++k) {
      const cplx z(rule.b[k] * ct, rule.b[k] * st);
      xr.push_back(z.real());
      xi.push_back(z.imag());
      c.push_back(rule.wb[k] * scale * phi(z));
    }
  }

  std::vector<double> xs(static_cast<std::size_t>(grid.nx)), ys(static_cast<std::size_t>(grid.ny));
  for (int i = 0; i < grid.nx; ++i) xs[static_cast<std::size_t>(i)] = grid.point(static_cast<std::size_t>(i)).real();
  for (int i = 0; i < grid.ny; ++i)
    ys[static_cast<std::size_t>(i)] = grid.point(static_cast<std::size_t>(i) * grid.nx).imag();

  // beta conj(xi) - conj(beta) xi = 2i (y xr - x xi)
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(grid.nx, grid.ny);
  const std::size_t total = c.size();
  for (std::size_t k0 = 0; k0 < total; k0 += kBlock) {
    const std::size_t kb = std::min(kBlock, total - k0);
    Eigen::MatrixXcd A(grid.nx, static_cast<Eigen::Index>(kb));
    Eigen::MatrixXcd B(static_cast<Eigen::Index>(kb), grid.ny);
    for (std::size_t k = 0; k < kb; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      for (int i = 0; i < grid.nx; ++i)
        A(i, kk) = c[k0 + k] * std::polar(1.0, -2.0 * xs[static_cast<std::size_t>(i)] * xi[k0 + k]);
      for (int j = 0; j < grid.ny; ++j) B(kk, j) = std::polar(1.0, 2.0 * ys[static_cast<std::size_t>(j)] * xr[k0 + k]);
    }
    acc.noalias() += A * B;
  }

  QuasiprobGrid out;
  out.spec = grid;
  out.width = f.width();
  out.source = source;
  out.values.resize(grid.size());
  double residue = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const cplx v = acc(i, j);
      out.values[static_cast<std::size_t>(j) * grid.nx + i] = v.real();
      residue = std::max(residue, std::abs(v.imag()));
    }
  finish_imag(out, residue);
  return out;
}

QuasiprobGrid nqd_angular_average(const std::function<cplx(cplx)>& phi, double extent, const FilterSpec& f,
                                  const GridSpec& grid, const std::string& source) {
  grid.validate();
  check_resolution(grid, f);
  const PolarRule rule = polar_rule(f, grid.max_modulus(), extent);
  const int m = rule.angles;
  std::vector<cplx> avg(rule.b.size());
  for (std::size_t k = 0; k < rule.b.size(); ++k) {
    cplx s = 0.0;
    for (int j = 0; j < m; ++j) s += phi(std::polar(rule.b[k], 2.0 * kPi * j / m));
    avg[k] = s / static_cast<double>(m);
  }
  QuasiprobGrid out;
  out.spec = grid;
  out.width = f.width();
  out.source = source;
  out.values.resize(grid.size());
  double residue = 0.0;
  std::vector<double> re(rule.b.size()), im(rule.b.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::abs(grid.point(i));
    for (std::size_t k = 0; k < rule.b.size(); ++k) {
      const double kern = rule.wb[k] * gsl_sf_bessel_J0(2.0 * r * rule.b[k]) * (2.0 / kPi);
      re[k] = kern * avg[k].real();
      im[k] = kern * avg[k].imag();
    }
    out.values[i] = pairwise_sum(re);
    residue = std::max(residue, std::abs(pairwise_sum(im)));
  }
  finish_imag(out, residue);
  return out;
}

QuasiprobGrid nqd_direct(const StateModel& s, const FilterSpec& f, const GridSpec& grid) {
  const CharFnExpr& cf = s.char_fn();
  auto phi = [&cf](cplx z) { return cf(z); };
  if (is_phase_insensitive(s)) return nqd_angular_average(phi, state_extent(s), f, grid, s.describe());
  return nqd_from_char_fn(phi, state_extent(s), f, grid, s.describe());
}

QuasiprobGrid pnqd_direct(const ProcessModel& p, cplx alpha, const FilterSpec& f, const GridSpec& grid) {
  const ConditionalOutput out = apply_to_coherent(p, alpha);
  QuasiprobGrid g = nqd_direct(out.state, f, grid);
  g.source = "pnqd(" + p.describe() + ";re=" + format_double(alpha.real()) + ",im=" + format_double(alpha.imag()) + ")";
  return g;
}

QuasiprobGrid pnqd_phase_randomized(const ProcessModel& p, double a, const FilterSpec& f, const GridSpec& grid) {
  require(a >= 0.0, "phase-randomized PNQD needs amplitude a >= 0");
  require(grid.layout == GridSpec::Layout::Radial, "phase-randomized PNQD needs a radial grid");
  const ConditionalOutput out = apply_to_coherent(p, cplx(a, 0.0));
  const CharFnExpr& cf = out.state.char_fn();
  QuasiprobGrid g = nqd_angular_average([&cf](cplx z) { return cf(z); }, state_extent(out.state), f, grid, "");
  g.source = "pnqd_randomized(" + p.describe() + ";a=" + format_double(a) + ")";
  return g;
}

NegativityReport negativity_scan(const QuasiprobGrid& g, double threshold) {
  require(!g.values.empty(), "negativity scan of an empty grid");
  const auto it = std::min_element(g.values.begin(), g.values.end());
  const auto i = static_cast<std::size_t>(it - g.values.begin());
  NegativityReport r;
  r.min_value = *it;
  r.argmin = g.spec.point(i);
  if (!g.stat_err.empty()) {
    const double se = g.stat_err[i];
    const double neg = std::max(0.0, -r.min_value);
    r.significance = neg == 0.0 ? 0.0 : (se > 0.0 ? neg / se : std::numeric_limits<double>::infinity());
    r.nonclassical = *r.significance > threshold;
  } else {
    r.nonclassical = r.min_value < -kNumericalZero;
  }
  return r;
}

void write_grid_csv(const QuasiprobGrid& g, std::ostream& out) {
  out << "# source=" << g.source << " w=" << format_double(g.width) << " nx=" << g.spec.nx << " ny=" << g.spec.ny
      << " half_width=" << format_double(g.spec.half_width);
  if (g.spec.layout == GridSpec::Layout::Radial) out << " layout=radial";
  out << '\n';
  const bool st = !g.stat_err.empty();
  const bool sy = !g.sys_err.empty();
  out << "# columns: re_beta,im_beta,value" << (st ? ",stat_err" : "") << (sy ? ",sys_err" : "") << '\n';
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const cplx b = g.spec.point(i);
    out << format_double(b.real()) << ',' << format_double(b.imag()) << ',' << format_double(g.values[i]);
    if (st) out << ',' << format_double(g.stat_err[i]);
    if (sy) out << ',' << format_double(g.sys_err[i]);
    out << '\n';
  }
}

void write_grid_csv(const QuasiprobGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_grid_csv(g, out);
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

QuasiprobGrid read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  QuasiprobGrid g;
  std::string line;
  int lineno = 0;
  bool have_header = false, have_cols = false;
  bool st = false, sy = false;
  auto where = [&] { return path + ":" + std::to_string(lineno); };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# columns:", 0) == 0) {
      const std::string cols = line.substr(10);
      st = cols.find("stat_err") != std::string::npos;
      sy = cols.find("sys_err") != std::string::npos;
      have_cols = true;
      continue;
    }
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, where() + ": malformed header token '" + tok + "'");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        try {
          if (k == "source") g.source = v;
          else if (k == "w") g.width = parse_double(v);
          else if (k == "nx") g.spec.nx = std::stoi(v);
          else if (k == "ny") g.spec.ny = std::stoi(v);
          else if (k == "half_width") g.spec.half_width = parse_double(v);
          else if (k == "layout") g.spec.layout = v == "radial" ? GridSpec::Layout::Radial : GridSpec::Layout::Square;
        } catch (const std::logic_error&) {
          fail(ErrorKind::Parse, where() + ": bad value in '" + tok + "'");
        }
      }
      have_header = true;
      continue;
    }
    if (!have_header || !have_cols) fail(ErrorKind::Parse, where() + ": data row before grid header");
    std::vector<double> f;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      try {
        f.push_back(parse_double(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
      } catch (const Error&) {
        fail(ErrorKind::Parse, where() + ": malformed number");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    const std::size_t want = 3 + (st ? 1 : 0) + (sy ? 1 : 0);
    if (f.size() != want) fail(ErrorKind::Parse, where() + ": expected " + std::to_string(want) + " columns");
    g.values.push_back(f[2]);
    if (st) g.stat_err.push_back(f[3]);
    if (sy) g.sys_err.push_back(f[st ? 4 : 3]);
  }
  if (!have_header) fail(ErrorKind::Parse, path + ": missing grid header");
  g.spec.validate();
  if (g.values.size() != g.spec.size())
    fail(ErrorKind::Parse, path + ": row count " + std::to_string(g.values.size()) + " does not match nx*ny");
  return g;
}

}  // namespace qpn
