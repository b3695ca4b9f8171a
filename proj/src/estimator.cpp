#include "qpn/estimator.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>

#include "qpn/error.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelNodes = 16;
// Table step times b_max.
constexpr double kStepScale = 0.008;

int panel_count(double b_max, double y, double a) {
  return std::max(8, static_cast<int>(std::ceil(b_max * (y + 2.0 * a) / kPi)) + 8);
}

struct MeanError {
  double mean;
  double err;
};

// Consumes f.
MeanError mean_and_error(std::vector<double>& f) {
  const double n = static_cast<double>(f.size());
  const double mean = pairwise_sum(f) / n;
  if (f.size() < 2) return {mean, 0.0};
  for (double& v : f) v = (v - mean) * (v - mean);
  return {mean, std::sqrt(pairwise_sum(f) / (n - 1.0) / n)};
}

void require_samples(const QuadratureDataset& d) {
  if (d.size() == 0) fail(ErrorKind::Parameter, "dataset is empty");
  require(d.x.size() == d.phi.size(), "dataset x and phi columns differ in length");
}

double max_abs_x(const QuadratureDataset& d) {
  double m = 0.0;
  for (double x : d.x) m = std::max(m, std::abs(x));
  return m;
}

std::string sampled_source(const QuadratureDataset& d) {
  std::string s = "sampled(" + d.meta.state;
  if (d.meta.alpha)
    s += ";alpha=" + format_double(d.meta.alpha->real()) + "," + format_double(d.meta.alpha->imag());
  return s + ")";
}

QuasiprobGrid empty_grid(const GridSpec& grid, const FilterSpec& f, const QuadratureDataset& d) {
  QuasiprobGrid out;
  out.spec = grid;
  out.width = f.width();
  out.source = sampled_source(d);
  out.values.resize(grid.size());
  out.stat_err.resize(grid.size());
  return out;
}

}  // namespace

PatternTable::PatternTable(const FilterSpec& f, double y_max, double a) : f_(f), a_(a) {
  require(a >= 0.0, "pattern radius must be >= 0");
  require(std::isfinite(y_max) && y_max > 0.0, "pattern table range must be positive");
  const double b_max = f_.b_max();
  const int panels = panel_count(b_max, y_max, a);
  const double h = b_max / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule q = gauss_legendre(kPanelNodes, p * h, (p + 1) * h);
    for (std::size_t i = 0; i < q.size(); ++i) {
      b_.push_back(q.nodes[i]);
      v_.push_back(q.weights[i] * weight(q.nodes[i]));
    }
  }
  const double step = kStepScale / b_max;
  const auto n = static_cast<std::size_t>(std::ceil(y_max / step)) + 1;
  std::vector<double> val(n), der(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = step * static_cast<double>(i);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t k = 0; k < b_.size(); ++k) {
      const double arg = b_[k] * y;
      s0 += v_[k] * std::cos(arg);
      s1 -= v_[k] * b_[k] * std::sin(arg);
    }
    val[i] = s0;
    der[i] = s1;
  }
  table_ = UniformHermiteTable(0.0, step, std::move(val), std::move(der));
}

double PatternTable::weight(double b) const {
  double v = (2.0 / kPi) * b * std::exp(0.5 * b * b) * f_.value(b);
  if (a_ > 0.0) v *= gsl_sf_bessel_J0(2.0 * a_ * b);
  return v;
}

double PatternTable::direct(double y) const {
  y = std::abs(y);
  if (y <= table_.x_last()) {
    double s = 0.0;
    for (std::size_t k = 0; k < b_.size(); ++k) s += v_[k] * std::cos(b_[k] * y);
    return s;
  }
  const int panels = panel_count(f_.b_max(), y, a_);
  const double h = f_.b_max() / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule q = gauss_legendre(kPanelNodes, p * h, (p + 1) * h);
    for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * weight(q.nodes[i]) * std::cos(q.nodes[i] * y);
  }
  return s;
}

double PatternTable::operator()(double y) const {
  y = std::abs(y);
  if (y <= table_.x_last()) return table_(y);
  return direct(y);
}

double pattern_fn(double x, double phi, cplx beta, const FilterSpec& f) {
  const double y = x - 2.0 * (beta * std::polar(1.0, -phi)).real();
  const PatternTable t(f, std::max(1.0, std::abs(y)) * 1e-3 + 1e-3);
  return t.direct(y);
}

double phase_randomized_pattern(double x, double a, const FilterSpec& f) {
  require(a >= 0.0, "phase_randomized_pattern: a must be >= 0");
  const PatternTable t(f, 1e-3, a);
  return t.direct(x);
}

bool equally_spaced_phases(std::span<const double> phases) {
  if (phases.empty()) return false;
  std::vector<double> p(phases.begin(), phases.end());
  std::sort(p.begin(), p.end());
  const double step = kPi / static_cast<double>(p.size());
  if (p.front() >= step + 1e-9) return false;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (std::abs(p[k] - p.front() - step * static_cast<double>(k)) > 1e-9) return false;
  return true;
}

namespace {

QuasiprobGrid sample_plain(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f) {
  const PatternTable g(f, max_abs_x(d) + 2.0 * grid.max_modulus() + 1.0);
  QuasiprobGrid out = empty_grid(grid, f, d);
  std::vector<double> vals(d.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const cplx beta = grid.point(p);
    double last_phi = std::numeric_limits<double>::quiet_NaN(), shift = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.phi[i] != last_phi) {
        last_phi = d.phi[i];
        shift = 2.0 * (beta * std::polar(1.0, -last_phi)).real();
      }
      vals[i] = g(d.x[i] - shift);
    }
    const MeanError me = mean_and_error(vals);
    out.values[p] = me.mean;
    out.stat_err[p] = me.err;
  }
  return out;
}

// Step of the mode tables times b_max.
constexpr double kModeStepScale = 0.02;

QuasiprobGrid sample_interpolated(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f) {
  std::vector<double> phases = d.meta.phases;
  std::sort(phases.begin(), phases.end());
  if (!equally_spaced_phases(phases))
    fail(ErrorKind::Parameter, "phase interpolation needs equally spaced phases; use the plain estimator");
  const std::size_t K = phases.size();
  std::vector<std::vector<double>> groups(K);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto it = std::lower_bound(phases.begin(), phases.end(), d.phi[i]);
    if (it == phases.end() || *it != d.phi[i]) fail(ErrorKind::Parameter, "sample phase not in the phase list");
    groups[static_cast<std::size_t>(it - phases.begin())].push_back(d.x[i]);
  }
  for (std::size_t k = 0; k < K; ++k)
    if (groups[k].empty()) fail(ErrorKind::Parameter, "phase " + format_double(phases[k]) + " has no samples");

  const double b_max = f.b_max();
  const double y_max = max_abs_x(d) + 1.0;
  const int panels = panel_count(b_max, y_max, grid.max_modulus());
  std::vector<double> b, base;
  {
    const double h = b_max / panels;
    for (int p = 0; p < panels; ++p) {
      const QuadratureRule q = gauss_legendre(kPanelNodes, p * h, (p + 1) * h);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double bb = q.nodes[i];
        b.push_back(bb);
        base.push_back(q.weights[i] * (2.0 / kPi) * bb * std::exp(0.5 * bb * bb) * f.value(bb));
      }
    }
  }
  const auto nb = static_cast<Eigen::Index>(b.size());
  const double step = kModeStepScale / b_max;
  const auto ny = static_cast<Eigen::Index>(std::ceil(y_max / step)) + 1;
  Eigen::MatrixXd C(nb, ny), S(nb, ny);
  for (Eigen::Index j = 0; j < nb; ++j)
    for (Eigen::Index l = 0; l < ny; ++l) {
      const double arg = b[static_cast<std::size_t>(j)] * step * static_cast<double>(l);
      C(j, l) = std::cos(arg);
      S(j, l) = std::sin(arg);
    }

  // Group grid points by radius.
  std::vector<std::pair<double, std::vector<std::size_t>>> radii;
  {
    std::vector<std::pair<double, std::size_t>> rp(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) rp[p] = {std::abs(grid.point(p)), p};
    std::sort(rp.begin(), rp.end());
    for (const auto& [r, p] : rp) {
      if (radii.empty() || r - radii.back().first > 1e-12 * std::max(1.0, r)) radii.push_back({r, {}});
      radii.back().second.push_back(p);
    }
  }

  const auto M = static_cast<Eigen::Index>(K) + 1;  // modes 0..K
  QuasiprobGrid out = empty_grid(grid, f, d);
  std::vector<double> var(grid.size(), 0.0);
  std::vector<double> jn(static_cast<std::size_t>(M));
  Eigen::MatrixXd AC(2 * M, nb), AS(2 * M, nb);
  const double Kd = static_cast<double>(K);
  for (const auto& [r, points] : radii) {
    AC.setZero();
    AS.setZero();
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double bj = b[static_cast<std::size_t>(j)];
      const double z = 2.0 * r * bj;
      if (z == 0.0) {
        std::fill(jn.begin(), jn.end(), 0.0);
        jn[0] = 1.0;
      } else {
        gsl_sf_bessel_Jn_array(0, static_cast<int>(K), z, jn.data());
      }
      const double w = base[static_cast<std::size_t>(j)];
      for (Eigen::Index m = 0; m < M; ++m) {
        const double wm = w * jn[static_cast<std::size_t>(m)];
        if (m % 2 == 0) {
          AC(m, j) = wm;             // cos(b y)
          AS(M + m, j) = -wm * bj;   // d/dy
        } else {
          AS(m, j) = -wm;            // -sin(b y)
          AC(M + m, j) = -wm * bj;   // d/dy
        }
      }
    }
    const Eigen::MatrixXd R = AC * C + AS * S;  // rows: values 0..K, derivatives 0..K

    for (std::size_t k = 0; k < K; ++k) {
      const std::vector<double>& xs = groups[k];
      const auto nk = static_cast<Eigen::Index>(xs.size());
      Eigen::MatrixXd H(nk, M);
      for (Eigen::Index i = 0; i < nk; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        const double t = std::abs(x) / step;
        auto l = static_cast<Eigen::Index>(t);
        if (l >= ny - 1) l = ny - 2;
        const double u = t - static_cast<double>(l);
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1, h10 = (u3 - 2 * u2 + u) * step;
        const double h01 = -2 * u3 + 3 * u2, h11 = (u3 - u2) * step;
        for (Eigen::Index m = 0; m < M; ++m) {
          double v = h00 * R(m, l) + h10 * R(M + m, l) + h01 * R(m, l + 1) + h11 * R(M + m, l + 1);
          if (m % 2 == 1 && x < 0.0) v = -v;
          H(i, m) = v;
        }
      }
      const Eigen::VectorXd sum = H.colwise().sum().transpose();
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, M);
      G.selfadjointView<Eigen::Lower>().rankUpdate(H.transpose());
      G = G.selfadjointView<Eigen::Lower>();
      const double psi = phases[k] + 0.5 * kPi;
      const double n = static_cast<double>(nk);
      Eigen::VectorXd c(M);
      for (std::size_t p : points) {
        const double delta = std::arg(grid.point(p)) - psi;
        c(0) = 1.0;
        for (Eigen::Index m = 1; m < M; ++m) {
          const double wgt = m == M - 1 ? 1.0 : 2.0;
          c(m) = wgt * (m % 2 == 0 ? std::cos(static_cast<double>(m) * delta) : std::sin(static_cast<double>(m) * delta));
        }
        const double mean = c.dot(sum) / n;
        out.values[p] += mean / Kd;
        if (nk > 1) {
          const double ex2 = c.dot(G * c) / n;
          const double vk = std::max(0.0, ex2 - mean * mean) * n / (n - 1.0);
          var[p] += vk / n / (Kd * Kd);
        }
      }
    }
  }
  for (std::size_t p = 0; p < grid.size(); ++p) out.stat_err[p] = std::sqrt(var[p]);
  return out;
}

}  // namespace

QuasiprobGrid sample_nqd(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f, PhaseQuadrature q) {
  require_samples(d);
  grid.validate();
  return q == PhaseQuadrature::Plain ? sample_plain(d, grid, f) : sample_interpolated(d, grid, f);
}

QuasiprobGrid sample_pnqd_randomized(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f) {
  require_samples(d);
  grid.validate();
  require(grid.layout == GridSpec::Layout::Radial, "phase-randomized sampling needs a radial grid");
  const double y_max = max_abs_x(d) + 1.0;
  QuasiprobGrid out = empty_grid(grid, f, d);
  std::vector<double> vals(d.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const PatternTable g(f, y_max, std::abs(grid.point(p)));
    for (std::size_t i = 0; i < d.size(); ++i) vals[i] = g(d.x[i]);
    const MeanError me = mean_and_error(vals);
    out.values[p] = me.mean;
    out.stat_err[p] = me.err;
  }
  return out;
}

QuasiprobGrid sample_nqd_eta_removed(const QuadratureDataset& d, const GridSpec& grid, double width, double tol,
                                     bool phase_randomized, double* used_width, PhaseQuadrature q) {
  const double eta = d.meta.eta;
  if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorKind::Parse, "dataset metadata lacks a valid eta");
  const double se = std::sqrt(eta);
  const FilterSpec f = build_filter(width / se, tol);
  if (used_width) *used_width = f.width();
  GridSpec scaled = grid;
  scaled.half_width = grid.half_width * se;
  QuasiprobGrid g = phase_randomized ? sample_pnqd_randomized(d, scaled, f) : sample_nqd(d, scaled, f, q);
  g.spec = grid;
  g.width = width;
  for (double& v : g.values) v *= eta;
  for (double& v : g.stat_err) v *= eta;
  return g;
}

PnqdTable sample_pnqd(const std::vector<QuadratureDataset>& datasets, const GridSpec& grid, double width, double tol,
                      bool phase_randomized, PhaseQuadrature q) {
  require(!datasets.empty(), "sample_pnqd: no datasets");
  std::vector<std::size_t> order(datasets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
    if (!datasets[i].meta.alpha) fail(ErrorKind::Parameter, "dataset " + std::to_string(i) + " has no alpha tag");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(*datasets[a].meta.alpha) < std::abs(*datasets[b].meta.alpha);
  });
  PnqdTable t;
  t.width = width;
  t.phase_randomized = phase_randomized;
  std::map<double, FilterSpec> filters;
  for (std::size_t k : order) {
    const QuadratureDataset& d = datasets[k];
    const double amp = std::abs(*d.meta.alpha);
    if (!t.amplitudes.empty() && amp == t.amplitudes.back())
      fail(ErrorKind::Parameter, "duplicate probe amplitude " + format_double(amp));
    t.amplitudes.push_back(amp);
    t.alphas.push_back(*d.meta.alpha);
    if (d.meta.eta < 1.0) {
      t.grids.push_back(sample_nqd_eta_removed(d, grid, width, tol, phase_randomized, nullptr, q));
      continue;
    }
    auto it = filters.find(1.0);
    if (it == filters.end()) it = filters.emplace(1.0, build_filter(width, tol)).first;
    t.grids.push_back(phase_randomized ? sample_pnqd_randomized(d, grid, it->second)
                                       : sample_nqd(d, grid, it->second, q));
  }
  return t;
}

std::string write_pnqd_table(const PnqdTable& t, const std::string& dir, const std::string& stem) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir + "'");
  const std::string index = (fs::path(dir) / (stem + "_index.csv")).string();
  std::ofstream out(index, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + index + "' for writing");
  out << "# w=" << format_double(t.width) << " phase_randomized=" << (t.phase_randomized ? 1 : 0) << '\n';
  out << "# columns: alpha,path\n";
  for (std::size_t k = 0; k < t.grids.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "_%02zu.csv", k);
    const std::string rel = stem + name;
    write_grid_csv(t.grids[k], (fs::path(dir) / rel).string());
    out << format_double(t.amplitudes[k]) << ',' << rel << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write to '" + index + "' failed");
  return index;
}

PnqdTable read_pnqd_table(const std::string& index_path) {
  namespace fs = std::filesystem;
  std::ifstream in(index_path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + index_path + "'");
  const fs::path base = fs::path(index_path).parent_path();
  PnqdTable t;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = index_path + ":" + std::to_string(lineno);
    if (line[0] == '#') {
      if (line.rfind("# columns:", 0) == 0) continue;
      std::size_t pos = 1;
      while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        const auto end = std::min(line.find(' ', pos), line.size());
        const std::string tok = line.substr(pos, end - pos);
        pos = end;
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, where + ": malformed header token '" + tok + "'");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "w") t.width = parse_double(v);
        else if (k == "phase_randomized") t.phase_randomized = v == "1";
      }
      header = true;
      continue;
    }
    if (!header) fail(ErrorKind::Parse, where + ": row before index header");
    const auto c = line.find(',');
    if (c == std::string::npos) fail(ErrorKind::Parse, where + ": expected 'alpha,path'");
    double amp = 0.0;
    try {
      amp = parse_double(line.substr(0, c));
    } catch (const Error&) {
      fail(ErrorKind::Parse, where + ": malformed amplitude");
    }
    if (!t.amplitudes.empty() && !(amp > t.amplitudes.back()))
      fail(ErrorKind::Parse, where + ": amplitudes must be strictly increasing");
    fs::path p = line.substr(c + 1);
    if (p.is_relative()) p = base / p;
    QuasiprobGrid g = read_grid_csv(p.string());
    if (!t.grids.empty() && (g.spec.nx != t.grids[0].spec.nx || g.spec.ny != t.grids[0].spec.ny ||
                             g.spec.half_width != t.grids[0].spec.half_width || g.spec.layout != t.grids[0].spec.layout))
      fail(ErrorKind::Parse, where + ": grid geometry differs from the first entry");
    t.amplitudes.push_back(amp);
    t.alphas.emplace_back(amp, 0.0);
    t.grids.push_back(std::move(g));
  }
  if (t.grids.empty()) fail(ErrorKind::Parse, index_path + ": no entries");
  return t;
}

}  // namespace qpn
