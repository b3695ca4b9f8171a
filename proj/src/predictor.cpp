#include "qpn/predictor.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qpn/error.hpp"
#include "qpn/fock.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::map<std::string, double> key_values(const std::string& text, const std::string& context) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::Parse, "expected key=value in '" + context + "'");
    if (!out.emplace(item.substr(0, eq), parse_double(item.substr(eq + 1))).second)
      fail(ErrorKind::Parse, "duplicate key in '" + context + "'");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double get(const std::map<std::string, double>& m, const std::string& k, const std::string& context, double fallback,
           bool required) {
  const auto it = m.find(k);
  if (it == m.end()) {
    if (required) fail(ErrorKind::Parse, "missing '" + k + "' in '" + context + "'");
    return fallback;
  }
  return it->second;
}

void only_keys(const std::map<std::string, double>& m, std::initializer_list<const char*> keys,
               const std::string& context) {
  for (const auto& [k, v] : m)
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end())
      fail(ErrorKind::Parse, "unknown key '" + k + "' in '" + context + "'");
}

double thermal_density(double nbar, double a) { return std::exp(-a * a / nbar) / (kPi * nbar); }

// 2 pi \int_0^inf a P_in(a) w(a) da
double thermal_normalization(double nbar, const std::function<double(double)>& w) {
  struct Ctx {
    double nbar;
    const std::function<double(double)>* w;
  } ctx{nbar, &w};
  gsl_function fn;
  fn.function = [](double a, void* p) {
    const auto* c = static_cast<Ctx*>(p);
    return 2.0 * kPi * a * thermal_density(c->nbar, a) * (*c->w)(a);
  };
  fn.params = &ctx;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  double result = 0.0, err = 0.0;
  const int status = gsl_integration_qagiu(&fn, 0.0, 1e-13, 1e-11, 1000, ws, &result, &err);
  gsl_integration_workspace_free(ws);
  if (status != 0) fail(ErrorKind::Contract, "normalization integral of the input did not converge");
  return result;
}

QuasiprobGrid blank_like(const PnqdTable& t, const std::string& source) {
  QuasiprobGrid g;
  g.spec = t.grids.front().spec;
  g.width = t.width;
  g.source = source;
  g.values.assign(g.spec.size(), 0.0);
  g.stat_err.assign(g.spec.size(), 0.0);
  g.sys_err.assign(g.spec.size(), 0.0);
  return g;
}

double stat_at(const QuasiprobGrid& g, std::size_t p) { return g.stat_err.empty() ? 0.0 : g.stat_err[p]; }

void check_table(const PnqdTable& t) {
  require(!t.grids.empty() && t.grids.size() == t.amplitudes.size(), "PNQD table is empty or inconsistent");
  for (std::size_t j = 1; j < t.amplitudes.size(); ++j)
    require(t.amplitudes[j] > t.amplitudes[j - 1], "PNQD table amplitudes must be strictly increasing");
  for (const auto& g : t.grids)
    require(g.spec.nx == t.grids[0].spec.nx && g.spec.ny == t.grids[0].spec.ny &&
                g.spec.half_width == t.grids[0].spec.half_width && g.values.size() == t.grids[0].values.size(),
            "PNQD table grids differ in geometry");
}

// Values of the table at amplitude |alpha|, interpolated between nodes for
// phase-randomized tables.
struct Column {
  std::vector<double> value, stat;
};

Column column_at(const PnqdTable& t, cplx alpha) {
  const double a = std::abs(alpha);
  const std::size_t np = t.grids[0].values.size();
  const auto it = std::find(t.amplitudes.begin(), t.amplitudes.end(), a);
  if (it != t.amplitudes.end()) {
    const std::size_t j = static_cast<std::size_t>(it - t.amplitudes.begin());
    if (!t.phase_randomized && t.alphas[j] != alpha)
      fail(ErrorKind::Parameter, "phase-sensitive table has no entry at the requested complex amplitude");
    Column c{t.grids[j].values, std::vector<double>(np)};
    for (std::size_t p = 0; p < np; ++p) c.stat[p] = stat_at(t.grids[j], p);
    return c;
  }
  if (!t.phase_randomized)
    fail(ErrorKind::Parameter, "phase-sensitive tables are only evaluated at their own amplitudes");
  if (a < t.amplitudes.front() || a > t.amplitudes.back())
    fail(ErrorKind::Coverage, "amplitude " + format_double(a) + " lies outside the table range [" +
                                  format_double(t.amplitudes.front()) + ", " + format_double(t.amplitudes.back()) + "]");
  if (t.amplitudes.size() < 3) fail(ErrorKind::Parameter, "interpolating a PNQD table needs >= 3 amplitudes");
  const auto hi = static_cast<std::size_t>(std::upper_bound(t.amplitudes.begin(), t.amplitudes.end(), a) -
                                           t.amplitudes.begin());
  const double u = (a - t.amplitudes[hi - 1]) / (t.amplitudes[hi] - t.amplitudes[hi - 1]);
  Column c{std::vector<double>(np), std::vector<double>(np)};
  std::vector<double> y(t.amplitudes.size());
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = t.grids[j].values[p];
    const NaturalSpline s(t.amplitudes, y);
    c.value[p] = s(a);
    c.stat[p] = (1.0 - u) * stat_at(t.grids[hi - 1], p) + u * stat_at(t.grids[hi], p);
  }
  return c;
}

QuasiprobGrid predict_thermal(const PnqdTable& t, double nbar, const std::function<double(double)>& w,
                              const std::string& source) {
  if (!t.phase_randomized)
    fail(ErrorKind::Parameter, "a phase-insensitive input needs a phase-randomized PNQD table");
  const auto& a = t.amplitudes;
  if (a.size() < 3) fail(ErrorKind::Parameter, "thermal prediction needs >= 3 table amplitudes");
  const double inner = 1.0 - std::exp(-a.front() * a.front() / nbar);
  const double outer = std::exp(-a.back() * a.back() / nbar);
  if (inner + outer >= 1.0 - kCoverageMass)
    fail(ErrorKind::Coverage, "table amplitudes [" + format_double(a.front()) + ", " + format_double(a.back()) +
                                  "] miss input mass " + format_double(inner + outer) + " (limit " +
                                  format_double_digits(1.0 - kCoverageMass, 6) + ")");
  const double norm = thermal_normalization(nbar, w);
  if (!(norm > 0.0)) fail(ErrorKind::ZeroWeight, "input has zero process weight");

  const std::size_t n = a.size();
  std::vector<double> factor(n), tw(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) factor[j] = a[j] * thermal_density(nbar, a[j]) * w(a[j]);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = 0.5 * (a[j + 1] - a[j]);
    tw[j] += h;
    tw[j + 1] += h;
  }
  QuasiprobGrid g = blank_like(t, source);
  const double scale = 2.0 * kPi / norm;
  std::vector<double> y(n), terms(n), var(n);
  for (std::size_t p = 0; p < g.values.size(); ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = factor[j] * t.grids[j].values[p];
      terms[j] = tw[j] * y[j];
      const double s = tw[j] * factor[j] * stat_at(t.grids[j], p);
      var[j] = s * s;
    }
    const double trap = pairwise_sum(terms);
    const NaturalSpline spline(a, y);
    const double spl = spline.integral(a.front(), a.back());
    g.values[p] = scale * trap;
    g.stat_err[p] = scale * std::sqrt(pairwise_sum(var));
    g.sys_err[p] = scale * std::abs(trap - spl);
  }
  return g;
}

QuasiprobGrid predict_points(const PnqdTable& t, const std::vector<std::pair<cplx, double>>& comps,
                             const std::function<double(double)>& w, const std::string& source) {
  QuasiprobGrid g = blank_like(t, source);
  double norm = 0.0;
  std::vector<double> var(g.values.size(), 0.0);
  for (const auto& [alpha, p] : comps) {
    if (p == 0.0) continue;
    const double c = p * w(std::abs(alpha));
    norm += c;
    const Column col = column_at(t, alpha);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      g.values[i] += c * col.value[i];
      var[i] += c * c * col.stat[i] * col.stat[i];
    }
  }
  if (!(norm > 0.0)) fail(ErrorKind::ZeroWeight, "input has zero process weight");
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    g.values[i] /= norm;
    g.stat_err[i] = std::sqrt(var[i]) / norm;
  }
  return g;
}

}  // namespace

InputPSpec InputPSpec::thermal(double nbar) {
  require(std::isfinite(nbar) && nbar >= 0.0, "thermal input needs nbar >= 0");
  return InputPSpec(input::ThermalRadial{nbar});
}

InputPSpec InputPSpec::coherent(cplx alpha) {
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()), "coherent input amplitude must be finite");
  return InputPSpec(input::CoherentDelta{alpha});
}

InputPSpec InputPSpec::mixture(std::vector<std::pair<cplx, double>> components) {
  require(!components.empty(), "mixture input needs at least one component");
  double total = 0.0;
  for (const auto& [a, p] : components) {
    require(std::isfinite(p) && p >= 0.0, "mixture weights must be >= 0");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to 1");
  return InputPSpec(input::DiscreteMixture{std::move(components)});
}

std::string InputPSpec::describe() const {
  return std::visit(overloaded{
                        [](const input::ThermalRadial& t) { return "thermal:nbar=" + format_double(t.nbar); },
                        [](const input::CoherentDelta& c) {
                          return "coherent:re=" + format_double(c.alpha.real()) + ",im=" + format_double(c.alpha.imag());
                        },
                        [](const input::DiscreteMixture& m) {
                          std::string s = "mixture(";
                          for (std::size_t i = 0; i < m.components.size(); ++i) {
                            const auto& [a, p] = m.components[i];
                            s += (i ? ";" : "") + std::string("p=") + format_double(p) + ",re=" + format_double(a.real()) +
                                 ",im=" + format_double(a.imag());
                          }
                          return s + ")";
                        },
                    },
                    v_);
}

double InputPSpec::mean_photon_number() const {
  return std::visit(overloaded{
                        [](const input::ThermalRadial& t) { return t.nbar; },
                        [](const input::CoherentDelta& c) { return std::norm(c.alpha); },
                        [](const input::DiscreteMixture& m) {
                          double n = 0.0;
                          for (const auto& [a, p] : m.components) n += p * std::norm(a);
                          return n;
                        },
                    },
                    v_);
}

InputPSpec parse_input(const std::string& d) {
  if (d.rfind("thermal:", 0) == 0) {
    const auto m = key_values(d.substr(8), d);
    only_keys(m, {"nbar"}, d);
    return InputPSpec::thermal(get(m, "nbar", d, 0.0, true));
  }
  if (d.rfind("coherent:", 0) == 0 || d == "vacuum" || d == "coherent") {
    const auto colon = d.find(':');
    const auto m = colon == std::string::npos ? std::map<std::string, double>{} : key_values(d.substr(colon + 1), d);
    only_keys(m, {"re", "im"}, d);
    return InputPSpec::coherent({get(m, "re", d, 0.0, false), get(m, "im", d, 0.0, false)});
  }
  if (d.rfind("mixture(", 0) == 0 && d.back() == ')') {
    const std::string body = d.substr(8, d.size() - 9);
    std::vector<std::pair<cplx, double>> comps;
    std::size_t pos = 0;
    while (true) {
      const auto semi = body.find(';', pos);
      const auto m = key_values(body.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos), d);
      only_keys(m, {"p", "re", "im"}, d);
      comps.emplace_back(cplx(get(m, "re", d, 0.0, false), get(m, "im", d, 0.0, false)), get(m, "p", d, 0.0, true));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    return InputPSpec::mixture(std::move(comps));
  }
  fail(ErrorKind::Parse, "unknown input descriptor '" + d + "'");
}

QuasiprobGrid predict_output_nqd(const PnqdTable& table, const InputPSpec& in,
                                 const std::function<double(double)>& process_weight) {
  check_table(table);
  const std::string source = "predict(" + in.describe() + ")";
  return std::visit(overloaded{
                        [&](const input::ThermalRadial& t) {
                          if (t.nbar == 0.0)
                            return predict_points(table, {{cplx{}, 1.0}}, process_weight, source);
                          return predict_thermal(table, t.nbar, process_weight, source);
                        },
                        [&](const input::CoherentDelta& c) {
                          return predict_points(table, {{c.alpha, 1.0}}, process_weight, source);
                        },
                        [&](const input::DiscreteMixture& m) {
                          return predict_points(table, m.components, process_weight, source);
                        },
                    },
                    in.variant());
}

QuasiprobGrid parseval_output_nqd(const ProcessModel& p, const StateModel& in, const FilterSpec& f,
                                  const GridSpec& grid) {
  const std::string source = "parseval(" + p.describe() + ";" + in.describe() + ")";
  QuasiprobGrid g = std::visit(
      overloaded{
          [&](const process::PhotonAddition&) { return nqd_direct(StateModel::photon_added(in), f, grid); },
          [&](const process::PhotonSubtraction&) { return nqd_direct(StateModel::photon_subtracted(in), f, grid); },
          [&](const process::ThermalDecoherence& d) {
            return nqd_direct(StateModel::decohered(in, d.nbar, d.gt), f, grid);
          },
          [&](const process::KerrCat&) {
            const FockDensity rho = apply_kerr(fock_density_adaptive(in));
            const double extent = std::sqrt(mean_photon_number(in)) + 2.0;
            return nqd_from_char_fn([&rho](cplx z) { return fock_char_fn(rho, z); }, extent, f, grid, source);
          },
      },
      p.variant());
  g.source = source;
  return g;
}

}  // namespace qpn
