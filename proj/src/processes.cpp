#include "qpn/processes.hpp"

#include <cmath>
#include <limits>

#include "qpn/error.hpp"
#include "qpn/fock.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

ProcessModel ProcessModel::thermal_decoherence(double nbar, double gt) {
  require(std::isfinite(nbar) && nbar >= 0.0, "decoherence needs bath nbar >= 0");
  require(std::isfinite(gt) && gt >= 0.0, "decoherence needs gt >= 0");
  return ProcessModel(process::ThermalDecoherence{nbar, gt});
}

std::string ProcessModel::describe() const {
  return std::visit(overloaded{
                        [](const process::PhotonAddition&) { return std::string("add"); },
                        [](const process::PhotonSubtraction&) { return std::string("subtract"); },
                        [](const process::KerrCat&) { return std::string("kerrcat"); },
                        [](const process::ThermalDecoherence& d) {
                          return "decohere:nbar=" + format_double(d.nbar) + ",gt=" + format_double(d.gt);
                        },
                    },
                    v_);
}

ProcessModel parse_process(const std::string& d) {
  if (d == "add") return ProcessModel::photon_addition();
  if (d == "subtract") return ProcessModel::photon_subtraction();
  if (d == "kerrcat") return ProcessModel::kerr_cat();
  const std::string head = "decohere:";
  if (d.rfind(head, 0) == 0) {
    double nbar = -1.0, gt = -1.0;
    std::size_t pos = head.size();
    while (pos < d.size()) {
      const auto comma = d.find(',', pos);
      const std::string item = d.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Parse, "expected key=value in '" + d + "'");
      const std::string key = item.substr(0, eq);
      const double v = parse_double(item.substr(eq + 1));
      if (key == "nbar") nbar = v;
      else if (key == "gt") gt = v;
      else fail(ErrorKind::Parse, "unknown key '" + key + "' in '" + d + "'");
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (nbar < 0.0 || gt < 0.0) fail(ErrorKind::Parse, "decohere needs nbar=..,gt=.. (both >= 0)");
    return ProcessModel::thermal_decoherence(nbar, gt);
  }
  fail(ErrorKind::Parse, "unknown process '" + d + "'");
}

ConditionalOutput apply_to_coherent(const ProcessModel& p, cplx alpha) {
  const StateModel in = StateModel::coherent(alpha);
  return std::visit(
      overloaded{
          [&](const process::PhotonAddition&) {
            return ConditionalOutput{StateModel::photon_added(in), 1.0 + std::norm(alpha)};
          },
          [&](const process::PhotonSubtraction&) {
            if (alpha == cplx{})
              fail(ErrorKind::ZeroWeight, "photon subtraction on the vacuum has zero weight");
            return ConditionalOutput{in, std::norm(alpha)};
          },
          [&](const process::KerrCat&) { return ConditionalOutput{StateModel::cat(alpha), 1.0}; },
          [&](const process::ThermalDecoherence& d) {
            return ConditionalOutput{StateModel::decohered(in, d.nbar, d.gt), 1.0};
          },
      },
      p.variant());
}

double process_weight(const ProcessModel& p, double a) {
  return std::visit(overloaded{
                        [&](const process::PhotonAddition&) { return 1.0 + a * a; },
                        [&](const process::PhotonSubtraction&) { return a * a; },
                        [](const auto&) { return 1.0; },
                    },
                    p.variant());
}

cplx decohere_char_fn(double nbar, double gt, const StateModel& s, cplx xi) {
  require(gt >= 0.0, "decohere_char_fn: gt must be >= 0");
  require(nbar >= 0.0, "decohere_char_fn: nbar must be >= 0");
  const double decay = std::exp(-2.0 * gt);
  const cplx scaled = xi * std::exp(-gt);
  const cplx phi_q = std::exp(-std::norm(scaled)) * char_fn_normal(s, scaled);
  return std::exp(-std::norm(xi) * (nbar - (nbar + 1.0) * decay)) * phi_q;
}

double classicality_threshold(double nbar) {
  require(nbar >= 0.0, "classicality_threshold: nbar must be >= 0");
  if (nbar == 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::log(nbar / (nbar + 1.0));
}

bool is_past_classicality_threshold(double nbar, double gt) {
  require(gt >= 0.0, "classicality threshold: gt must be >= 0");
  require(nbar >= 0.0, "classicality threshold: nbar must be >= 0");
  return nbar / (nbar + 1.0) > std::exp(-2.0 * gt);
}

double fixed_point_check(const ProcessModel& p, double nbar, int cutoff) {
  if (!std::holds_alternative<process::KerrCat>(p.variant()))
    fail(ErrorKind::Capability, "fixed_point_check is defined for the Kerr cat process only");
  const FockDensity rho = fock_density(StateModel::thermal(nbar), cutoff);
  return trace_distance(apply_kerr(rho), rho);
}

std::array<double, 3> gaussian_cf_form(const StateModel& s) {
  const auto& terms = s.char_fn().terms();
  if (terms.size() != 1 || terms[0].poly.size() != 1 || terms[0].poly.count({0, 0}) != 1)
    fail(ErrorKind::Capability, s.describe() + " is not a Gaussian state");
  const GaussianExponent& g = terms[0].exponent;
  // A xi^2 + B xib^2 + C |xi|^2 in terms of (xr, xi)
  const cplx rr = g.A + g.B + g.C;
  const cplx ii = g.C - g.A - g.B;
  const cplx ri = cplx(0.0, 1.0) * (g.A - g.B);  // coefficient of xr*xi is 2*ri
  if (std::abs(rr.imag()) > 1e-12 || std::abs(ii.imag()) > 1e-12 || std::abs(ri.imag()) > 1e-12)
    fail(ErrorKind::Contract, "Gaussian characteristic function has a complex quadratic form");
  return {-rr.real(), -ri.real(), -ii.real()};
}

std::array<double, 2> p_function_eigenvalues(const StateModel& s) {
  const auto [a, b, c] = gaussian_cf_form(s);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mean - rad, mean + rad};
}

}  // namespace qpn
