#include "qpn/states.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "qpn/error.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

CharFnExpr coherent_cf(cplx alpha, cplx coeff = 1.0) {
  GaussianExponent g;
  g.D = std::conj(alpha);
  g.E = -alpha;
  return CharFnExpr::gaussian(g, coeff);
}

double expr_mean_photon_number(const CharFnExpr& f) {
  return -f.d_xi().d_xibar().at_zero().real();
}

CharFnExpr build_cf(const StateModel::Variant& v) {
  return std::visit(
      overloaded{
          [](const state::Coherent& s) { return coherent_cf(s.alpha); },
          [](const state::Thermal& s) {
            GaussianExponent g;
            g.C = -s.nbar;
            return CharFnExpr::gaussian(g);
          },
          [](const state::Fock& s) {
            // Laguerre polynomial L_n(|xi|^2)
            CharFnExpr e;
            double binom = 1.0, fact = 1.0;
            for (int k = 0; k <= s.n; ++k) {
              if (k > 0) {
                binom *= static_cast<double>(s.n - k + 1) / k;
                fact *= k;
              }
              const double c = (k % 2 ? -1.0 : 1.0) * binom / fact;
              e = e + CharFnExpr::constant(1.0).times_monomial(k, k, c);
            }
            return e;
          },
          [](const state::SqueezedVacuum& s) {
            GaussianExponent g;
            g.A = g.B = -(s.vp - s.vx) / 8.0;
            g.C = -(s.vp + s.vx - 2.0) / 4.0;
            return CharFnExpr::gaussian(g);
          },
          [](const state::Cat& s) {
            const cplx a = s.alpha;
            const double overlap = std::exp(-2.0 * std::norm(a));
            const cplx I{0.0, 1.0};
            GaussianExponent cross1;  // <-alpha| E |alpha>
            cross1.D = -std::conj(a);
            cross1.E = -a;
            GaussianExponent cross2;  // <alpha| E |-alpha>
            cross2.D = std::conj(a);
            cross2.E = a;
            return coherent_cf(a, 0.5) + coherent_cf(-a, 0.5) +
                   CharFnExpr::gaussian(cross1, -0.5 * I * overlap) +
                   CharFnExpr::gaussian(cross2, 0.5 * I * overlap);
          },
          [](const state::PhotonAdded& s) {
            const CharFnExpr& f = s.base->char_fn();
            const CharFnExpr dxi = f.d_xi();
            const CharFnExpr dxb = f.d_xibar();
            const CharFnExpr mixed = dxi.d_xibar();
            const double norm = 1.0 + expr_mean_photon_number(f);
            CharFnExpr out = mixed * -1.0 + f + dxb.times_monomial(0, 1) + dxi.times_monomial(1, 0) +
                             f.times_monomial(1, 1, -1.0);
            return out * (1.0 / norm);
          },
          [](const state::PhotonSubtracted& s) {
            const CharFnExpr& f = s.base->char_fn();
            const double norm = expr_mean_photon_number(f);
            return f.d_xi().d_xibar() * (-1.0 / norm);
          },
          [](const state::Decohered& s) {
            const double decay = std::exp(-2.0 * s.gt);
            return s.base->char_fn()
                .rescaled(std::exp(-s.gt))
                .times_gaussian(-decay - (s.nbar - (s.nbar + 1.0) * decay));
          },
      },
      v);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::Parameter, std::string(what) + " must be finite");
}

}  // namespace

StateModel::StateModel(Variant v) : v_(std::move(v)) {
  cf_ = std::make_shared<const CharFnExpr>(build_cf(v_));
}

StateModel StateModel::coherent(cplx alpha) {
  require_finite(alpha.real(), "coherent amplitude");
  require_finite(alpha.imag(), "coherent amplitude");
  return StateModel(state::Coherent{alpha});
}

StateModel StateModel::thermal(double nbar) {
  require_finite(nbar, "thermal nbar");
  require(nbar >= 0.0, "thermal state needs nbar >= 0");
  return StateModel(state::Thermal{nbar});
}

StateModel StateModel::fock(int n) {
  require(n >= 0, "Fock state needs n >= 0");
  require(n <= 200, "Fock state index too large (max 200)");
  return StateModel(state::Fock{n});
}

StateModel StateModel::squeezed_vacuum(double vx, double vp) {
  require_finite(vx, "vx");
  require_finite(vp, "vp");
  require(vx > 0.0 && vp > 0.0, "squeezed vacuum needs positive variances");
  require(vx * vp >= 1.0 - 1e-12, "squeezed vacuum violates vx * vp >= 1");
  return StateModel(state::SqueezedVacuum{vx, vp});
}

StateModel StateModel::cat(cplx alpha) {
  require_finite(alpha.real(), "cat amplitude");
  require_finite(alpha.imag(), "cat amplitude");
  return StateModel(state::Cat{alpha});
}

StateModel StateModel::photon_added(const StateModel& base) {
  return StateModel(state::PhotonAdded{std::make_shared<const StateModel>(base)});
}

StateModel StateModel::photon_subtracted(const StateModel& base) {
  if (!(expr_mean_photon_number(base.char_fn()) > 1e-300))
    fail(ErrorKind::ZeroWeight,
         "photon subtraction from " + base.describe() + " has zero probability");
  return StateModel(state::PhotonSubtracted{std::make_shared<const StateModel>(base)});
}

StateModel StateModel::decohered(const StateModel& base, double nbar, double gt) {
  require_finite(nbar, "bath nbar");
  require_finite(gt, "gt");
  require(nbar >= 0.0, "bath nbar must be >= 0");
  require(gt >= 0.0, "decoherence needs gt >= 0");
  return StateModel(state::Decohered{std::make_shared<const StateModel>(base), nbar, gt});
}

std::string StateModel::describe() const {
  auto num = [](double v) { return format_double(v); };
  return std::visit(
      overloaded{
          [&](const state::Coherent& s) {
            return "coherent:re=" + num(s.alpha.real()) + ",im=" + num(s.alpha.imag());
          },
          [&](const state::Thermal& s) { return "thermal:nbar=" + num(s.nbar); },
          [&](const state::Fock& s) { return "fock:n=" + std::to_string(s.n); },
          [&](const state::SqueezedVacuum& s) {
            return "squeezed:vx=" + num(s.vx) + ",vp=" + num(s.vp);
          },
          [&](const state::Cat& s) {
            return "cat:re=" + num(s.alpha.real()) + ",im=" + num(s.alpha.imag());
          },
          [&](const state::PhotonAdded& s) { return "added(" + s.base->describe() + ")"; },
          [&](const state::PhotonSubtracted& s) {
            return "subtracted(" + s.base->describe() + ")";
          },
          [&](const state::Decohered& s) {
            return "decohered(nbar=" + num(s.nbar) + ",gt=" + num(s.gt) + ";" +
                   s.base->describe() + ")";
          },
      },
      v_);
}

namespace {

std::map<std::string, double> parse_params(const std::string& text, const std::string& context) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      fail(ErrorKind::Parse, "expected key=value in '" + context + "'");
    const std::string key = item.substr(0, eq);
    if (!out.emplace(key, parse_double(item.substr(eq + 1))).second)
      fail(ErrorKind::Parse, "duplicate key '" + key + "' in '" + context + "'");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double take(std::map<std::string, double>& p, const std::string& key, const std::string& context,
            std::optional<double> fallback = std::nullopt) {
  auto it = p.find(key);
  if (it == p.end()) {
    if (fallback) return *fallback;
    fail(ErrorKind::Parse, "missing '" + key + "' in '" + context + "'");
  }
  const double v = it->second;
  p.erase(it);
  return v;
}

void expect_empty(const std::map<std::string, double>& p, const std::string& context) {
  if (!p.empty()) fail(ErrorKind::Parse, "unknown key '" + p.begin()->first + "' in '" + context + "'");
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unwrap(const std::string& d, const std::string& head) {
  if (d.size() < head.size() + 2 || d.back() != ')')
    fail(ErrorKind::Parse, "malformed state descriptor '" + d + "'");
  return d.substr(head.size() + 1, d.size() - head.size() - 2);
}

}  // namespace

StateModel parse_state(const std::string& raw) {
  const std::string d = strip(raw);
  if (d.rfind("added(", 0) == 0) return StateModel::photon_added(parse_state(unwrap(d, "added")));
  if (d.rfind("subtracted(", 0) == 0)
    return StateModel::photon_subtracted(parse_state(unwrap(d, "subtracted")));
  if (d.rfind("decohered(", 0) == 0) {
    const std::string inner = unwrap(d, "decohered");
    const auto semi = inner.find(';');
    if (semi == std::string::npos) fail(ErrorKind::Parse, "decohered(...) needs 'params;state'");
    auto p = parse_params(inner.substr(0, semi), d);
    const double nbar = take(p, "nbar", d);
    const double gt = take(p, "gt", d);
    expect_empty(p, d);
    return StateModel::decohered(parse_state(inner.substr(semi + 1)), nbar, gt);
  }
  const auto colon = d.find(':');
  const std::string kind = d.substr(0, colon);
  auto p = colon == std::string::npos ? std::map<std::string, double>{} : parse_params(d.substr(colon + 1), d);
  StateModel s = [&]() {
    if (kind == "coherent" || kind == "vacuum") {
      const double re = take(p, "re", d, 0.0);
      const double im = take(p, "im", d, 0.0);
      return StateModel::coherent({re, im});
    }
    if (kind == "cat") {
      const double re = take(p, "re", d, 0.0);
      const double im = take(p, "im", d, 0.0);
      return StateModel::cat({re, im});
    }
    if (kind == "thermal") return StateModel::thermal(take(p, "nbar", d));
    if (kind == "fock") {
      const double n = take(p, "n", d);
      if (n != std::floor(n)) fail(ErrorKind::Parse, "fock:n must be an integer");
      return StateModel::fock(static_cast<int>(n));
    }
    if (kind == "squeezed") {
      const double vx = take(p, "vx", d);
      const double vp = take(p, "vp", d);
      return StateModel::squeezed_vacuum(vx, vp);
    }
    fail(ErrorKind::Parse, "unknown state kind '" + kind + "'");
  }();
  expect_empty(p, d);
  return s;
}

cplx char_fn_normal(const StateModel& s, cplx xi) { return s.char_fn()(xi); }

double mean_photon_number(const StateModel& s) { return expr_mean_photon_number(s.char_fn()); }

LadderMoments ladder_moments(const StateModel& s) {
  const CharFnExpr& f = s.char_fn();
  const CharFnExpr dxb = f.d_xibar();
  return {-dxb.at_zero(), dxb.d_xibar().at_zero(), expr_mean_photon_number(f)};
}

QuadratureMoments quadrature_moments(const StateModel& s, double phi, double eta) {
  require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  const LadderMoments m = ladder_moments(s);
  const cplx rot = std::polar(1.0, -phi);
  const double mean = 2.0 * (m.a * rot).real();
  const double second = 2.0 * (m.a2 * rot * rot).real() + 2.0 * m.n + 1.0;
  const double var = second - mean * mean;
  return {std::sqrt(eta) * mean, eta * var + (1.0 - eta)};
}

bool is_phase_insensitive(const StateModel& s) {
  return std::visit(
      overloaded{
          [](const state::Coherent& c) { return c.alpha == cplx{}; },
          [](const state::Thermal&) { return true; },
          [](const state::Fock&) { return true; },
          [](const state::SqueezedVacuum& q) { return q.vx == q.vp; },
          [](const state::Cat& c) { return c.alpha == cplx{}; },
          [](const state::PhotonAdded& a) { return is_phase_insensitive(*a.base); },
          [](const state::PhotonSubtracted& a) { return is_phase_insensitive(*a.base); },
          [](const state::Decohered& a) { return is_phase_insensitive(*a.base); },
      },
      s.variant());
}

}  // namespace qpn
