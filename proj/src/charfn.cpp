#include "qpn/charfn.hpp"

#include <algorithm>
#include <cmath>

namespace qpn {

namespace {

void accumulate(CharFnExpr::Polynomial& p, CharFnExpr::Monomial m, cplx c) {
  if (c == cplx{}) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{}) p.erase(it);
  }
}

}  // namespace

CharFnExpr CharFnExpr::constant(cplx c) { return gaussian(GaussianExponent{}, c); }

CharFnExpr CharFnExpr::gaussian(const GaussianExponent& g, cplx coeff) {
  CharFnExpr e;
  Polynomial p;
  accumulate(p, {0, 0}, coeff);
  e.add_term(g, p);
  return e;
}

void CharFnExpr::add_term(const GaussianExponent& g, const Polynomial& p) {
  if (p.empty()) return;
  auto it = std::find_if(terms_.begin(), terms_.end(),
                         [&](const Term& t) { return t.exponent == g; });
  if (it == terms_.end()) {
    terms_.push_back({g, p});
    return;
  }
  for (const auto& [m, c] : p) accumulate(it->poly, m, c);
  if (it->poly.empty()) terms_.erase(it);
}

CharFnExpr CharFnExpr::operator+(const CharFnExpr& o) const {
  CharFnExpr r = *this;
  for (const auto& t : o.terms_) r.add_term(t.exponent, t.poly);
  return r;
}

CharFnExpr CharFnExpr::operator*(cplx s) const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    Polynomial p;
    for (const auto& [m, c] : t.poly) accumulate(p, m, c * s);
    r.add_term(t.exponent, p);
  }
  return r;
}

CharFnExpr CharFnExpr::times_monomial(int pw, int qw, cplx coeff) const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    Polynomial p;
    for (const auto& [m, c] : t.poly) accumulate(p, {m.first + pw, m.second + qw}, c * coeff);
    r.add_term(t.exponent, p);
  }
  return r;
}

CharFnExpr CharFnExpr::d_xi() const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    const auto& g = t.exponent;
    Polynomial p;
    for (const auto& [m, c] : t.poly) {
      const auto [a, b] = m;
      if (a > 0) accumulate(p, {a - 1, b}, c * static_cast<double>(a));
      accumulate(p, {a + 1, b}, c * 2.0 * g.A);
      accumulate(p, {a, b + 1}, c * g.C);
      accumulate(p, {a, b}, c * g.D);
    }
    r.add_term(g, p);
  }
  return r;
}

CharFnExpr CharFnExpr::d_xibar() const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    const auto& g = t.exponent;
    Polynomial p;
    for (const auto& [m, c] : t.poly) {
      const auto [a, b] = m;
      if (b > 0) accumulate(p, {a, b - 1}, c * static_cast<double>(b));
      accumulate(p, {a, b + 1}, c * 2.0 * g.B);
      accumulate(p, {a + 1, b}, c * g.C);
      accumulate(p, {a, b}, c * g.E);
    }
    r.add_term(g, p);
  }
  return r;
}

CharFnExpr CharFnExpr::rescaled(double s) const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    GaussianExponent g = t.exponent;
    g.A *= s * s;
    g.B *= s * s;
    g.C *= s * s;
    g.D *= s;
    g.E *= s;
    Polynomial p;
    for (const auto& [m, c] : t.poly) accumulate(p, m, c * std::pow(s, m.first + m.second));
    r.add_term(g, p);
  }
  return r;
}

CharFnExpr CharFnExpr::times_gaussian(double c) const {
  CharFnExpr r;
  for (const auto& t : terms_) {
    GaussianExponent g = t.exponent;
    g.C += c;
    r.add_term(g, t.poly);
  }
  return r;
}

cplx CharFnExpr::operator()(cplx xi) const {
  const cplx xb = std::conj(xi);
  const double mod2 = std::norm(xi);
  cplx total{};
  for (const auto& t : terms_) {
    const auto& g = t.exponent;
    const cplx expo = g.A * xi * xi + g.B * xb * xb + g.C * mod2 + g.D * xi + g.E * xb;
    cplx poly{};
    for (const auto& [m, c] : t.poly) {
      cplx v = c;
      for (int k = 0; k < m.first; ++k) v *= xi;
      for (int k = 0; k < m.second; ++k) v *= xb;
      poly += v;
    }
    total += poly * std::exp(expo);
  }
  return total;
}

cplx CharFnExpr::at_zero() const {
  cplx total{};
  for (const auto& t : terms_) {
    auto it = t.poly.find({0, 0});
    if (it != t.poly.end()) total += it->second;
  }
  return total;
}

}  // namespace qpn
