#include "qpn/fock.hpp"

#include <gsl/gsl_integration.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "qpn/error.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

using Mat = Eigen::MatrixXcd;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Mat from_amplitudes(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

Mat squeezed_thermal(double vx, double vp, int dim) {
  const double nth = 0.5 * (std::sqrt(vx * vp) - 1.0);
  const double r = 0.25 * std::log(vp / vx);
  const int big = 2 * dim + 40;
  Mat rho_th = Mat::Zero(big, big);
  for (int n = 0; n < big; ++n)
    rho_th(n, n) = nth == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::pow(nth, n) / std::pow(nth + 1.0, n + 1);
  // S = exp(G), G = (r/2)(a^2 - a^dag^2); H = -iG is Hermitian.
  Mat H = Mat::Zero(big, big);
  for (int n = 0; n + 2 < big; ++n) {
    const double e = 0.5 * r * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
    // G(n, n+2) = e (a^2), G(n+2, n) = -e (-a^dag^2)
    H(n, n + 2) = cplx(0.0, -e);
    H(n + 2, n) = cplx(0.0, e);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  const Mat S = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  const Mat rho = S * rho_th * S.adjoint();
  return rho.topLeftCorner(dim, dim);
}

Mat loss_channel(const Mat& rho, double tau) {
  const int d = static_cast<int>(rho.rows());
  if (tau == 1.0) return rho;
  Mat out = Mat::Zero(d, d);
  auto k = [&](int m, int l) {
    // sqrt(C(m+l, l) (1-tau)^l tau^m)
    if (tau == 0.0) return m == 0 ? 1.0 : 0.0;
    const double lg = std::lgamma(m + l + 1.0) - std::lgamma(l + 1.0) - std::lgamma(m + 1.0);
    return std::exp(0.5 * (lg + l * std::log1p(-tau) + m * std::log(tau)));
  };
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; m + l < d && n + l < d; ++l) out(m, n) += k(m, l) * k(n, l) * rho(m + l, n + l);
  return out;
}

Mat amplifier_channel(const Mat& rho, double gain) {
  const int d = static_cast<int>(rho.rows());
  if (gain == 1.0) return rho;
  Mat out = Mat::Zero(d, d);
  const double ratio = (gain - 1.0) / gain;
  auto b = [&](int n, int l) {
    // sqrt(C(n+l, l)) ratio^{l/2} gain^{-(n+1)/2}
    const double lg = std::lgamma(n + l + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n + 1.0);
    return std::exp(0.5 * (lg + l * std::log(ratio) - (n + 1) * std::log(gain)));
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; i + l < d && j + l < d; ++l) out(i + l, j + l) += b(i, l) * b(j, l) * rho(i, j);
  return out;
}

Mat thermal_channel(const Mat& rho, double nbar, double gt) {
  const double decay = std::exp(-2.0 * gt);
  const double gain = 1.0 + nbar * (1.0 - decay);
  return amplifier_channel(loss_channel(rho, decay / gain), gain);
}

// Unnormalized matrix elements of s on indices 0..dim-1.
Mat build(const StateModel& s, int dim) {
  return std::visit(
      overloaded{
          [&](const state::Coherent& c) {
            Eigen::VectorXcd psi(dim);
            psi(0) = std::exp(-0.5 * std::norm(c.alpha));
            for (int n = 1; n < dim; ++n) psi(n) = psi(n - 1) * c.alpha / std::sqrt(static_cast<double>(n));
            return from_amplitudes(psi);
          },
          [&](const state::Thermal& t) {
            Mat m = Mat::Zero(dim, dim);
            for (int n = 0; n < dim; ++n)
              m(n, n) = t.nbar == 0.0 ? (n == 0 ? 1.0 : 0.0)
                                      : std::exp(n * std::log(t.nbar) - (n + 1) * std::log1p(t.nbar));
            return m;
          },
          [&](const state::Fock& f) {
            Mat m = Mat::Zero(dim, dim);
            if (f.n < dim) m(f.n, f.n) = 1.0;
            return m;
          },
          [&](const state::SqueezedVacuum& q) { return squeezed_thermal(q.vx, q.vp, dim); },
          [&](const state::Cat& c) {
            Eigen::VectorXcd psi(dim);
            const cplx I{0.0, 1.0};
            cplx pw = std::exp(-0.5 * std::norm(c.alpha));  // e^{-|a|^2/2} a^n / sqrt(n!)
            for (int n = 0; n < dim; ++n) {
              if (n > 0) pw *= c.alpha / std::sqrt(static_cast<double>(n));
              psi(n) = pw * (1.0 + (n % 2 ? -I : I)) / std::sqrt(2.0);
            }
            return from_amplitudes(psi);
          },
          [&](const state::PhotonAdded& a) {
            const Mat base = build(*a.base, dim + 1);
            const double norm = 1.0 + mean_photon_number(*a.base);
            Mat m = Mat::Zero(dim, dim);
            for (int i = 1; i < dim; ++i)
              for (int j = 1; j < dim; ++j) m(i, j) = std::sqrt(static_cast<double>(i * j)) * base(i - 1, j - 1);
            return Mat(m / norm);
          },
          [&](const state::PhotonSubtracted& a) {
            const Mat base = build(*a.base, dim + 1);
            const double norm = mean_photon_number(*a.base);
            if (!(norm > 0.0)) fail(ErrorKind::ZeroWeight, "photon subtraction with zero probability");
            Mat m = Mat::Zero(dim, dim);
            for (int i = 0; i < dim; ++i)
              for (int j = 0; j < dim; ++j)
                m(i, j) = std::sqrt(static_cast<double>((i + 1) * (j + 1))) * base(i + 1, j + 1);
            return Mat(m / norm);
          },
          [&](const state::Decohered& d) { return thermal_channel(build(*d.base, dim), d.nbar, d.gt); },
      },
      s.variant());
}

FockDensity to_density(const Mat& m, double tail) {
  const int d = static_cast<int>(m.rows());
  std::vector<cplx> data(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) data[static_cast<std::size_t>(i * d + j)] = m(i, j);
  return FockDensity(d - 1, std::move(data), tail);
}

Mat to_matrix(const FockDensity& rho) {
  const int d = rho.dim();
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rho(i, j);
  return m;
}

}  // namespace

FockDensity::FockDensity(int cutoff, std::vector<cplx> data, double tail)
    : cutoff_(cutoff), data_(std::move(data)), tail_(tail) {
  require(cutoff >= 0, "FockDensity: negative cutoff");
  require(data_.size() == static_cast<std::size_t>(dim() * dim()), "FockDensity: size mismatch");
}

double FockDensity::trace() const {
  double t = 0.0;
  for (int n = 0; n < dim(); ++n) t += (*this)(n, n).real();
  return t;
}

double FockDensity::purity() const {
  const Mat m = to_matrix(*this);
  return (m * m).trace().real();
}

double FockDensity::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(to_matrix(*this), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double FockDensity::hermiticity_defect() const {
  const Mat m = to_matrix(*this);
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

int default_cutoff(const StateModel& s) {
  const double n = mean_photon_number(s);
  return std::max(20, static_cast<int>(std::ceil(10.0 * (n + 1.0))));
}

FockDensity fock_density(const StateModel& s, int cutoff, double tail_bound) {
  if (cutoff < 1) fail(ErrorKind::Parameter, "fock_density: cutoff must be >= 1");
  const int work = cutoff + std::max(20, cutoff / 2);
  const Mat full = build(s, work + 1);
  // Every builder is normalized exactly, so the missing weight is 1 - partial.
  double partial = 0.0;
  for (int n = 0; n <= cutoff; ++n) partial += full(n, n).real();
  const double tail = std::max(0.0, 1.0 - partial);
  if (tail > tail_bound) {
    // Smallest cutoff meeting the bound, searching ever larger spaces.
    int suggested = -1;
    Mat wide = full;
    for (int span = work; suggested < 0 && span <= 4096; span *= 2) {
      if (span > work) wide = build(s, span + 1);
      double acc = 0.0;
      for (int c = 0; c <= span; ++c) {
        acc += wide(c, c).real();
        if (c > cutoff && 1.0 - acc <= tail_bound) {
          suggested = c;
          break;
        }
      }
    }
    if (suggested < 0) suggested = 8192;
    throw TruncationError("fock_density: cutoff " + std::to_string(cutoff) + " leaves tail " +
                              format_double(tail) + " for " + s.describe() + "; try cutoff " +
                              std::to_string(suggested),
                          suggested);
  }
  const Mat block = full.topLeftCorner(cutoff + 1, cutoff + 1);
  return to_density(block / block.trace().real(), tail);
}

FockDensity fock_density(const StateModel& s) { return fock_density(s, default_cutoff(s)); }

FockDensity fock_density_adaptive(const StateModel& s, double tail_bound) {
  int cutoff = default_cutoff(s);
  for (int attempt = 0;; ++attempt) {
    try {
      return fock_density(s, cutoff, tail_bound);
    } catch (const TruncationError& e) {
      if (attempt >= 4 || e.suggested_cutoff() > kMaxAdaptiveCutoff) throw;
      cutoff = std::max(cutoff + 1, e.suggested_cutoff());
    }
  }
}

cplx fock_char_fn(const FockDensity& rho, cplx xi) {
  const int d = rho.dim();
  const double s = std::abs(xi);
  const double x = s * s;
  const double theta = std::arg(xi);
  cplx total{};
  std::vector<double> ell(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const int len = d - k;
    // ell_n = sqrt(n!/(n+k)!) s^k L_n^{(k)}(x)
    if (s == 0.0) {
      ell[0] = k == 0 ? 1.0 : 0.0;
    } else {
      ell[0] = std::exp(k * std::log(s) - 0.5 * std::lgamma(k + 1.0));
    }
    if (len > 1) ell[1] = (1.0 + k - x) * ell[0] / std::sqrt(k + 1.0);
    for (int n = 1; n + 1 < len; ++n) {
      ell[n + 1] = ((2.0 * n + 1.0 + k - x) * ell[n] - std::sqrt(static_cast<double>(n) * (n + k)) * ell[n - 1]) /
                   std::sqrt((n + 1.0) * (n + k + 1.0));
    }
    if (k == 0) {
      for (int n = 0; n < len; ++n) total += rho(n, n) * ell[n];
    } else {
      const cplx up = std::polar(1.0, k * theta);
      const cplx down = (k % 2 ? -1.0 : 1.0) * std::conj(up);
      for (int n = 0; n < len; ++n) total += (rho(n, n + k) * up + rho(n + k, n) * down) * ell[n];
    }
  }
  return total;
}

double trace_distance(const FockDensity& a, const FockDensity& b) {
  require(a.dim() == b.dim(), "trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(to_matrix(a) - to_matrix(b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

FockDensity apply_kerr(const FockDensity& rho) {
  const int d = rho.dim();
  std::vector<cplx> out(rho.data().begin(), rho.data().end());
  // exp(-i pi/2 n^2) is 1 for even n and -i for odd n
  auto phase = [](int n) { return n % 2 ? cplx(0.0, -1.0) : cplx(1.0, 0.0); };
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) out[static_cast<std::size_t>(m * d + n)] *= phase(m) * std::conj(phase(n));
  return FockDensity(rho.cutoff(), std::move(out), rho.tail());
}

FockDensity apply_thermal_channel(const FockDensity& rho, double nbar, double gt) {
  require(nbar >= 0.0 && gt >= 0.0, "thermal channel needs nbar >= 0 and gt >= 0");
  return to_density(thermal_channel(to_matrix(rho), nbar, gt), rho.tail());
}

FockDensity apply_loss(const FockDensity& rho, double eta) {
  require(eta > 0.0 && eta <= 1.0, "loss channel needs eta in (0, 1]");
  return to_density(loss_channel(to_matrix(rho), eta), rho.tail());
}

void hermite_functions(int nmax, double x, std::span<double> out) {
  require(static_cast<int>(out.size()) >= nmax + 1, "hermite_functions: output too small");
  out[0] = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * x * x);
  if (nmax >= 1) out[1] = x * out[0];
  for (int n = 1; n < nmax; ++n)
    out[n + 1] = (x * out[n] - std::sqrt(static_cast<double>(n)) * out[n - 1]) / std::sqrt(n + 1.0);
}

double quadrature_pdf_ideal(const FockDensity& rho, double x, double phi) {
  const int d = rho.dim();
  std::vector<double> psi(static_cast<std::size_t>(d));
  hermite_functions(d - 1, x, psi);
  std::vector<cplx> v(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) v[m] = std::polar(psi[m], -m * phi);
  cplx p{};
  for (int m = 0; m < d; ++m) {
    cplx row{};
    for (int n = 0; n < d; ++n) row += rho(m, n) * std::conj(v[n]);
    p += v[m] * row;
  }
  return std::max(0.0, p.real());
}

double quadrature_pdf(const FockDensity& rho, double x, double phi, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorKind::Parameter, "quadrature_pdf: eta must lie in (0, 1]");
  if (eta == 1.0) return quadrature_pdf_ideal(rho, x, phi);
  static constexpr int kNodes = 96;
  static thread_local gsl_integration_fixed_workspace* ws =
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, kNodes, 0.0, 1.0, 0.0, 0.0);
  const double* t = gsl_integration_fixed_nodes(ws);
  const double* w = gsl_integration_fixed_weights(ws);
  const double spread = std::sqrt(2.0 * (1.0 - eta));
  const double se = std::sqrt(eta);
  double acc = 0.0;
  for (int k = 0; k < kNodes; ++k) acc += w[k] * quadrature_pdf_ideal(rho, (x - spread * t[k]) / se, phi);
  return acc / std::sqrt(std::numbers::pi * eta);
}

double quadrature_pdf(const StateModel& s, double x, double phi, double eta) {
  return quadrature_pdf(fock_density_adaptive(s), x, phi, eta);
}

}  // namespace qpn
