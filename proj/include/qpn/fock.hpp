#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qpn/charfn.hpp"
#include "qpn/states.hpp"

namespace qpn {

inline constexpr double kDefaultTailBound = 1e-8;

/// Density matrix in the number basis, indices 0..cutoff. Row-major storage.
class FockDensity {
 public:
  FockDensity(int cutoff, std::vector<cplx> data, double tail);

  int cutoff() const { return cutoff_; }
  int dim() const { return cutoff_ + 1; }
  cplx operator()(int m, int n) const { return data_[static_cast<std::size_t>(m * dim() + n)]; }
  std::span<const cplx> data() const { return data_; }
  /// Weight lost by truncation, 1 - (partial trace before renormalization).
  double tail() const { return tail_; }

  double trace() const;
  double purity() const;
  double min_eigenvalue() const;
  double hermiticity_defect() const;

 private:
  int cutoff_;
  std::vector<cplx> data_;
  double tail_;
};

/// max(20, ceil(10 (<n> + 1)))
int default_cutoff(const StateModel& s);

/// Number-basis matrix of s, renormalized to unit trace. Throws
/// TruncationError when the discarded weight exceeds tail_bound.
FockDensity fock_density(const StateModel& s, int cutoff, double tail_bound = kDefaultTailBound);
FockDensity fock_density(const StateModel& s);

inline constexpr int kMaxAdaptiveCutoff = 400;

/// Starts from default_cutoff(s) and raises the cutoff to the suggested
/// value on truncation failure.
FockDensity fock_density_adaptive(const StateModel& s, double tail_bound = kDefaultTailBound);

/// Tr[rho exp(a^dag xi) exp(-a conj(xi))] from the matrix elements.
cplx fock_char_fn(const FockDensity& rho, cplx xi);

double trace_distance(const FockDensity& a, const FockDensity& b);

/// exp(-i pi/2 n^2) rho exp(i pi/2 n^2)
FockDensity apply_kerr(const FockDensity& rho);

/// Thermal-bath channel for damping gt = gamma t and bath occupation nbar,
/// via Kraus operators of a pure-loss channel followed by a
/// quantum-limited amplifier.
FockDensity apply_thermal_channel(const FockDensity& rho, double nbar, double gt);

/// Pure loss with transmissivity eta.
FockDensity apply_loss(const FockDensity& rho, double eta);

/// Oscillator eigenfunctions psi_0..psi_nmax at x for the convention
/// x = a + a^dag (vacuum variance 1).
void hermite_functions(int nmax, double x, std::span<double> out);

/// Density of x(phi) for an ideal detector.
double quadrature_pdf_ideal(const FockDensity& rho, double x, double phi);

/// p(x; phi) with efficiency eta, as the Gaussian smearing
/// p_eta(x) = \int dx' p(x') N(x - sqrt(eta) x'; 1 - eta).
double quadrature_pdf(const FockDensity& rho, double x, double phi, double eta);
double quadrature_pdf(const StateModel& s, double x, double phi, double eta);

}  // namespace qpn
