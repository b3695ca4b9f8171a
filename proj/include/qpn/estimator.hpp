#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpn/filters.hpp"
#include "qpn/homodyne.hpp"
#include "qpn/quasiprob.hpp"

namespace qpn {

/// Even kernel g(y) = (2/pi) \int_0^b_max b cos(b y) e^{b^2/2} Omega_w(b) J0(2 a b) db
/// tabulated on [0, y_max] with cubic Hermite segments; direct Gauss-Legendre
/// evaluation outside the table. a = 0 gives the phase-sensitive pattern
/// function f(x, phi; beta) = g(x - 2 Re(beta e^{-i phi})).
class PatternTable {
 public:
  PatternTable(const FilterSpec& f, double y_max, double a = 0.0);

  double operator()(double y) const;
  double direct(double y) const;
  double radius() const { return a_; }
  double y_max() const { return table_.x_last(); }

 private:
  double weight(double b) const;
  FilterSpec f_;
  double a_ = 0.0;
  std::vector<double> b_, v_;
  UniformHermiteTable table_;
};

/// f_Omega(x, phi; beta, w) evaluated directly (no table).
double pattern_fn(double x, double phi, cplx beta, const FilterSpec& f);

/// Phase-averaged pattern function with the J0(2 a b) factor.
double phase_randomized_pattern(double x, double a, const FilterSpec& f);

/// How the estimator treats the finite set of homodyne phases.
///
/// Plain: P = (1/N) sum_i f_Omega(x_i, phi_i; beta), the pattern function at
/// the measured phases. With K phases the angular integral is then a K-point
/// rule and harmonics of order >= 2K alias once 2 |beta| b_max exceeds ~2K.
///
/// Interpolated: the filtered characteristic function known on the 2K rays
/// i b e^{i phi_k} is interpolated trigonometrically in angle before the
/// Fourier integral. The per-sample kernel is f_Omega with its Jacobi-Anger
/// series cut at order K; identical to Plain at beta = 0. Requires equally
/// spaced phases.
enum class PhaseQuadrature { Interpolated, Plain };

/// Sample mean of the pattern kernel with standard error sd / sqrt(N)
/// (per-phase means averaged with equal weight for Interpolated).
QuasiprobGrid sample_nqd(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f,
                         PhaseQuadrature q = PhaseQuadrature::Interpolated);

/// True when the phases are k pi / K + offset for k = 0..K-1.
bool equally_spaced_phases(std::span<const double> phases);

/// Phase-randomized estimate on a radial grid.
QuasiprobGrid sample_pnqd_randomized(const QuadratureDataset& d, const GridSpec& grid, const FilterSpec& f);

/// P(beta; eta = 1, w) = eta P(sqrt(eta) beta; eta, w / sqrt(eta)). The width
/// actually used is returned through used_width when non-null.
QuasiprobGrid sample_nqd_eta_removed(const QuadratureDataset& d, const GridSpec& grid, double width, double tol,
                                     bool phase_randomized = false, double* used_width = nullptr,
                                     PhaseQuadrature q = PhaseQuadrature::Interpolated);

struct PnqdTable {
  double width = 0.0;
  bool phase_randomized = false;
  std::vector<double> amplitudes;  // strictly increasing |alpha|
  std::vector<cplx> alphas;
  std::vector<QuasiprobGrid> grids;
};

/// One sampled grid per probe amplitude. Datasets with eta < 1 go through
/// the efficiency-removal identity.
PnqdTable sample_pnqd(const std::vector<QuadratureDataset>& datasets, const GridSpec& grid, double width, double tol,
                      bool phase_randomized, PhaseQuadrature q = PhaseQuadrature::Interpolated);

/// Writes <dir>/<stem>_<k>.csv per amplitude and <dir>/<stem>_index.csv with
/// rows `alpha,path` (paths relative to dir). Returns the index path.
std::string write_pnqd_table(const PnqdTable& t, const std::string& dir, const std::string& stem);
PnqdTable read_pnqd_table(const std::string& index_path);

}  // namespace qpn
