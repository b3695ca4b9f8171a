#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpn/filters.hpp"
#include "qpn/processes.hpp"
#include "qpn/states.hpp"

namespace qpn {

/// Points in the beta plane. Square grids are centred at the origin with
/// nx * ny points covering [-half_width, half_width]^2. Radial grids hold
/// nx points on the real axis in [0, half_width] (ny = 1) and carry values
/// that depend on |beta| only.
struct GridSpec {
  enum class Layout { Square, Radial };
  Layout layout = Layout::Square;
  double half_width = 4.0;
  int nx = 81;
  int ny = 81;

  static GridSpec square(double half_width = 4.0, int n = 81);
  static GridSpec radial(double r_max, int n);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double spacing() const;
  /// Point i, stored row by row with the real part running fastest.
  cplx point(std::size_t i) const;
  double max_modulus() const;
  void validate() const;
};

struct QuasiprobGrid {
  GridSpec spec;
  double width = 0.0;
  std::string source;
  std::vector<double> values;
  std::vector<double> stat_err;  // empty when not sampled
  std::vector<double> sys_err;   // empty when not available
  double imag_residue = 0.0;

  /// Riemann sum of values times cell area (square grids), or
  /// 2 pi \int r P(r) dr by the trapezoid rule (radial grids).
  double mass() const;
};

/// Throws Resolution when the grid spacing exceeds pi / (2 b_max).
void check_resolution(const GridSpec& g, const FilterSpec& f);

/// P_Omega(beta) = pi^-2 \int d^2xi Phi(xi) Omega_w(|xi|) exp(beta conj(xi) - conj(beta) xi).
/// `extent` bounds the phase-space scale of the state (used to choose the
/// quadrature order); the integral runs over the disk |xi| <= b_max.
QuasiprobGrid nqd_from_char_fn(const std::function<cplx(cplx)>& phi, double extent, const FilterSpec& f,
                               const GridSpec& grid, const std::string& source);

QuasiprobGrid nqd_direct(const StateModel& s, const FilterSpec& f, const GridSpec& grid);

/// Hankel form for phase-insensitive characteristic functions:
/// P(r) = (2/pi) \int_0^b_max b Phibar(b) Omega_w(b) J0(2 r b) db,
/// with Phibar the angular average of phi. Evaluated at every grid point.
QuasiprobGrid nqd_angular_average(const std::function<cplx(cplx)>& phi, double extent, const FilterSpec& f,
                                  const GridSpec& grid, const std::string& source);

/// NQD of the normalized output of p for the coherent input alpha.
QuasiprobGrid pnqd_direct(const ProcessModel& p, cplx alpha, const FilterSpec& f, const GridSpec& grid);

/// Phase-randomized PNQD, the average of P(beta | a e^{i phi}) over phi.
/// Requires a radial grid.
QuasiprobGrid pnqd_phase_randomized(const ProcessModel& p, double a, const FilterSpec& f, const GridSpec& grid);

struct NegativityReport {
  double min_value = 0.0;
  cplx argmin;
  std::optional<double> significance;
  bool nonclassical = false;
};

inline constexpr double kDefaultSignificance = 3.0;

/// Minimum over the grid. With stat_err present the verdict is
/// significance > threshold, otherwise min < 0.
NegativityReport negativity_scan(const QuasiprobGrid& g, double threshold = kDefaultSignificance);

void write_grid_csv(const QuasiprobGrid& g, std::ostream& out);
void write_grid_csv(const QuasiprobGrid& g, const std::string& path);
QuasiprobGrid read_grid_csv(const std::string& path);

}  // namespace qpn
