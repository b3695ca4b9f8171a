#pragma once

#include <array>
#include <string>
#include <variant>

#include "qpn/states.hpp"

namespace qpn {

namespace process {
struct PhotonAddition {};
struct PhotonSubtraction {};
/// Kerr evolution exp(-i pi/2 n^2), mapping |alpha> to a cat state.
struct KerrCat {};
struct ThermalDecoherence {
  double nbar;
  double gt;
};
}  // namespace process

class ProcessModel {
 public:
  using Variant = std::variant<process::PhotonAddition, process::PhotonSubtraction, process::KerrCat,
                               process::ThermalDecoherence>;

  static ProcessModel photon_addition() { return ProcessModel(process::PhotonAddition{}); }
  static ProcessModel photon_subtraction() { return ProcessModel(process::PhotonSubtraction{}); }
  static ProcessModel kerr_cat() { return ProcessModel(process::KerrCat{}); }
  static ProcessModel thermal_decoherence(double nbar, double gt);

  const Variant& variant() const { return v_; }
  /// `add`, `subtract`, `kerrcat` or `decohere:nbar=..,gt=..`
  std::string describe() const;

 private:
  explicit ProcessModel(Variant v) : v_(v) {}
  Variant v_;
};

ProcessModel parse_process(const std::string& descriptor);

/// Normalized output state and the trace Tr E(|alpha><alpha|) of the
/// unnormalized image.
struct ConditionalOutput {
  StateModel state;
  double weight;
};

ConditionalOutput apply_to_coherent(const ProcessModel& p, cplx alpha);

/// Trace weight of the process at input amplitude |alpha| = a.
double process_weight(const ProcessModel& p, double a);

/// Phi(xi, t) = exp[-|xi|^2 (nbar - (nbar + 1) e^{-2gt})] Phi_Q(xi e^{-gt}, 0),
/// with Phi_Q(xi, 0) = exp(-|xi|^2) Phi(xi, 0).
cplx decohere_char_fn(double nbar, double gt, const StateModel& s, cplx xi);

/// gt* = -ln(nbar / (nbar + 1)) / 2; infinite for nbar = 0.
double classicality_threshold(double nbar);

/// nbar / (nbar + 1) > e^{-2 gt}; the boundary itself is not past.
bool is_past_classicality_threshold(double nbar, double gt);

/// Trace distance between Thermal(nbar) and its image under the Kerr
/// unitary, computed in the truncated number basis.
double fixed_point_check(const ProcessModel& p, double nbar, int cutoff);

/// For a Gaussian state with Phi(xi) = exp(-v^T K v + linear), v = (Re xi,
/// Im xi), returns the real symmetric K as {K_rr, K_ri, K_ii}. The P
/// function is a proper Gaussian iff K is positive semidefinite.
std::array<double, 3> gaussian_cf_form(const StateModel& s);

/// Eigenvalues (ascending) of the form returned by gaussian_cf_form.
std::array<double, 2> p_function_eigenvalues(const StateModel& s);

}  // namespace qpn
