#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qpn/estimator.hpp"
#include "qpn/processes.hpp"
#include "qpn/quasiprob.hpp"

namespace qpn {

namespace input {
/// P_in(a) = exp(-a^2 / nbar) / (pi nbar); nbar = 0 is the vacuum.
struct ThermalRadial {
  double nbar;
};
struct CoherentDelta {
  cplx alpha;
};
struct DiscreteMixture {
  std::vector<std::pair<cplx, double>> components;  // (alpha, weight)
};
}  // namespace input

class InputPSpec {
 public:
  using Variant = std::variant<input::ThermalRadial, input::CoherentDelta, input::DiscreteMixture>;

  static InputPSpec thermal(double nbar);
  static InputPSpec coherent(cplx alpha);
  /// Weights must be >= 0 and sum to 1 within 1e-9.
  static InputPSpec mixture(std::vector<std::pair<cplx, double>> components);

  const Variant& variant() const { return v_; }
  /// `thermal:nbar=..`, `coherent:re=..,im=..` or `mixture(p=..,re=..,im=..;...)`
  std::string describe() const;
  double mean_photon_number() const;

 private:
  explicit InputPSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

InputPSpec parse_input(const std::string& descriptor);

inline constexpr double kCoverageMass = 0.99;

/// Output NQD for a classical input from a PNQD table:
///   P(beta) = [2 pi / W] \int da a Pbar(beta|a) P_in(a) w(a),  W = \int d^2alpha P_in w,
/// by the trapezoid rule over the table amplitudes. stat_err is propagated
/// through the linear rule; sys_err = |trapezoid - natural cubic spline|.
QuasiprobGrid predict_output_nqd(const PnqdTable& table, const InputPSpec& input,
                                 const std::function<double(double)>& process_weight);

/// Output NQD through the characteristic function of the input: the
/// process is applied to Phi_in (ladder identities for addition and
/// subtraction, the bath transform for decoherence, the number basis for
/// the Kerr unitary) and the filtered Fourier integral is evaluated.
QuasiprobGrid parseval_output_nqd(const ProcessModel& p, const StateModel& input, const FilterSpec& f,
                                  const GridSpec& grid);

}  // namespace qpn
