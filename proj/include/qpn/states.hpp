#pragma once

#include <complex>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qpn/charfn.hpp"

namespace qpn {

class StateModel;

namespace state {
struct Coherent {
  cplx alpha;
};
struct Thermal {
  double nbar;
};
struct Fock {
  int n;
};
/// Gaussian state centred at the origin with quadrature variances vx
/// (phase 0) and vp (phase pi/2); vacuum variance is 1.
struct SqueezedVacuum {
  double vx;
  double vp;
};
/// (|alpha> + i|-alpha>)/sqrt(2), the Kerr image of |alpha>.
struct Cat {
  cplx alpha;
};
struct PhotonAdded {
  std::shared_ptr<const StateModel> base;
};
struct PhotonSubtracted {
  std::shared_ptr<const StateModel> base;
};
/// Base state after coupling to a thermal bath with mean occupation nbar
/// for damping time gt = gamma * t.
struct Decohered {
  std::shared_ptr<const StateModel> base;
  double nbar;
  double gt;
};
}  // namespace state

/// Immutable single-mode state description. Constructed only through the
/// validating factories.
class StateModel {
 public:
  using Variant = std::variant<state::Coherent, state::Thermal, state::Fock, state::SqueezedVacuum,
                               state::Cat, state::PhotonAdded, state::PhotonSubtracted,
                               state::Decohered>;

  static StateModel coherent(cplx alpha);
  static StateModel thermal(double nbar);
  static StateModel fock(int n);
  static StateModel squeezed_vacuum(double vx, double vp);
  static StateModel cat(cplx alpha);
  static StateModel photon_added(const StateModel& base);
  static StateModel photon_subtracted(const StateModel& base);
  static StateModel decohered(const StateModel& base, double nbar, double gt);

  const Variant& variant() const { return v_; }

  /// Text descriptor, e.g. `coherent:re=0.46,im=0` or `added(thermal:nbar=0.5)`.
  std::string describe() const;

  /// Closed-form normally ordered characteristic function.
  const CharFnExpr& char_fn() const { return *cf_; }

 private:
  explicit StateModel(Variant v);
  Variant v_;
  std::shared_ptr<const CharFnExpr> cf_;
};

StateModel parse_state(const std::string& descriptor);

/// Phi(xi) = Tr[rho exp(a^dag xi) exp(-a conj(xi))].
cplx char_fn_normal(const StateModel& s, cplx xi);

double mean_photon_number(const StateModel& s);

/// <a> and the normally ordered second moments <a^2>, <a^dag a>.
struct LadderMoments {
  cplx a;
  cplx a2;
  double n;
};
LadderMoments ladder_moments(const StateModel& s);

struct QuadratureMoments {
  double mean;
  double variance;
};
/// Moments of x(phi) = a e^{-i phi} + a^dag e^{i phi}, vacuum variance 1,
/// after detection with efficiency eta.
QuadratureMoments quadrature_moments(const StateModel& s, double phi, double eta = 1.0);

/// True when Phi(xi) depends on |xi| only.
bool is_phase_insensitive(const StateModel& s);

}  // namespace qpn
