#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qpn/error.hpp"
#include "qpn/fock.hpp"
#include "qpn/processes.hpp"

using namespace qpn;

namespace {
// Lindblad master-equation integration in the number basis at cutoff 60
// (tests/oracles/oracles.py): nbar = 1, gt = 0.5, SqueezedVacuum(0.5, 3.0), xi = 1.
constexpr double kDecohereRef = 0.3678794411714424;

cplx random_xi(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(2.5 * std::sqrt(u(g)), 2 * std::numbers::pi * u(g));
}
}  // namespace

TEST_CASE("coherent-state action and weights") {
  const auto add = ProcessModel::photon_addition();
  const auto sub = ProcessModel::photon_subtraction();
  const auto kerr = ProcessModel::kerr_cat();

  const auto a0 = apply_to_coherent(add, 0.0);
  CHECK(a0.weight == 1.0);
  CHECK(trace_distance(fock_density(a0.state, 10), fock_density(StateModel::fock(1), 10)) < 1e-14);

  const auto s1 = apply_to_coherent(sub, 1.0);
  CHECK(s1.weight == 1.0);
  CHECK(s1.state.describe() == "coherent:re=1,im=0");

  const auto k2 = apply_to_coherent(kerr, 2.0);
  CHECK(k2.weight == 1.0);
  CHECK(k2.state.describe() == "cat:re=2,im=0");

  std::mt19937_64 g(3);
  for (int i = 0; i < 50; ++i) {
    const cplx a = random_xi(g);
    CHECK(apply_to_coherent(add, a).weight == 1.0 + std::norm(a));
    CHECK(apply_to_coherent(sub, a).weight == std::norm(a));
    CHECK(process_weight(add, std::abs(a)) == doctest::Approx(1.0 + std::norm(a)).epsilon(1e-15));
  }
  try {
    apply_to_coherent(sub, 0.0);
    FAIL("expected zero-weight error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroWeight);
  }
}

TEST_CASE("kerr image of a coherent state matches the number-basis unitary") {
  const auto out = apply_to_coherent(ProcessModel::kerr_cat(), {1.3, 0.4});
  const auto direct = apply_kerr(fock_density(StateModel::coherent({1.3, 0.4}), 60));
  CHECK(trace_distance(fock_density(out.state, 60), direct) < 1e-10);
}

TEST_CASE("decoherence characteristic function") {
  const auto sq = StateModel::squeezed_vacuum(0.5, 3.0);
  std::mt19937_64 g(8);
  for (int i = 0; i < 20; ++i) {
    const cplx xi = random_xi(g);
    CHECK(std::abs(decohere_char_fn(0.7, 0.0, sq, xi) - char_fn_normal(sq, xi)) < 1e-13);
    CHECK(std::abs(decohere_char_fn(0.7, 60.0, sq, xi) - std::exp(-0.7 * std::norm(xi))) < 1e-12);
    const auto d = StateModel::decohered(sq, 0.7, 0.4);
    CHECK(std::abs(decohere_char_fn(0.7, 0.4, sq, xi) - char_fn_normal(d, xi)) < 1e-12);
  }
  CHECK(decohere_char_fn(1.0, 0.5, sq, 1.0).real() == doctest::Approx(kDecohereRef).epsilon(1e-7));
  CHECK(std::abs(decohere_char_fn(1.0, 0.5, sq, 1.0).imag()) < 1e-14);
  // The Kraus route agrees with the closed form too.
  const auto k = apply_thermal_channel(fock_density(sq, 60), 1.0, 0.5);
  CHECK(fock_char_fn(k, 1.0).real() == doctest::Approx(kDecohereRef).epsilon(1e-7));
  CHECK_THROWS_AS(decohere_char_fn(1.0, -0.1, sq, 1.0), Error);
}

TEST_CASE("decoherence semigroup") {
  std::mt19937_64 g(12);
  const StateModel gaussians[] = {StateModel::squeezed_vacuum(0.5, 3.0), StateModel::coherent({0.8, -0.3}),
                                  StateModel::thermal(0.4), StateModel::squeezed_vacuum(2.0, 0.7)};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : gaussians) {
    for (int i = 0; i < 10; ++i) {
      const double nbar = 2 * u(g), g1 = u(g), g2 = u(g);
      const auto twice = StateModel::decohered(StateModel::decohered(s, nbar, g1), nbar, g2);
      const auto once = StateModel::decohered(s, nbar, g1 + g2);
      const cplx xi = random_xi(g);
      CHECK(std::abs(char_fn_normal(twice, xi) - char_fn_normal(once, xi)) < 1e-8);
    }
  }
}

TEST_CASE("classicality threshold") {
  CHECK(classicality_threshold(1.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(classicality_threshold(1.0) == doctest::Approx(0.3466).epsilon(1e-4));
  CHECK(is_past_classicality_threshold(1.0, 5.0));
  CHECK_FALSE(is_past_classicality_threshold(1.0, 0.0));
  CHECK_FALSE(is_past_classicality_threshold(0.0, 0.0));
  CHECK_FALSE(is_past_classicality_threshold(1.0, classicality_threshold(1.0)));
  CHECK(is_past_classicality_threshold(1.0, classicality_threshold(1.0) + 1e-9));
  CHECK_FALSE(is_past_classicality_threshold(0.0, 100.0));
}

TEST_CASE("decohered squeezed vacuum: P-Gaussian positivity") {
  const auto sq = StateModel::squeezed_vacuum(0.5, 3.0);
  // Past the threshold every decohered state has a proper Gaussian P function.
  for (double gt = classicality_threshold(1.0) + 1e-6; gt < 3.0; gt += 0.05)
    CHECK(p_function_eigenvalues(StateModel::decohered(sq, 1.0, gt))[0] >= -1e-10);
  // For this particular state positivity already sets in where the x
  // variance reaches the vacuum level: e^{-2gt} 0.5 + (1 - e^{-2gt}) 3 = 1.
  const double gt_psd = 0.5 * std::log(1.25);
  CHECK(p_function_eigenvalues(StateModel::decohered(sq, 1.0, gt_psd - 1e-6))[0] < 0.0);
  CHECK(p_function_eigenvalues(StateModel::decohered(sq, 1.0, gt_psd + 1e-6))[0] > 0.0);
  CHECK(p_function_eigenvalues(sq)[0] < 0.0);
  CHECK_THROWS_AS(gaussian_cf_form(StateModel::fock(1)), Error);
}

TEST_CASE("kerr fixed points") {
  const auto kerr = ProcessModel::kerr_cat();
  CHECK(fixed_point_check(kerr, 0.5, 40) <= 1e-8);
  CHECK(fixed_point_check(kerr, 0.0, 5) == 0.0);
  CHECK(fixed_point_check(kerr, 1.0, 60) <= 1e-8);
  CHECK_THROWS_AS(fixed_point_check(ProcessModel::photon_addition(), 1.0, 60), Error);
  CHECK_THROWS_AS(fixed_point_check(kerr, 3.0, 10), TruncationError);
}

TEST_CASE("descriptors") {
  CHECK(parse_process("add").describe() == "add");
  CHECK(parse_process("subtract").describe() == "subtract");
  CHECK(parse_process("kerrcat").describe() == "kerrcat");
  CHECK(parse_process("decohere:nbar=1,gt=0.5").describe() == "decohere:nbar=1,gt=0.5");
  CHECK_THROWS_AS(parse_process("decohere:nbar=1"), Error);
  CHECK_THROWS_AS(parse_process("decohere:nbar=1,gt=-1"), Error);
  CHECK_THROWS_AS(parse_process("squeeze"), Error);
  CHECK_THROWS_AS(ProcessModel::thermal_decoherence(-1.0, 0.1), Error);
}
