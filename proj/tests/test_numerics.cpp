#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qpn/error.hpp"
#include "qpn/numerics.hpp"

using namespace qpn;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto r = gauss_legendre(16, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 31);
  CHECK(s == doctest::Approx((std::pow(2.0, 32) - 1.0) / 32.0).epsilon(1e-13));
  const auto g = gauss_legendre(64, 0.0, std::numbers::pi);
  double t = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) t += g.weights[i] * std::sin(g.nodes[i]);
  CHECK(t == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("pairwise sum is order-deterministic and accurate") {
  std::vector<double> v(100001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(10000.1).epsilon(1e-14));
  CHECK(pairwise_sum(v) == pairwise_sum(v));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("cubic table reproduces cubics") {
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) {
    const double x = 0.1 * i;
    v.push_back(x * x * x - 2 * x + 1);
  }
  UniformCubicTable t(0.0, 0.1, v);
  for (double x : {0.0, 0.03, 0.55, 1.97, 2.0}) CHECK(t(x) == doctest::Approx(x * x * x - 2 * x + 1).epsilon(1e-12));
}

TEST_CASE("hermite table reproduces cubics and reports its range") {
  std::vector<double> v, d;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.2 * i;
    v.push_back(std::pow(x, 3));
    d.push_back(3 * x * x);
  }
  UniformHermiteTable t(0.0, 0.2, v, d);
  CHECK(t(1.13) == doctest::Approx(std::pow(1.13, 3)).epsilon(1e-12));
  CHECK(t.contains(2.0));
  CHECK_FALSE(t.contains(2.01));
}

TEST_CASE("natural spline integral and trapezoid") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(i * 0.05);
    y.push_back(std::exp(x.back()));
  }
  NaturalSpline s(x, y);
  CHECK(s.integral(0.0, 2.0) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-5));
  CHECK(trapezoid(x, y) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(2e-4));
  CHECK(s(0.05) == doctest::Approx(std::exp(0.05)).epsilon(1e-12));
}

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(g) * std::pow(10.0, static_cast<int>(g() % 20) - 10);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double_digits(0.123456789, 3) == "0.123");
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
}
