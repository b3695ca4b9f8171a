#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qpn/error.hpp"
#include "qpn/filters.hpp"

using namespace qpn;

namespace {
// Reference values of Omega_1 from a Cartesian dblquad of the definition
// (tests/oracles/oracles.py).
constexpr double kNorm = 1.9687012432153022;
constexpr double kOmega1Half = 0.824263864560903;
constexpr double kOmega1One = 0.4757781908076831;
constexpr double kOmega1Two = 0.02840397858774589;

const FilterSpec& filter(double w) {
  static std::vector<std::pair<double, FilterSpec>> cache;
  for (auto& [cw, f] : cache)
    if (cw == w) return f;
  cache.emplace_back(w, build_filter(w, 1e-8));
  return cache.back().second;
}
}  // namespace

TEST_CASE("normalization constant") { CHECK(unit_filter_integral(0.0) == doctest::Approx(kNorm).epsilon(1e-12)); }

TEST_CASE("omega is one at the origin") {
  for (double w : {0.8, 1.0, 1.2, 1.5, 2.0}) CHECK(std::abs(filter(w).value(0.0) - 1.0) <= 1e-10);
}

TEST_CASE("omega matches the reference values") {
  const auto& f = filter(1.0);
  CHECK(std::abs(f.value(0.5) - kOmega1Half) < 1e-8);
  CHECK(std::abs(f.value(1.0) - kOmega1One) < 1e-8);
  CHECK(std::abs(f.value(2.0) - kOmega1Two) < 1e-8);
}

TEST_CASE("omega agrees with nested Gauss-Kronrod on the definition") {
  using boost::math::quadrature::gauss_kronrod;
  const double u = 1.0;
  auto inner = [u](double x) {
    return gauss_kronrod<double, 31>::integrate(
        [&](double y) { return std::exp(-std::pow(x * x + y * y, 2) - std::pow((x + u) * (x + u) + y * y, 2)); },
        -4.0, 4.0, 15, 1e-13);
  };
  const double v = gauss_kronrod<double, 31>::integrate(inner, -5.0, 4.0, 15, 1e-13);
  CHECK(std::abs(v / kNorm - filter(1.0).value(u)) < 1e-8);
}

TEST_CASE("scaling law") {
  CHECK(filter(1.2).value(2.4) == doctest::Approx(filter(1.0).value(2.0)).epsilon(1e-9));
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> ub(0.0, 1.0);
  const double widths[] = {0.8, 1.2, 1.5, 2.0};
  for (int i = 0; i < 200; ++i) {
    const double w = widths[g() % 4];
    const double b = ub(g) * filter(w).b_max();
    CHECK(std::abs(filter(w).value(b) - filter(1.0).value(b / w)) <= 1e-8);
  }
}

TEST_CASE("monotone and positive on the table") {
  const auto& f = filter(1.2);
  const auto v = f.tabulated();
  for (std::size_t i = 1; i < v.size(); ++i) {
    CHECK(v[i] <= v[i - 1]);
    CHECK(v[i] > 0.0);
  }
  CHECK(f.step() <= FilterSpec::kMaxStep);
}

TEST_CASE("truncation contract") {
  for (double w : {0.8, 1.0, 1.2, 1.5, 2.0}) {
    const auto& f = filter(w);
    const double bm = f.b_max();
    CHECK(f.value(bm) * std::exp(bm * bm / 2) < f.tol());
    CHECK(f.value(bm + 0.1) == 0.0);
  }
  const auto& f = filter(1.5);
  CHECK(f.value(f.b_max()) < f.tol() * std::exp(-f.b_max() * f.b_max() / 2));
}

TEST_CASE("weighted tail decreases beyond its maximum") {
  const auto& f = filter(1.2);
  const auto b = f.nodes();
  const auto v = f.tabulated();
  std::vector<double> h(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) h[i] = std::exp(b[i] * b[i] / 2) * v[i];
  const auto peak = std::max_element(h.begin(), h.end()) - h.begin();
  for (std::size_t i = static_cast<std::size_t>(peak) + 1; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
}

TEST_CASE("fourier transform: admissible, unit mass, scaling") {
  std::vector<double> r(512);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 8.0 * static_cast<double>(i) / 511.0;
  for (double w : {0.8, 1.0, 1.2, 1.5, 2.0}) {
    const auto ft = filter_fourier(filter(w), r);
    CHECK(*std::min_element(ft.begin(), ft.end()) >= -1e-8);
  }
  std::vector<double> rr(4001);
  for (std::size_t i = 0; i < rr.size(); ++i) rr[i] = 10.0 * static_cast<double>(i) / 4000.0;
  const auto ft = filter_fourier(filter(1.0), rr);
  double mass = 0.0;
  for (std::size_t i = 1; i < rr.size(); ++i)
    mass += 0.5 * (rr[i] - rr[i - 1]) * (rr[i] * ft[i] + rr[i - 1] * ft[i - 1]);
  CHECK(2 * std::numbers::pi * mass == doctest::Approx(1.0).epsilon(1e-6));

  const std::vector<double> beta = {0.0, 0.3, 0.7, 1.1};
  std::vector<double> twice;
  for (double x : beta) twice.push_back(2 * x);
  const auto f2 = filter_fourier(filter(2.0), beta);
  const auto f1 = filter_fourier(filter(1.0), twice);
  for (std::size_t i = 0; i < beta.size(); ++i) CHECK(f2[i] == doctest::Approx(4 * f1[i]).epsilon(1e-7));
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(build_filter(0.0, 1e-8), Error);
  CHECK_THROWS_AS(build_filter(-1.0, 1e-8), Error);
  CHECK_THROWS_AS(build_filter(1.0, 0.0), Error);
  CHECK_THROWS_AS(build_filter(1.0, 1e-2), Error);
  CHECK_THROWS_AS(filter_value(filter(1.0), -0.1), Error);
}

TEST_CASE("csv writer header") {
  const std::string path = "filter_test_table.csv";
  write_filter_csv(filter(1.2), path);
  std::ifstream in(path);
  std::string first, row;
  std::getline(in, first);
  std::getline(in, row);
  CHECK(first.rfind("# w=1.2 b_max=", 0) == 0);
  CHECK(first.find(" tol=1e-08") != std::string::npos);
  CHECK(row == "0,1");
  std::remove(path.c_str());
}
