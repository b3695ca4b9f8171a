#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "qpn/estimator.hpp"
#include "qpn/predictor.hpp"

using namespace qpn;

namespace {
const FilterSpec& filter() {
  static const FilterSpec f = build_filter(1.2, 1e-8);
  return f;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}
}  // namespace

TEST_CASE("estimator is unbiased and its error bars are calibrated") {
  const StateModel st = StateModel::fock(1);
  const auto grid = GridSpec::square(1.0, 9);
  const auto direct = nqd_direct(st, filter(), grid);
  const std::size_t probes[] = {0, 20, 40, 58};
  std::vector<std::vector<double>> est(4), err(4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto d = simulate_dataset(st, default_phases(), 1000, 1.0, 1000 + seed);
    const auto g = sample_nqd(d, grid, filter());
    for (std::size_t k = 0; k < 4; ++k) {
      est[k].push_back(g.values[probes[k]]);
      err[k].push_back(g.stat_err[probes[k]]);
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    CAPTURE(probes[k]);
    CHECK(std::abs(mean(est[k]) - direct.values[probes[k]]) < 4 * sd(est[k]) / std::sqrt(50.0));
    CHECK(mean(err[k]) == doctest::Approx(sd(est[k])).epsilon(0.3));
  }
}

TEST_CASE("filter transforms are nonnegative for any width") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.4, 3.0);
  for (int trial = 0; trial < 6; ++trial) {
    const auto f = build_filter(w(rng), 1e-8);
    CAPTURE(f.width());
    std::vector<double> r(201);
    for (int i = 0; i <= 200; ++i) r[static_cast<std::size_t>(i)] = 0.05 * i;
    for (double v : filter_fourier(f, r)) CHECK(v >= -1e-8);
  }
}

TEST_CASE("classical states stay nonnegative") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5), n(0.0, 2.0);
  const auto grid = GridSpec::square(4.0, 41);
  for (int trial = 0; trial < 6; ++trial) {
    const StateModel states[] = {StateModel::coherent(cplx(u(rng), u(rng))), StateModel::thermal(n(rng))};
    for (const auto& s : states) {
      CAPTURE(s.describe());
      const auto g = nqd_direct(s, filter(), grid);
      CHECK(negativity_scan(g).min_value >= -1e-8);
      CHECK(g.imag_residue < 1e-8);
    }
  }
}

TEST_CASE("photon-added coherent states are negative at some beta") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> a(0.0, 1.0), ph(0.0, 6.28);
  const auto grid = GridSpec::square(4.0, 41);
  for (int trial = 0; trial < 4; ++trial) {
    const auto g = pnqd_direct(ProcessModel::photon_addition(), std::polar(a(rng), ph(rng)), filter(), grid);
    CHECK(negativity_scan(g).min_value < 0.0);
  }
}

TEST_CASE("process weights") {
  for (double a : {0.0, 0.3, 1.7}) {
    CHECK(process_weight(ProcessModel::photon_addition(), a) == doctest::Approx(1 + a * a));
    CHECK(process_weight(ProcessModel::photon_subtraction(), a) == doctest::Approx(a * a));
    CHECK(process_weight(ProcessModel::kerr_cat(), a) == 1.0);
  }
}

TEST_CASE("prediction from a constant table is that constant") {
  PnqdTable t;
  t.width = 1.2;
  t.phase_randomized = true;
  const auto grid = GridSpec::radial(1.0, 5);
  for (int j = 0; j <= 20; ++j) {
    t.amplitudes.push_back(0.15 * j);
    t.alphas.emplace_back(0.15 * j);
    QuasiprobGrid g;
    g.spec = grid;
    g.width = 1.2;
    g.values.assign(grid.size(), 0.25);
    g.stat_err.assign(grid.size(), 0.0);
    t.grids.push_back(g);
  }
  const auto p = predict_output_nqd(t, InputPSpec::thermal(0.4), [](double) { return 1.0; });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(p.sys_err[i] > 0.0);
    CHECK(std::abs(p.values[i] - 0.25) <= 3 * p.sys_err[i]);
  }
}
