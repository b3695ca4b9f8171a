// Acceptance checks 1-10. `acceptance N` runs one criterion, no argument
// runs all. Each prints "criterion N: PASS|FAIL - detail".
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qpn/error.hpp"
#include "qpn/estimator.hpp"
#include "qpn/fock.hpp"
#include "qpn/predictor.hpp"
#include "qpn/recipe.hpp"

using namespace qpn;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

constexpr std::uint64_t kSeed = 20170911;
constexpr std::size_t kSamples = 266000;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<QuadratureDataset> added_datasets(const std::vector<double>& amps, double eta) {
  const auto add = ProcessModel::photon_addition();
  const auto phases = default_phases(10);
  const auto counts = split_evenly(kSamples, phases.size());
  std::vector<QuadratureDataset> out;
  for (std::size_t j = 0; j < amps.size(); ++j)
    out.push_back(simulate_dataset(apply_to_coherent(add, amps[j]).state, phases, counts, eta,
                                   substream_seed(kSeed, j), cplx(amps[j])));
  return out;
}

Result c1() {
  std::string detail;
  bool pass = true;
  std::vector<double> r(512);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 8.0 * static_cast<double>(i) / 511.0;
  for (double w : {0.8, 1.0, 1.2, 1.5, 2.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = build_filter(w, 1e-8);
    const auto ft = filter_fourier(f, r);
    const double t = seconds_since(t0);
    const double at0 = std::abs(f.value(0.0) - 1.0);
    const double mn = *std::min_element(ft.begin(), ft.end());
    const bool ok = at0 <= 1e-10 && mn >= -1e-8 && t < 60.0;
    pass = pass && ok;
    detail += fmt("%sw=%g |Omega(0)-1|=%.1e minFT=%.2e t=%.2fs", detail.empty() ? "" : "; ", w, at0, mn, t);
  }
  return {pass, detail};
}

Result c2() {
  const auto f = build_filter(1.2, 1e-8);
  double worst = 1e300;
  for (double a : {0.5, 1.0, 2.0}) {
    const auto g = pnqd_direct(ProcessModel::photon_subtraction(), a, f, GridSpec::square(4.0, 81));
    worst = std::min(worst, negativity_scan(g).min_value);
  }
  return {worst >= -1e-6, fmt("min over alpha in {0.5,1,2} on 81x81 = %.3e (limit -1e-6)", worst)};
}

Result c3() {
  const auto grid = GridSpec::square(4.0, 81);
  const auto f = build_filter(1.5, 1e-8);
  const auto s = StateModel::photon_subtracted(StateModel::squeezed_vacuum(0.5, 3.0));
  const auto g = nqd_direct(s, f, grid);
  const auto rep = negativity_scan(g);
  const auto rho = fock_density(s, 60);
  const auto oracle = nqd_from_char_fn([&](cplx z) { return fock_char_fn(rho, z); }, 3.0, f, grid, "fock60");
  const auto orep = negativity_scan(oracle);
  double diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) diff = std::max(diff, std::abs(g.values[i] - oracle.values[i]));
  const bool loc = std::abs(rep.argmin) < 1e-12 && rep.argmin == orep.argmin;
  const bool pass = rep.min_value < -1e-3 && loc && std::abs(rep.min_value - orep.min_value) < 1e-8;
  return {pass, fmt("min=%.10f at (%g,%g), cutoff-60 oracle min=%.10f at (%g,%g), max grid diff %.1e",
                    rep.min_value, rep.argmin.real(), rep.argmin.imag(), orep.min_value, orep.argmin.real(),
                    orep.argmin.imag(), diff)};
}

Result c4() {
  const auto proc = ProcessModel::kerr_cat();
  const auto g = pnqd_direct(proc, 2.0, build_filter(1.5, 1e-8), GridSpec::square(4.0, 81));
  const auto rep = negativity_scan(g);
  const double td = fixed_point_check(proc, 1.0, 60);
  return {rep.min_value < -1e-3 && td <= 1e-8,
          fmt("min=%.6f at (%g,%g); thermal(1.0) trace distance %.1e at cutoff 60", rep.min_value, rep.argmin.real(),
              rep.argmin.imag(), td)};
}

Result c5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto amps = default_amplitudes();
  const auto data = added_datasets(amps, 1.0);
  const auto f = build_filter(1.2, 1e-8);
  const auto origin = GridSpec::radial(0.0, 1);
  std::size_t within = 0, low = 0, low_sig = 0;
  double worst_sig = 1e300;
  for (std::size_t j = 0; j < amps.size(); ++j) {
    const auto g = sample_nqd(data[j], origin, f);
    const double direct = pnqd_direct(ProcessModel::photon_addition(), amps[j], f, origin).values[0];
    within += std::abs(g.values[0] - direct) <= 3.0 * g.stat_err[0];
    if (amps[j] <= 0.5) {
      ++low;
      const double sig = -g.values[0] / g.stat_err[0];
      low_sig += sig > 3.0;
      worst_sig = std::min(worst_sig, sig);
    }
  }
  const double t = seconds_since(t0);
  return {within == amps.size() && low_sig == low && t < 1800.0,
          fmt("%zu/%zu amplitudes within 3 stderr of direct; %zu/%zu with alpha<=0.5 significant (weakest %.1f); "
              "%.1fs",
              within, amps.size(), low_sig, low, worst_sig, t)};
}

Result c6() {
  const auto grid = GridSpec::square(4.0, 81);
  const auto d = simulate_dataset(StateModel::fock(1), default_phases(10), split_evenly(kSamples, 10), 0.6, kSeed);
  double used = 0.0;
  const auto g = sample_nqd_eta_removed(d, grid, 1.2, 1e-8, false, &used);
  const auto direct = nqd_direct(StateModel::fock(1), build_filter(1.2, 1e-8), grid);
  std::size_t within = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) within += std::abs(g.values[i] - direct.values[i]) <= 3 * g.stat_err[i];
  const double frac = static_cast<double>(within) / static_cast<double>(grid.size());
  return {frac >= 0.99, fmt("%zu/%zu grid points (%.2f%%) within 3 stderr; filter width used %.6f", within,
                            grid.size(), 100 * frac, used)};
}

Result c7() {
  const auto amps = default_amplitudes();
  const auto grid = GridSpec::radial(3.0, 61);
  const auto data = added_datasets(amps, 1.0);
  const auto table = sample_pnqd(data, grid, 1.2, 1e-8, true);
  const auto pred = predict_output_nqd(table, InputPSpec::thermal(0.5), [](double a) { return 1.0 + a * a; });
  const auto s = StateModel::photon_added(StateModel::thermal(0.5));
  const auto rho = fock_density(s, 60);
  const auto oracle = nqd_angular_average([&](cplx z) { return fock_char_fn(rho, z); }, 3.0, build_filter(1.2, 1e-8),
                                          grid, "fock60");
  const double sig0 = -pred.values[0] / pred.stat_err[0];
  std::size_t within = 0;
  double worst = 0.0, worst_r = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tol = 3.0 * pred.stat_err[i] + pred.sys_err[i];
    const double ratio = std::abs(pred.values[i] - oracle.values[i]) / tol;
    within += ratio <= 1.0;
    if (ratio > worst) {
      worst = ratio;
      worst_r = grid.point(i).real();
    }
  }
  return {pred.values[0] < 0.0 && sig0 > 3.0 && within == grid.size(),
          fmt("P(0)=%.5f significance %.0f (oracle %.5f); %zu/%zu radii within 3*stat+sys, worst ratio %.2f at "
              "|beta|=%.2f",
              pred.values[0], sig0, oracle.values[0], within, grid.size(), worst, worst_r)};
}

Result c8() {
  const double nbar = 1.0;
  const double gstar = classicality_threshold(nbar);
  const auto sq = StateModel::squeezed_vacuum(0.5, 3.0);
  std::vector<double> gts = {gstar - 1e-9, gstar + 1e-9};
  for (int k = 0; k <= 2000; ++k) gts.push_back(2.0 * gstar * k / 2000.0);
  std::size_t checked = 0, mismatched = 0;
  double first_bad = NAN, last_bad = NAN;
  for (double g : gts) {
    if (std::abs(g - gstar) < 1e-10) continue;
    const auto ev = p_function_eigenvalues(StateModel::decohered(sq, nbar, g));
    ++checked;
    if ((ev[0] >= 0.0) != (g > gstar)) {
      ++mismatched;
      if (std::isnan(first_bad) || g < first_bad) first_bad = g;
      if (std::isnan(last_bad) || g > last_bad) last_bad = g;
    }
  }
  if (mismatched == 0) return {true, fmt("%zu values of gt, PSD exactly past gt*=%.6f", checked, gstar)};
  return {false, fmt("%zu/%zu values of gt disagree: P Gaussian already PSD for gt in [%.4f, %.4f] below gt*=%.6f",
                     mismatched, checked, first_bad, last_bad, gstar)};
}

Result c9() {
  const auto grid = GridSpec::square(2.0, 17);
  const std::size_t probes[10] = {0, 16, 40, 60, 72, 144, 150, 200, 230, 288};
  const auto f = build_filter(1.2, 1e-8);
  const auto direct = nqd_direct(StateModel::coherent(0.0), f, grid);
  std::vector<double> sum(10, 0.0), err(10, 0.0);
  const int seeds = 50;
  for (int k = 0; k < seeds; ++k) {
    const auto d = simulate_dataset(StateModel::coherent(0.0), default_phases(10), split_evenly(10000, 10), 1.0,
                                    substream_seed(kSeed, static_cast<std::size_t>(k)));
    const auto g = sample_nqd(d, grid, f);
    for (std::size_t p = 0; p < 10; ++p) {
      sum[p] += g.values[probes[p]];
      err[p] += g.stat_err[probes[p]];
    }
  }
  std::size_t within = 0;
  double worst = 0.0;
  for (std::size_t p = 0; p < 10; ++p) {
    const double mean = sum[p] / seeds, se = err[p] / seeds / std::sqrt(double(seeds));
    const double z = std::abs(mean - direct.values[probes[p]]) / se;
    within += z <= 3.0;
    worst = std::max(worst, z);
  }
  return {within == 10, fmt("%zu/10 grid points within 3 stderr/sqrt(50); largest deviation %.2f", within, worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result c10() {
  const fs::path root = fs::path(QPN_TEST_TMP) / "determinism";
  fs::remove_all(root);
  struct Run {
    std::string name, overrides;
  };
  const Run runs[] = {{"fig1", ""}, {"fig2", ""}, {"fig3", ""}, {"fig4", ""}, {"fig5", ""}, {"custom", ""},
                      {"custom", R"({"state": "cat:re=1,im=0", "n_total": 20000, "grid": {"layout": "radial", "half_width": 2, "n": 9}})"}};
  std::size_t files = 0, identical = 0;
  std::string bad;
  for (std::size_t k = 0; k < std::size(runs); ++k) {
    const std::string tag = runs[k].name + "_" + std::to_string(k);
    for (const char* rep : {"a", "b"}) {
      auto c = default_recipe(runs[k].name);
      if (!runs[k].overrides.empty()) apply_overrides(c, runs[k].overrides);
      c.out_dir = (root / tag / rep).string();
      run_recipe(c);
    }
    for (const auto& e : fs::directory_iterator(root / tag / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const auto other = root / tag / "b" / e.path().filename();
      if (fs::exists(other) && slurp(e.path()) == slurp(other))
        ++identical;
      else
        bad += " " + tag + "/" + e.path().filename().string();
    }
  }
  return {files > 0 && identical == files,
          fmt("%zu/%zu CSV files byte-identical across reruns of %zu recipe configs%s", identical, files,
              std::size(runs), bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Result()>> checks = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  std::vector<int> which;
  if (argc > 1) {
    which.push_back(std::atoi(argv[1]));
    if (which[0] < 1 || which[0] > 10) {
      std::fprintf(stderr, "usage: acceptance [1-10]\n");
      return 2;
    }
  } else {
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  }
  bool all = true;
  for (int n : which) {
    Result r;
    try {
      r = checks[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", n, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
