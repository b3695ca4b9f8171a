#include "qpn/recipe.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "qpn/error.hpp"
#include "qpn/estimator.hpp"
#include "qpn/homodyne.hpp"
#include "qpn/predictor.hpp"
#include "qpn/processes.hpp"

namespace qpn {

using nlohmann::json;

namespace {

const std::set<std::string> kRecipes = {"fig1", "fig2", "fig3", "fig4", "fig5", "custom"};

json grid_json(const GridSpec& g) {
  return {{"layout", g.layout == GridSpec::Layout::Radial ? "radial" : "square"},
          {"half_width", g.half_width},
          {"nx", g.nx},
          {"ny", g.ny}};
}

json config_json(const RecipeConfig& c) {
  return {{"name", c.name},       {"width", c.width},     {"grid", grid_json(c.grid)},
          {"n_total", c.n_total}, {"phases", c.phases},   {"seed", c.seed},
          {"amplitudes", c.amplitudes}, {"nbar", c.nbar}, {"eta", c.eta},
          {"threshold", c.threshold},   {"state", c.state}, {"process", c.process},
          {"alpha", {c.alpha_re, c.alpha_im}},            {"out_dir", c.out_dir}};
}

json verdict_json(const NegativityReport& r) {
  json v = {{"min", r.min_value},
            {"argmin", {r.argmin.real(), r.argmin.imag()}},
            {"verdict", r.nonclassical ? "nonclassical" : "classical"}};
  v["significance"] = r.significance ? json(*r.significance) : json(nullptr);
  return v;
}

std::string amp_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", a);
  return buf;
}

class Runner {
 public:
  explicit Runner(const RecipeConfig& c) : c_(c) {}

  // Runs body as a named stage; errors are re-raised with the stage name.
  void stage(const std::string& name, const std::function<void(json&)>& body) {
    json entry = {{"name", name}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(entry);
    } catch (const Error& e) {
      fail(e.kind(), "stage '" + name + "': " + e.what());
    } catch (const std::exception& e) {
      fail(ErrorKind::Contract, "stage '" + name + "': " + e.what());
    }
    entry["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    stages_.push_back(std::move(entry));
  }

  std::string path(const std::string& file) const { return (std::filesystem::path(c_.out_dir) / file).string(); }

  void write(const QuasiprobGrid& g, const std::string& file, json& entry) {
    write_grid_csv(g, path(file));
    entry["outputs"].push_back(file);
  }

  std::vector<QuadratureDataset> added_datasets(json& entry) const {
    const auto proc = ProcessModel::photon_addition();
    const auto phases = default_phases(c_.phases);
    const auto counts = split_evenly(c_.n_total, phases.size());
    std::vector<QuadratureDataset> out;
    json seeds = json::array();
    for (std::size_t j = 0; j < c_.amplitudes.size(); ++j) {
      const cplx alpha(c_.amplitudes[j], 0.0);
      const auto seed = substream_seed(c_.seed, j);
      out.push_back(simulate_dataset(apply_to_coherent(proc, alpha).state, phases, counts, c_.eta, seed, alpha));
      seeds.push_back(seed);
    }
    entry["dataset_seeds"] = seeds;
    return out;
  }

  QuasiprobGrid sample(const QuadratureDataset& d, const GridSpec& g, bool randomized) const {
    if (d.meta.eta < 1.0) return sample_nqd_eta_removed(d, g, c_.width, kRecipeFilterTol, randomized);
    const auto f = build_filter(c_.width, kRecipeFilterTol);
    return randomized ? sample_pnqd_randomized(d, g, f) : sample_nqd(d, g, f);
  }

  json manifest() const {
    return {{"recipe", c_.name}, {"config", config_json(c_)}, {"stages", stages_}, {"checks", checks}};
  }

  json checks = json::object();

 private:
  const RecipeConfig& c_;
  json stages_ = json::array();
};

void fig1(const RecipeConfig& c, Runner& r) {
  r.stage("nqd", [&](json& e) {
    const auto s = StateModel::photon_subtracted(StateModel::squeezed_vacuum(0.5, 3.0));
    const auto g = nqd_direct(s, build_filter(c.width, kRecipeFilterTol), c.grid);
    r.write(g, "fig1_nqd.csv", e);
    e["verdict"] = verdict_json(negativity_scan(g, c.threshold));
    e["mass"] = g.mass();
  });
}

void fig2(const RecipeConfig& c, Runner& r) {
  const auto proc = ProcessModel::kerr_cat();
  r.stage("pnqd", [&](json& e) {
    const auto g = pnqd_direct(proc, {2.0, 0.0}, build_filter(c.width, kRecipeFilterTol), c.grid);
    r.write(g, "fig2_pnqd.csv", e);
    e["verdict"] = verdict_json(negativity_scan(g, c.threshold));
    e["mass"] = g.mass();
  });
  r.stage("thermal_fixed_point", [&](json& e) {
    const double d = fixed_point_check(proc, 1.0, 60);
    e["trace_distance"] = d;
    r.checks["thermal_invariance"] = d <= 1e-8;
  });
}

void fig3(const RecipeConfig& c, Runner& r) {
  std::vector<QuadratureDataset> data;
  r.stage("simulate", [&](json& e) { data = r.added_datasets(e); });
  for (std::size_t j = 0; j < data.size(); ++j) {
    r.stage("sample_alpha_" + amp_label(c.amplitudes[j]), [&](json& e) {
      auto g = r.sample(data[j], c.grid, false);
      r.write(g, "fig3_alpha_" + amp_label(c.amplitudes[j]) + ".csv", e);
      e["verdict"] = verdict_json(negativity_scan(g, c.threshold));
    });
  }
}

void fig4(const RecipeConfig& c, Runner& r) {
  const auto origin = GridSpec::radial(0.0, 1);
  const auto proc = ProcessModel::photon_addition();
  const auto f = build_filter(c.width, kRecipeFilterTol);
  std::vector<QuadratureDataset> data;
  r.stage("simulate", [&](json& e) { data = r.added_datasets(e); });
  r.stage("curve", [&](json& e) {
    std::ofstream out(r.path("fig4_curve.csv"));
    if (!out) fail(ErrorKind::Io, "cannot write " + r.path("fig4_curve.csv"));
    out << "# source=pnqd(add) beta=0 w=" << format_double(c.width) << "\n";
    out << "# columns: alpha,value,stat_err,direct\n";
    std::size_t within = 0, significant = 0;
    json rows = json::array();
    for (std::size_t j = 0; j < data.size(); ++j) {
      const auto g = r.sample(data[j], origin, true);
      const double direct = pnqd_direct(proc, {c.amplitudes[j], 0.0}, f, origin).values[0];
      const double v = g.values[0], s = g.stat_err[0];
      out << format_double(c.amplitudes[j]) << ',' << format_double(v) << ',' << format_double(s) << ','
          << format_double(direct) << '\n';
      within += std::abs(v - direct) <= 3.0 * s;
      significant += -v / s > c.threshold;
    }
    if (!out) fail(ErrorKind::Io, "write failed for " + r.path("fig4_curve.csv"));
    e["outputs"].push_back("fig4_curve.csv");
    e["within_3_sigma"] = within;
    e["significantly_negative"] = significant;
    r.checks["curve_matches_direct"] = within == data.size();
  });
  r.stage("crossing", [&](json& e) {
    auto p0 = [&](double a) { return pnqd_direct(proc, {a, 0.0}, f, origin).values[0]; };
    double lo = 0.0, hi = c.amplitudes.back();
    if (p0(lo) >= 0.0 || p0(hi) <= 0.0) {
      e["direct_zero_crossing"] = nullptr;
      return;
    }
    for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
      const double mid = 0.5 * (lo + hi);
      (p0(mid) < 0.0 ? lo : hi) = mid;
    }
    e["direct_zero_crossing"] = 0.5 * (lo + hi);
  });
}

void fig5(const RecipeConfig& c, Runner& r) {
  std::vector<QuadratureDataset> data;
  PnqdTable table;
  QuasiprobGrid pred, oracle;
  r.stage("simulate", [&](json& e) { data = r.added_datasets(e); });
  r.stage("sample_pnqd", [&](json& e) {
    table = sample_pnqd(data, c.grid, c.width, kRecipeFilterTol, true);
    e["outputs"].push_back(std::filesystem::path(write_pnqd_table(table, c.out_dir, "fig5_pnqd")).filename().string());
  });
  r.stage("predict", [&](json& e) {
    pred = predict_output_nqd(table, InputPSpec::thermal(c.nbar), [](double a) { return 1.0 + a * a; });
    r.write(pred, "fig5_predicted.csv", e);
    e["verdict"] = verdict_json(negativity_scan(pred, c.threshold));
    e["mass"] = pred.mass();
  });
  r.stage("oracle", [&](json& e) {
    oracle = parseval_output_nqd(ProcessModel::photon_addition(), StateModel::thermal(c.nbar),
                                 build_filter(c.width, kRecipeFilterTol), c.grid);
    r.write(oracle, "fig5_oracle.csv", e);
    std::size_t within = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      const double d = std::abs(pred.values[i] - oracle.values[i]);
      const double tol = 3.0 * pred.stat_err[i] + pred.sys_err[i];
      within += d <= tol;
      worst = std::max(worst, d / tol);
    }
    e["points_within_error"] = within;
    e["points"] = pred.values.size();
    e["worst_ratio"] = worst;
    r.checks["prediction_matches_oracle"] = within == pred.values.size();
  });
}

void custom(const RecipeConfig& c, Runner& r) {
  const auto f = build_filter(c.width, kRecipeFilterTol);
  const StateModel input = parse_state(c.state);
  std::optional<ProcessModel> proc;
  if (!c.process.empty()) proc = parse_process(c.process);
  const cplx alpha(c.alpha_re, c.alpha_im);
  r.stage("direct", [&](json& e) {
    const auto g = proc ? pnqd_direct(*proc, alpha, f, c.grid) : nqd_direct(input, f, c.grid);
    r.write(g, "custom_direct.csv", e);
    e["verdict"] = verdict_json(negativity_scan(g, c.threshold));
  });
  if (c.n_total == 0) return;
  r.stage("sample", [&](json& e) {
    const StateModel s = proc ? apply_to_coherent(*proc, alpha).state : input;
    const auto phases = default_phases(c.phases);
    const auto d = simulate_dataset(s, phases, split_evenly(c.n_total, phases.size()), c.eta, c.seed,
                                    proc ? std::optional<cplx>(alpha) : std::nullopt);
    const auto g = r.sample(d, c.grid, c.grid.layout == GridSpec::Layout::Radial);
    r.write(g, "custom_sampled.csv", e);
    e["verdict"] = verdict_json(negativity_scan(g, c.threshold));
  });
}

}  // namespace

std::vector<double> default_amplitudes() {
  std::vector<double> a(13);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = 1.6 * static_cast<double>(j) / 12.0;
  return a;
}

RecipeConfig default_recipe(const std::string& name) {
  if (!kRecipes.count(name)) fail(ErrorKind::Parameter, "unknown recipe '" + name + "'");
  RecipeConfig c;
  c.name = name;
  c.grid = GridSpec::square(4.0, 81);
  if (name == "fig1" || name == "fig2") c.width = 1.5;
  if (name == "fig3") c.amplitudes = {0.0, 0.46, 1.12};
  if (name == "fig4" || name == "fig5") c.amplitudes = default_amplitudes();
  if (name == "fig4") c.grid = GridSpec::radial(0.0, 1);
  if (name == "fig5") c.grid = GridSpec::radial(3.0, 61);
  if (name == "custom") {
    c.state = "fock:n=1";
    c.n_total = 0;
  }
  return c;
}

void RecipeConfig::validate() const {
  if (!kRecipes.count(name)) fail(ErrorKind::Parameter, "unknown recipe '" + name + "'");
  require(std::isfinite(width) && width > 0.0, "width must be > 0");
  grid.validate();
  require(phases >= 1 && phases <= 1000, "phases must be in [1, 1000]");
  require(std::isfinite(eta) && eta > 0.0 && eta <= 1.0, "eta must be in (0, 1]");
  require(std::isfinite(nbar) && nbar >= 0.0, "nbar must be >= 0");
  require(std::isfinite(threshold) && threshold > 0.0, "threshold must be > 0");
  const bool sampled = name == "fig3" || name == "fig4" || name == "fig5" || (name == "custom" && n_total > 0);
  if (sampled) require(n_total >= static_cast<std::size_t>(phases), "n_total must give every phase a sample");
  if (name == "fig3" || name == "fig4" || name == "fig5") {
    require(!amplitudes.empty(), "amplitude list is empty");
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
      require(std::isfinite(amplitudes[j]) && amplitudes[j] >= 0.0, "amplitudes must be >= 0");
      if (j) require(amplitudes[j] > amplitudes[j - 1], "amplitudes must be strictly increasing");
    }
  }
  if (name == "fig4" || name == "fig5")
    require(grid.layout == GridSpec::Layout::Radial, name + " needs a radial grid");
  if (name == "fig5") require(amplitudes.size() >= 3, "fig5 needs >= 3 amplitudes");
  if (name == "custom") {
    parse_state(state);
    if (!process.empty()) parse_process(process);
  }
  require(!out_dir.empty(), "output directory is empty");
}

void apply_overrides(RecipeConfig& c, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("recipe overrides: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Parse, "recipe overrides must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "width") c.width = v.get<double>();
      else if (key == "n_total") c.n_total = v.get<std::size_t>();
      else if (key == "phases") c.phases = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "amplitudes") c.amplitudes = v.get<std::vector<double>>();
      else if (key == "nbar") c.nbar = v.get<double>();
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "threshold") c.threshold = v.get<double>();
      else if (key == "state") c.state = v.get<std::string>();
      else if (key == "process") c.process = v.get<std::string>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "alpha") {
        const auto a = v.get<std::vector<double>>();
        if (a.size() != 2) fail(ErrorKind::Parse, "alpha must be [re, im]");
        c.alpha_re = a[0];
        c.alpha_im = a[1];
      } else if (key == "grid") {
        const std::string layout = v.value("layout", std::string("square"));
        if (layout != "square" && layout != "radial") fail(ErrorKind::Parse, "grid layout must be square or radial");
        for (const auto& [k, _] : v.items())
          if (k != "layout" && k != "half_width" && k != "nx" && k != "ny" && k != "n")
            fail(ErrorKind::Parse, "unknown grid key '" + k + "'");
        const double hw = v.value("half_width", 4.0);
        const int n = v.value("n", v.value("nx", 81));
        c.grid = layout == "radial" ? GridSpec::radial(hw, n) : GridSpec::square(hw, n);
        if (layout == "square" && v.contains("ny")) c.grid.ny = v["ny"].get<int>();
      } else {
        fail(ErrorKind::Parse, "unknown recipe key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("recipe overrides: ") + e.what());
  }
}

std::string run_recipe(const RecipeConfig& c) {
  c.validate();
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + c.out_dir + ": " + ec.message());
  Runner r(c);
  if (c.name == "fig1") fig1(c, r);
  else if (c.name == "fig2") fig2(c, r);
  else if (c.name == "fig3") fig3(c, r);
  else if (c.name == "fig4") fig4(c, r);
  else if (c.name == "fig5") fig5(c, r);
  else custom(c, r);
  const std::string text = r.manifest().dump(2) + "\n";
  std::ofstream out(r.path("manifest.json"));
  out << text;
  if (!out) fail(ErrorKind::Io, "cannot write " + r.path("manifest.json"));
  return text;
}

}  // namespace qpn
