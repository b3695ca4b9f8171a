// Command-line front end over the C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qpn/qpn.h"

namespace {

struct Failure {
  qpn_status status;
  std::string message;
};

void check(qpn_status s) {
  if (s != QPN_OK) throw Failure{s, qpn_last_error()};
}

int exit_code(qpn_status s) {
  switch (s) {
    case QPN_ERR_PARAMETER:
    case QPN_ERR_PARSE:
    case QPN_ERR_IO:
    case QPN_ERR_CAPABILITY:
    case QPN_ERR_ZERO_WEIGHT:
      return 2;
    case QPN_ERR_TRUNCATION:
    case QPN_ERR_RESOLUTION:
    case QPN_ERR_RANGE:
    case QPN_ERR_COVERAGE:
    case QPN_ERR_CONTRACT:
      return 3;
    default:
      return 1;
  }
}

// Small RAII holders for the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
};
using Filter = Handle<qpn_filter, qpn_filter_free>;
using State = Handle<qpn_state, qpn_state_free>;
using Process = Handle<qpn_process, qpn_process_free>;
using Grid = Handle<qpn_grid, qpn_grid_free>;
using Dataset = Handle<qpn_dataset, qpn_dataset_free>;
using Table = Handle<qpn_pnqd_table, qpn_pnqd_table_free>;

std::pair<double, double> parse_complex(const std::string& s) {
  double re = 0.0, im = 0.0;
  char tail = 0;
  const int n = std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail);
  if (n == 1 && s.find(',') == std::string::npos) return {re, 0.0};
  if (n != 2) throw Failure{QPN_ERR_PARSE, "expected re,im but got '" + s + "'"};
  return {re, im};
}

void report(const Grid& g, double threshold) {
  qpn_negativity r;
  check(qpn_grid_negativity(g.p, threshold, &r));
  std::printf("min %.10g at (%.6g, %.6g)", r.min_value, r.argmin_re, r.argmin_im);
  if (r.has_significance) std::printf(" significance %.3g", r.significance);
  std::printf(" -> %s\n", r.nonclassical ? "nonclassical" : "classical");
}

qpn_grid_spec grid_spec(const std::string& text) {
  qpn_grid_spec g;
  check(qpn_grid_spec_parse(text.c_str(), &g));
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filtered quasiprobabilities and process nonclassicality"};
  app.require_subcommand(1);
  std::uint64_t seed = 20170911;
  double threshold = 3.0;
  double tol = 1e-8;
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();

  auto* filter = app.add_subcommand("filter", "Tabulate the filter Omega_w");
  double width = 1.2;
  std::string out;
  filter->add_option("--width", width)->required();
  filter->add_option("--tol", tol)->capture_default_str();
  filter->add_option("--out", out)->required();
  filter->add_option("--seed", seed);

  auto* simulate = app.add_subcommand("simulate", "Simulate a homodyne dataset");
  std::string state, process, alpha, grid = "square:hw=4,n=81";
  double eta = 1.0;
  std::size_t n_total = 266000;
  int phases = 10;
  auto* sim_state = simulate->add_option("--state", state, "state descriptor");
  auto* sim_proc = simulate->add_option("--process", process, "process applied to --alpha");
  sim_state->excludes(sim_proc);
  simulate->add_option("--alpha", alpha, "probe amplitude re,im");
  simulate->add_option("--eta", eta)->capture_default_str();
  simulate->add_option("--n", n_total, "total samples")->capture_default_str();
  simulate->add_option("--phases", phases)->capture_default_str();
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out)->required();

  auto* nqd = app.add_subcommand("nqd", "Direct NQD of a state");
  nqd->add_option("--state", state)->required();
  nqd->add_option("--width", width)->required();
  nqd->add_option("--tol", tol);
  nqd->add_option("--grid", grid)->capture_default_str();
  nqd->add_option("--threshold", threshold);
  nqd->add_option("--seed", seed);
  nqd->add_option("--out", out)->required();

  auto* pnqd = app.add_subcommand("pnqd", "Direct or sampled PNQD of a process");
  std::vector<std::string> data;
  std::string stem = "pnqd";
  bool randomized = false, remove_eta = false;
  pnqd->add_option("--process", process, "process descriptor (direct route)");
  pnqd->add_option("--alpha", alpha, "coherent input re,im (direct route)");
  pnqd->add_option("--data", data, "tagged datasets (sampled route)");
  pnqd->add_option("--stem", stem)->capture_default_str();
  pnqd->add_option("--width", width)->required();
  pnqd->add_option("--tol", tol);
  pnqd->add_option("--grid", grid)->capture_default_str();
  pnqd->add_flag("--phase-randomized", randomized);
  pnqd->add_option("--threshold", threshold);
  pnqd->add_option("--seed", seed);
  pnqd->add_option("--out", out, "grid file, or directory for a sampled table")->required();

  auto* sample = app.add_subcommand("sample", "Pattern-function estimate from a dataset");
  std::string data_file;
  sample->add_option("--data", data_file)->required();
  sample->add_option("--width", width)->required();
  sample->add_option("--tol", tol);
  sample->add_option("--grid", grid)->capture_default_str();
  sample->add_flag("--phase-randomized", randomized);
  sample->add_flag("--remove-eta", remove_eta);
  sample->add_option("--threshold", threshold);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out)->required();

  auto* predict = app.add_subcommand("predict", "Output NQD for a classical input");
  std::string index, input;
  std::string predict_process = "add";
  bool parseval = false;
  predict->add_option("--pnqd", index, "PNQD index file");
  predict->add_option("--input", input, "input descriptor (thermal:nbar=.., coherent:re=..,im=.., mixture(...))");
  predict->add_option("--process", predict_process)->capture_default_str();
  predict->add_flag("--parseval", parseval, "characteristic-function route; --input is then a state descriptor");
  predict->add_option("--width", width);
  predict->add_option("--tol", tol);
  predict->add_option("--grid", grid);
  predict->add_option("--threshold", threshold);
  predict->add_option("--seed", seed);
  predict->add_option("--out", out)->required();

  auto* recipe = app.add_subcommand("recipe", "Run a named experiment");
  std::string name, overrides;
  recipe->add_option("name", name, "fig1..fig5 or custom")->required();
  recipe->add_option("--set", overrides, "JSON object overriding recipe fields");
  recipe->add_option("--seed", seed);
  recipe->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (filter->parsed()) {
      Filter f;
      check(qpn_filter_build(width, tol, &f.p));
      check(qpn_filter_write(f.p, out.c_str()));
      double b_max = 0.0;
      check(qpn_filter_b_max(f.p, &b_max));
      std::printf("w=%g b_max=%g\n", width, b_max);
    } else if (simulate->parsed()) {
      if (phases < 1) throw Failure{QPN_ERR_PARAMETER, "--phases must be >= 1"};
      if (n_total % static_cast<std::size_t>(phases) != 0)
        throw Failure{QPN_ERR_PARAMETER, "--n must be a multiple of --phases"};
      State s;
      std::vector<double> tag;
      if (!alpha.empty()) {
        const auto [re, im] = parse_complex(alpha);
        tag = {re, im};
      }
      if (!process.empty()) {
        if (tag.empty()) throw Failure{QPN_ERR_PARAMETER, "--process needs --alpha"};
        Process p;
        check(qpn_process_parse(process.c_str(), &p.p));
        check(qpn_process_apply(p.p, tag[0], tag[1], &s.p, nullptr));
      } else {
        if (state.empty()) throw Failure{QPN_ERR_PARAMETER, "one of --state or --process is required"};
        check(qpn_state_parse(state.c_str(), &s.p));
      }
      std::vector<double> ph(static_cast<std::size_t>(phases));
      check(qpn_default_phases(phases, ph.data()));
      Dataset d;
      check(qpn_dataset_simulate(s.p, ph.data(), ph.size(), n_total / static_cast<std::size_t>(phases), eta, seed,
                                 tag.empty() ? nullptr : tag.data(), &d.p));
      check(qpn_dataset_write(d.p, out.c_str()));
      std::printf("%zu samples -> %s\n", qpn_dataset_size(d.p), out.c_str());
    } else if (nqd->parsed()) {
      State s;
      Filter f;
      Grid g;
      const auto spec = grid_spec(grid);
      check(qpn_state_parse(state.c_str(), &s.p));
      check(qpn_filter_build(width, tol, &f.p));
      check(qpn_nqd_direct(s.p, f.p, &spec, &g.p));
      check(qpn_grid_write(g.p, out.c_str()));
      report(g, threshold);
    } else if (pnqd->parsed()) {
      const auto spec = grid_spec(grid);
      if (!data.empty()) {
        std::vector<Dataset> ds(data.size());
        std::vector<const qpn_dataset*> raw;
        for (std::size_t i = 0; i < data.size(); ++i) {
          check(qpn_dataset_read(data[i].c_str(), &ds[i].p));
          raw.push_back(ds[i].p);
        }
        Table t;
        check(qpn_pnqd_sample(raw.data(), raw.size(), &spec, width, tol, randomized, &t.p));
        char* path = nullptr;
        check(qpn_pnqd_table_write(t.p, out.c_str(), stem.c_str(), &path));
        std::printf("%zu amplitudes -> %s\n", qpn_pnqd_table_size(t.p), path);
        qpn_string_free(path);
      } else {
        if (process.empty() || alpha.empty())
          throw Failure{QPN_ERR_PARAMETER, "direct route needs --process and --alpha (or give --data)"};
        const auto [re, im] = parse_complex(alpha);
        Process p;
        Filter f;
        Grid g;
        check(qpn_process_parse(process.c_str(), &p.p));
        check(qpn_filter_build(width, tol, &f.p));
        if (randomized)
          check(qpn_pnqd_phase_randomized(p.p, std::hypot(re, im), f.p, &spec, &g.p));
        else
          check(qpn_pnqd_direct(p.p, re, im, f.p, &spec, &g.p));
        check(qpn_grid_write(g.p, out.c_str()));
        report(g, threshold);
      }
    } else if (sample->parsed()) {
      const auto spec = grid_spec(grid);
      Dataset d;
      Grid g;
      check(qpn_dataset_read(data_file.c_str(), &d.p));
      check(qpn_sample_nqd(d.p, &spec, width, tol, randomized, remove_eta, &g.p));
      check(qpn_grid_write(g.p, out.c_str()));
      report(g, threshold);
    } else if (predict->parsed()) {
      if (input.empty()) throw Failure{QPN_ERR_PARAMETER, "--input is required"};
      Process p;
      Grid g;
      check(qpn_process_parse(predict_process.c_str(), &p.p));
      if (parseval) {
        if (grid.empty()) throw Failure{QPN_ERR_PARAMETER, "--parseval needs --grid"};
        const auto spec = grid_spec(grid);
        State s;
        Filter f;
        check(qpn_state_parse(input.c_str(), &s.p));
        check(qpn_filter_build(width, tol, &f.p));
        check(qpn_parseval(p.p, s.p, f.p, &spec, &g.p));
      } else {
        if (index.empty()) throw Failure{QPN_ERR_PARAMETER, "--pnqd is required unless --parseval is given"};
        Table t;
        check(qpn_pnqd_table_read(index.c_str(), &t.p));
        check(qpn_predict(t.p, input.c_str(), p.p, &g.p));
      }
      check(qpn_grid_write(g.p, out.c_str()));
      report(g, threshold);
    } else if (recipe->parsed()) {
      std::string set = overrides;
      if (recipe->count("--seed") || app.count("--seed")) {
        // Merge the seed into the JSON overrides.
        const std::string s = "\"seed\":" + std::to_string(seed);
        if (set.empty()) set = "{" + s + "}";
        else {
          const auto brace = set.find('{');
          if (brace == std::string::npos) throw Failure{QPN_ERR_PARSE, "--set must be a JSON object"};
          const bool empty_obj = set.find_first_not_of(" \t\n", brace + 1) == set.find('}', brace);
          set.insert(brace + 1, empty_obj ? s : s + ",");
        }
      }
      char* manifest = nullptr;
      check(qpn_recipe_run(name.c_str(), set.empty() ? nullptr : set.c_str(), out.c_str(), &manifest));
      std::fputs(manifest, stdout);
      qpn_string_free(manifest);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", qpn_status_name(f.status), f.message.c_str());
    return exit_code(f.status);
  }
  return 0;
}
