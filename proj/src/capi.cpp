#include "qpn/qpn.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <new>
#include <string>

#include "qpn/error.hpp"
#include "qpn/estimator.hpp"
#include "qpn/filters.hpp"
#include "qpn/homodyne.hpp"
#include "qpn/predictor.hpp"
#include "qpn/processes.hpp"
#include "qpn/quasiprob.hpp"
#include "qpn/recipe.hpp"
#include "qpn/states.hpp"

struct qpn_filter {
  qpn::FilterSpec f;
};
struct qpn_state {
  qpn::StateModel s;
};
struct qpn_process {
  qpn::ProcessModel p;
};
struct qpn_grid {
  qpn::QuasiprobGrid g;
};
struct qpn_dataset {
  qpn::QuadratureDataset d;
};
struct qpn_pnqd_table {
  qpn::PnqdTable t;
};

namespace {

thread_local std::string g_last_error;

qpn_status status_of(qpn::ErrorKind k) {
  using qpn::ErrorKind;
  switch (k) {
    case ErrorKind::Parameter: return QPN_ERR_PARAMETER;
    case ErrorKind::Parse: return QPN_ERR_PARSE;
    case ErrorKind::Io: return QPN_ERR_IO;
    case ErrorKind::Capability: return QPN_ERR_CAPABILITY;
    case ErrorKind::Truncation: return QPN_ERR_TRUNCATION;
    case ErrorKind::Resolution: return QPN_ERR_RESOLUTION;
    case ErrorKind::Coverage: return QPN_ERR_COVERAGE;
    case ErrorKind::ZeroWeight: return QPN_ERR_ZERO_WEIGHT;
    case ErrorKind::Range: return QPN_ERR_RANGE;
    case ErrorKind::Contract: return QPN_ERR_CONTRACT;
  }
  return QPN_ERR_INTERNAL;
}

template <class F>
qpn_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return QPN_OK;
  } catch (const qpn::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return QPN_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) qpn::fail(qpn::ErrorKind::Parameter, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qpn::GridSpec to_spec(const qpn_grid_spec* g) {
  need(g, "grid spec");
  qpn::GridSpec s;
  s.layout = g->layout == QPN_LAYOUT_RADIAL ? qpn::GridSpec::Layout::Radial : qpn::GridSpec::Layout::Square;
  s.half_width = g->half_width;
  s.nx = g->nx;
  s.ny = g->ny;
  s.validate();
  return s;
}

qpn_grid_spec from_spec(const qpn::GridSpec& s) {
  return {s.layout == qpn::GridSpec::Layout::Radial ? QPN_LAYOUT_RADIAL : QPN_LAYOUT_SQUARE, s.half_width, s.nx,
          s.ny};
}

qpn_status emit_grid(qpn::QuasiprobGrid g, qpn_grid** out) {
  *out = new qpn_grid{std::move(g)};
  return QPN_OK;
}

}  // namespace

extern "C" {

const char* qpn_last_error(void) { return g_last_error.c_str(); }

const char* qpn_status_name(qpn_status s) {
  switch (s) {
    case QPN_OK: return "ok";
    case QPN_ERR_PARAMETER: return "parameter";
    case QPN_ERR_PARSE: return "parse";
    case QPN_ERR_IO: return "io";
    case QPN_ERR_CAPABILITY: return "capability";
    case QPN_ERR_TRUNCATION: return "truncation";
    case QPN_ERR_RESOLUTION: return "resolution";
    case QPN_ERR_COVERAGE: return "coverage";
    case QPN_ERR_ZERO_WEIGHT: return "zero-weight";
    case QPN_ERR_RANGE: return "range";
    case QPN_ERR_CONTRACT: return "contract";
    case QPN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qpn_version(void) { return "0.1.0"; }

void qpn_string_free(char* s) { std::free(s); }

qpn_status qpn_filter_build(double width, double tol, qpn_filter** out) {
  return guard([&] {
    need(out, "out");
    *out = new qpn_filter{qpn::build_filter(width, tol)};
  });
}

void qpn_filter_free(qpn_filter* f) { delete f; }

qpn_status qpn_filter_b_max(const qpn_filter* f, double* out) {
  return guard([&] {
    need(f, "filter");
    need(out, "out");
    *out = f->f.b_max();
  });
}

qpn_status qpn_filter_value(const qpn_filter* f, double b, double* out) {
  return guard([&] {
    need(f, "filter");
    need(out, "out");
    *out = f->f.value(b);
  });
}

qpn_status qpn_filter_fourier(const qpn_filter* f, const double* r, size_t n, double* out) {
  return guard([&] {
    need(f, "filter");
    need(r, "r");
    need(out, "out");
    const auto v = qpn::filter_fourier(f->f, {r, n});
    std::copy(v.begin(), v.end(), out);
  });
}

qpn_status qpn_filter_write(const qpn_filter* f, const char* path) {
  return guard([&] {
    need(f, "filter");
    need(path, "path");
    qpn::write_filter_csv(f->f, path);
  });
}

qpn_status qpn_state_parse(const char* descriptor, qpn_state** out) {
  return guard([&] {
    need(descriptor, "descriptor");
    need(out, "out");
    *out = new qpn_state{qpn::parse_state(descriptor)};
  });
}

void qpn_state_free(qpn_state* s) { delete s; }

qpn_status qpn_state_describe(const qpn_state* s, char** out) {
  return guard([&] {
    need(s, "state");
    need(out, "out");
    *out = dup_string(s->s.describe());
  });
}

qpn_status qpn_state_mean_photon_number(const qpn_state* s, double* out) {
  return guard([&] {
    need(s, "state");
    need(out, "out");
    *out = qpn::mean_photon_number(s->s);
  });
}

qpn_status qpn_process_parse(const char* descriptor, qpn_process** out) {
  return guard([&] {
    need(descriptor, "descriptor");
    need(out, "out");
    *out = new qpn_process{qpn::parse_process(descriptor)};
  });
}

void qpn_process_free(qpn_process* p) { delete p; }

qpn_status qpn_process_apply(const qpn_process* p, double alpha_re, double alpha_im, qpn_state** out,
                             double* weight) {
  return guard([&] {
    need(p, "process");
    need(out, "out");
    auto r = qpn::apply_to_coherent(p->p, {alpha_re, alpha_im});
    if (weight) *weight = r.weight;
    *out = new qpn_state{std::move(r.state)};
  });
}

qpn_status qpn_process_weight(const qpn_process* p, double a, double* out) {
  return guard([&] {
    need(p, "process");
    need(out, "out");
    *out = qpn::process_weight(p->p, a);
  });
}

qpn_status qpn_fixed_point_check(const qpn_process* p, double nbar, int cutoff, double* trace_distance) {
  return guard([&] {
    need(p, "process");
    need(trace_distance, "out");
    *trace_distance = qpn::fixed_point_check(p->p, nbar, cutoff);
  });
}

qpn_status qpn_classicality_threshold(double nbar, double* gt) {
  return guard([&] {
    need(gt, "out");
    *gt = qpn::classicality_threshold(nbar);
  });
}

qpn_status qpn_grid_spec_parse(const char* text, qpn_grid_spec* out) {
  return guard([&] {
    need(text, "grid text");
    need(out, "out");
    const std::string t = text;
    const auto colon = t.find(':');
    const std::string kind = t.substr(0, colon);
    if (kind != "square" && kind != "radial") qpn::fail(qpn::ErrorKind::Parse, "grid must be square:... or radial:...");
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
      std::size_t pos = colon + 1;
      while (pos <= t.size()) {
        const auto comma = std::min(t.find(',', pos), t.size());
        const std::string item = t.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) qpn::fail(qpn::ErrorKind::Parse, "expected key=value in grid '" + t + "'");
        kv[item.substr(0, eq)] = qpn::parse_double(item.substr(eq + 1));
        pos = comma + 1;
      }
    }
    auto get = [&](const char* k, double fallback) {
      auto it = kv.find(k);
      if (it == kv.end()) return fallback;
      double v = it->second;
      kv.erase(it);
      return v;
    };
    auto as_int = [](double v) {
      if (v != std::floor(v) || v < 1 || v > 1e6) qpn::fail(qpn::ErrorKind::Parse, "grid counts must be positive integers");
      return static_cast<int>(v);
    };
    qpn::GridSpec s;
    if (kind == "radial") {
      const double r = get("r", get("hw", 3.0));
      s = qpn::GridSpec::radial(r, as_int(get("n", 61)));
    } else {
      const double hw = get("hw", 4.0);
      const int n = as_int(get("n", 81));
      s = qpn::GridSpec::square(hw, n);
      s.nx = as_int(get("nx", n));
      s.ny = as_int(get("ny", n));
    }
    if (!kv.empty()) qpn::fail(qpn::ErrorKind::Parse, "unknown grid key '" + kv.begin()->first + "'");
    s.validate();
    *out = from_spec(s);
  });
}

qpn_status qpn_nqd_direct(const qpn_state* s, const qpn_filter* f, const qpn_grid_spec* g, qpn_grid** out) {
  return guard([&] {
    need(s, "state");
    need(f, "filter");
    need(out, "out");
    emit_grid(qpn::nqd_direct(s->s, f->f, to_spec(g)), out);
  });
}

qpn_status qpn_pnqd_direct(const qpn_process* p, double alpha_re, double alpha_im, const qpn_filter* f,
                           const qpn_grid_spec* g, qpn_grid** out) {
  return guard([&] {
    need(p, "process");
    need(f, "filter");
    need(out, "out");
    emit_grid(qpn::pnqd_direct(p->p, {alpha_re, alpha_im}, f->f, to_spec(g)), out);
  });
}

qpn_status qpn_pnqd_phase_randomized(const qpn_process* p, double a, const qpn_filter* f, const qpn_grid_spec* g,
                                     qpn_grid** out) {
  return guard([&] {
    need(p, "process");
    need(f, "filter");
    need(out, "out");
    emit_grid(qpn::pnqd_phase_randomized(p->p, a, f->f, to_spec(g)), out);
  });
}

qpn_status qpn_grid_read(const char* path, qpn_grid** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    emit_grid(qpn::read_grid_csv(path), out);
  });
}

qpn_status qpn_grid_write(const qpn_grid* g, const char* path) {
  return guard([&] {
    need(g, "grid");
    need(path, "path");
    qpn::write_grid_csv(g->g, std::string(path));
  });
}

void qpn_grid_free(qpn_grid* g) { delete g; }

size_t qpn_grid_size(const qpn_grid* g) { return g ? g->g.values.size() : 0; }

qpn_status qpn_grid_spec_of(const qpn_grid* g, qpn_grid_spec* out) {
  return guard([&] {
    need(g, "grid");
    need(out, "out");
    *out = from_spec(g->g.spec);
  });
}

qpn_status qpn_grid_point(const qpn_grid* g, size_t i, double* re, double* im) {
  return guard([&] {
    need(g, "grid");
    need(re, "re");
    need(im, "im");
    if (i >= g->g.values.size()) qpn::fail(qpn::ErrorKind::Parameter, "grid index out of range");
    const auto z = g->g.spec.point(i);
    *re = z.real();
    *im = z.imag();
  });
}

const double* qpn_grid_values(const qpn_grid* g) { return g ? g->g.values.data() : nullptr; }

const double* qpn_grid_stat_err(const qpn_grid* g) {
  return g && !g->g.stat_err.empty() ? g->g.stat_err.data() : nullptr;
}

const double* qpn_grid_sys_err(const qpn_grid* g) { return g && !g->g.sys_err.empty() ? g->g.sys_err.data() : nullptr; }

qpn_status qpn_grid_mass(const qpn_grid* g, double* out) {
  return guard([&] {
    need(g, "grid");
    need(out, "out");
    *out = g->g.mass();
  });
}

qpn_status qpn_grid_source(const qpn_grid* g, char** out) {
  return guard([&] {
    need(g, "grid");
    need(out, "out");
    *out = dup_string(g->g.source);
  });
}

qpn_status qpn_grid_negativity(const qpn_grid* g, double threshold, qpn_negativity* out) {
  return guard([&] {
    need(g, "grid");
    need(out, "out");
    const auto r = qpn::negativity_scan(g->g, threshold);
    *out = {r.min_value, r.argmin.real(), r.argmin.imag(), r.significance.has_value(),
            r.significance.value_or(0.0), r.nonclassical};
  });
}

qpn_status qpn_default_phases(int k, double* out) {
  return guard([&] {
    need(out, "out");
    const auto p = qpn::default_phases(k);
    std::copy(p.begin(), p.end(), out);
  });
}

qpn_status qpn_dataset_simulate(const qpn_state* s, const double* phases, size_t n_phases, size_t n_per_phase,
                                double eta, uint64_t seed, const double* alpha_tag, qpn_dataset** out) {
  return guard([&] {
    need(s, "state");
    need(phases, "phases");
    need(out, "out");
    std::optional<qpn::cplx> tag;
    if (alpha_tag) tag = qpn::cplx(alpha_tag[0], alpha_tag[1]);
    *out = new qpn_dataset{qpn::simulate_dataset(s->s, {phases, n_phases}, n_per_phase, eta, seed, tag)};
  });
}

qpn_status qpn_dataset_read(const char* path, qpn_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new qpn_dataset{qpn::read_dataset(path)};
  });
}

qpn_status qpn_dataset_write(const qpn_dataset* d, const char* path) {
  return guard([&] {
    need(d, "dataset");
    need(path, "path");
    qpn::write_dataset(d->d, path);
  });
}

void qpn_dataset_free(qpn_dataset* d) { delete d; }

size_t qpn_dataset_size(const qpn_dataset* d) { return d ? d->d.size() : 0; }

qpn_status qpn_dataset_sample(const qpn_dataset* d, size_t i, double* x, double* phi) {
  return guard([&] {
    need(d, "dataset");
    need(x, "x");
    need(phi, "phi");
    if (i >= d->d.size()) qpn::fail(qpn::ErrorKind::Parameter, "sample index out of range");
    *x = d->d.x[i];
    *phi = d->d.phi[i];
  });
}

qpn_status qpn_dataset_eta(const qpn_dataset* d, double* out) {
  return guard([&] {
    need(d, "dataset");
    need(out, "out");
    *out = d->d.meta.eta;
  });
}

qpn_status qpn_pattern_fn(double x, double phi, double beta_re, double beta_im, const qpn_filter* f, double* out) {
  return guard([&] {
    need(f, "filter");
    need(out, "out");
    *out = qpn::pattern_fn(x, phi, {beta_re, beta_im}, f->f);
  });
}

qpn_status qpn_sample_nqd(const qpn_dataset* d, const qpn_grid_spec* g, double width, double tol,
                          int phase_randomized, int remove_eta, qpn_grid** out) {
  return guard([&] {
    need(d, "dataset");
    need(out, "out");
    const auto spec = to_spec(g);
    if (remove_eta) {
      emit_grid(qpn::sample_nqd_eta_removed(d->d, spec, width, tol, phase_randomized != 0), out);
      return;
    }
    const auto f = qpn::build_filter(width, tol);
    emit_grid(phase_randomized ? qpn::sample_pnqd_randomized(d->d, spec, f) : qpn::sample_nqd(d->d, spec, f), out);
  });
}

qpn_status qpn_pnqd_sample(const qpn_dataset* const* datasets, size_t n, const qpn_grid_spec* g, double width,
                           double tol, int phase_randomized, qpn_pnqd_table** out) {
  return guard([&] {
    need(datasets, "datasets");
    need(out, "out");
    std::vector<qpn::QuadratureDataset> ds;
    ds.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      need(datasets[i], "dataset");
      ds.push_back(datasets[i]->d);
    }
    *out = new qpn_pnqd_table{qpn::sample_pnqd(ds, to_spec(g), width, tol, phase_randomized != 0)};
  });
}

qpn_status qpn_pnqd_table_write(const qpn_pnqd_table* t, const char* dir, const char* stem, char** index_path) {
  return guard([&] {
    need(t, "table");
    need(dir, "dir");
    need(stem, "stem");
    const auto p = qpn::write_pnqd_table(t->t, dir, stem);
    if (index_path) *index_path = dup_string(p);
  });
}

qpn_status qpn_pnqd_table_read(const char* index_path, qpn_pnqd_table** out) {
  return guard([&] {
    need(index_path, "index path");
    need(out, "out");
    *out = new qpn_pnqd_table{qpn::read_pnqd_table(index_path)};
  });
}

void qpn_pnqd_table_free(qpn_pnqd_table* t) { delete t; }

size_t qpn_pnqd_table_size(const qpn_pnqd_table* t) { return t ? t->t.amplitudes.size() : 0; }

qpn_status qpn_predict(const qpn_pnqd_table* t, const char* input, const qpn_process* p, qpn_grid** out) {
  return guard([&] {
    need(t, "table");
    need(input, "input");
    need(p, "process");
    need(out, "out");
    const auto in = qpn::parse_input(input);
    const qpn::ProcessModel proc = p->p;
    emit_grid(qpn::predict_output_nqd(t->t, in, [&proc](double a) { return qpn::process_weight(proc, a); }), out);
  });
}

qpn_status qpn_parseval(const qpn_process* p, const qpn_state* input, const qpn_filter* f, const qpn_grid_spec* g,
                        qpn_grid** out) {
  return guard([&] {
    need(p, "process");
    need(input, "input");
    need(f, "filter");
    need(out, "out");
    emit_grid(qpn::parseval_output_nqd(p->p, input->s, f->f, to_spec(g)), out);
  });
}

qpn_status qpn_recipe_run(const char* name, const char* overrides, const char* out_dir, char** manifest) {
  return guard([&] {
    need(name, "recipe name");
    auto c = qpn::default_recipe(name);
    if (out_dir) c.out_dir = out_dir;
    if (overrides) qpn::apply_overrides(c, overrides);
    const auto text = qpn::run_recipe(c);
    if (manifest) *manifest = dup_string(text);
  });
}

}  // extern "C"
