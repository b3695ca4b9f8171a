#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "qpn/qpn.h"

namespace {
std::string tmp(const char* name) {
  std::filesystem::create_directories(QPN_TEST_TMP);
  return std::string(QPN_TEST_TMP) + "/capi_" + name;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  qpn_string_free(s);
  return out;
}
}  // namespace

TEST_CASE("status reporting") {
  CHECK(std::string(qpn_status_name(QPN_OK)) == "ok");
  CHECK(std::strlen(qpn_version()) > 0);
  qpn_filter* f = nullptr;
  CHECK(qpn_filter_build(-1.0, 1e-8, &f) == QPN_ERR_PARAMETER);
  CHECK(f == nullptr);
  CHECK(std::strlen(qpn_last_error()) > 0);
  CHECK(qpn_filter_build(1.2, 1e-8, nullptr) == QPN_ERR_PARAMETER);
  qpn_state* s = nullptr;
  CHECK(qpn_state_parse("fock:n=one", &s) == QPN_ERR_PARSE);
  qpn_filter_free(nullptr);
  qpn_grid_free(nullptr);
}

TEST_CASE("filter") {
  qpn_filter* f = nullptr;
  REQUIRE(qpn_filter_build(1.2, 1e-8, &f) == QPN_OK);
  double b = 0.0, v = 0.0;
  CHECK(qpn_filter_b_max(f, &b) == QPN_OK);
  CHECK(b == doctest::Approx(4.56).epsilon(0.01));
  CHECK(qpn_filter_value(f, 0.0, &v) == QPN_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(qpn_filter_value(f, 1.2, &v) == QPN_OK);
  CHECK(v == doctest::Approx(0.4757781908076831).epsilon(1e-9));
  const double r[3] = {0.0, 0.5, 1.0};
  double ft[3];
  CHECK(qpn_filter_fourier(f, r, 3, ft) == QPN_OK);
  CHECK(ft[0] > ft[1]);
  CHECK(qpn_filter_write(f, tmp("filter.csv").c_str()) == QPN_OK);
  qpn_filter_free(f);
}

TEST_CASE("states, processes and direct grids") {
  qpn_state* s = nullptr;
  REQUIRE(qpn_state_parse("added(thermal:nbar=0.5)", &s) == QPN_OK);
  char* d = nullptr;
  CHECK(qpn_state_describe(s, &d) == QPN_OK);
  CHECK(take(d) == "added(thermal:nbar=0.5)");
  double n = 0.0;
  CHECK(qpn_state_mean_photon_number(s, &n) == QPN_OK);
  CHECK(n == doctest::Approx(2.0));

  qpn_filter* f = nullptr;
  qpn_filter_build(1.2, 1e-8, &f);
  qpn_grid_spec spec;
  CHECK(qpn_grid_spec_parse("square:hw=4,n=41", &spec) == QPN_OK);
  CHECK(spec.nx == 41);
  CHECK(qpn_grid_spec_parse("hexagon:r=1", &spec) == QPN_ERR_PARSE);
  CHECK(qpn_grid_spec_parse("radial:r=3,n=13", &spec) == QPN_OK);
  CHECK(spec.layout == QPN_LAYOUT_RADIAL);
  qpn_grid* g = nullptr;
  REQUIRE(qpn_nqd_direct(s, f, &spec, &g) == QPN_OK);
  CHECK(qpn_grid_size(g) == 13);
  CHECK(qpn_grid_values(g)[0] == doctest::Approx(-0.13290047382503212).epsilon(1e-9));
  CHECK(qpn_grid_stat_err(g) == nullptr);
  qpn_negativity neg;
  CHECK(qpn_grid_negativity(g, 3.0, &neg) == QPN_OK);
  CHECK(neg.nonclassical == 1);
  CHECK(neg.has_significance == 0);
  CHECK(qpn_grid_write(g, tmp("grid.csv").c_str()) == QPN_OK);
  qpn_grid* back = nullptr;
  CHECK(qpn_grid_read(tmp("grid.csv").c_str(), &back) == QPN_OK);
  CHECK(qpn_grid_values(back)[3] == qpn_grid_values(g)[3]);
  qpn_grid_free(back);
  qpn_grid_free(g);

  CHECK(qpn_grid_spec_parse("square:hw=4,n=11", &spec) == QPN_OK);
  CHECK(qpn_nqd_direct(s, f, &spec, &g) == QPN_ERR_RESOLUTION);

  qpn_process* p = nullptr;
  REQUIRE(qpn_process_parse("subtract", &p) == QPN_OK);
  qpn_state* out = nullptr;
  double w = 0.0;
  CHECK(qpn_process_apply(p, 0.0, 0.0, &out, &w) == QPN_ERR_ZERO_WEIGHT);
  CHECK(qpn_process_apply(p, 1.0, 0.0, &out, &w) == QPN_OK);
  CHECK(w == doctest::Approx(1.0));
  qpn_state_free(out);
  qpn_process_free(p);

  double gt = 0.0;
  CHECK(qpn_classicality_threshold(1.0, &gt) == QPN_OK);
  CHECK(gt == doctest::Approx(0.5 * std::log(2.0)));
  REQUIRE(qpn_process_parse("kerrcat", &p) == QPN_OK);
  double td = 1.0;
  CHECK(qpn_fixed_point_check(p, 0.5, 60, &td) == QPN_OK);
  CHECK(td <= 1e-8);
  qpn_process_free(p);
  qpn_state_free(s);
  qpn_filter_free(f);
}

TEST_CASE("sampling and prediction") {
  qpn_process* add = nullptr;
  REQUIRE(qpn_process_parse("add", &add) == QPN_OK);
  double phases[10];
  REQUIRE(qpn_default_phases(10, phases) == QPN_OK);
  const double amps[5] = {0.0, 0.6, 1.2, 1.8, 2.4};
  qpn_dataset* sets[5];
  for (int j = 0; j < 5; ++j) {
    qpn_state* s = nullptr;
    double w = 0.0;
    REQUIRE(qpn_process_apply(add, amps[j], 0.0, &s, &w) == QPN_OK);
    const double tag[2] = {amps[j], 0.0};
    REQUIRE(qpn_dataset_simulate(s, phases, 10, 100, 1.0, 10 + j, tag, &sets[j]) == QPN_OK);
    qpn_state_free(s);
  }
  CHECK(qpn_dataset_size(sets[0]) == 1000);
  CHECK(qpn_dataset_write(sets[0], tmp("data.csv").c_str()) == QPN_OK);
  qpn_dataset* back = nullptr;
  REQUIRE(qpn_dataset_read(tmp("data.csv").c_str(), &back) == QPN_OK);
  double x0, p0, x1, p1;
  qpn_dataset_sample(sets[0], 5, &x0, &p0);
  qpn_dataset_sample(back, 5, &x1, &p1);
  CHECK(x0 == x1);
  CHECK(p0 == p1);
  CHECK(qpn_dataset_sample(back, 1000, &x1, &p1) == QPN_ERR_PARAMETER);
  qpn_dataset_free(back);

  qpn_grid_spec spec;
  qpn_grid_spec_parse("radial:r=2,n=5", &spec);
  qpn_grid* g = nullptr;
  REQUIRE(qpn_sample_nqd(sets[0], &spec, 1.2, 1e-8, 1, 0, &g) == QPN_OK);
  CHECK(qpn_grid_stat_err(g) != nullptr);
  qpn_grid_free(g);

  qpn_pnqd_table* t = nullptr;
  REQUIRE(qpn_pnqd_sample(sets, 5, &spec, 1.2, 1e-8, 1, &t) == QPN_OK);
  CHECK(qpn_pnqd_table_size(t) == 5);
  char* index = nullptr;
  REQUIRE(qpn_pnqd_table_write(t, tmp("table").c_str(), "pa", &index) == QPN_OK);
  qpn_pnqd_table* t2 = nullptr;
  REQUIRE(qpn_pnqd_table_read(index, &t2) == QPN_OK);
  qpn_string_free(index);
  qpn_grid* pred = nullptr;
  REQUIRE(qpn_predict(t2, "thermal:nbar=0.5", add, &pred) == QPN_OK);
  CHECK(qpn_grid_sys_err(pred) != nullptr);
  CHECK(qpn_predict(t2, "thermal:nbar=2", add, &pred) == QPN_ERR_COVERAGE);
  CHECK(qpn_predict(t2, "thermal:nbar", add, &pred) == QPN_ERR_PARSE);
  qpn_grid_free(pred);
  qpn_pnqd_table_free(t2);
  qpn_pnqd_table_free(t);
  for (auto* d : sets) qpn_dataset_free(d);
  qpn_process_free(add);
}

TEST_CASE("recipes") {
  char* manifest = nullptr;
  CHECK(qpn_recipe_run("custom", R"({"grid": {"layout": "radial", "half_width": 1, "n": 5}})", tmp("recipe").c_str(),
                       &manifest) == QPN_OK);
  CHECK(take(manifest).find("\"recipe\": \"custom\"") != std::string::npos);
  CHECK(qpn_recipe_run("custom", R"({"bogus": 1})", tmp("recipe").c_str(), &manifest) == QPN_ERR_PARSE);
  CHECK(qpn_recipe_run("fig7", nullptr, tmp("recipe").c_str(), &manifest) == QPN_ERR_PARAMETER);
}
