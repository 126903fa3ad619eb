#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xva/benchmark.hpp"
#include "xva/sweep.hpp"

using namespace xva;

namespace {

SweepSpec small_spec() {
  SweepSpec spec;
  spec.base = benchmark_config();
  spec.claim = make_call(1.0, 1.0);
  spec.axis1 = {"alpha", {0.0, 0.5, 1.0}};
  spec.axis2 = SweepAxis{"r_f_minus", {0.08, 0.12}};
  spec.grid = {6.0, 101, 50};
  return spec;
}

std::string csv(const SweepSpec& spec, int threads) {
  std::ostringstream os;
  write_sweep_csv(os, spec, run_sweep(spec, threads));
  return os.str();
}

}  // namespace

TEST_CASE("spec validation happens before any solve") {
  auto spec = small_spec();
  spec.axis1.name = "beta";
  CHECK_THROWS_AS(run_sweep(spec, 1), std::invalid_argument);
  spec = small_spec();
  spec.axis2->values.clear();
  CHECK_THROWS_AS(run_sweep(spec, 1), std::invalid_argument);
  spec = small_spec();
  spec.axis2->name = "alpha";
  CHECK_THROWS_AS(run_sweep(spec, 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep_output("greeks"), std::invalid_argument);
  CHECK(parse_sweep_output("band") == SweepOutput::band);
}

TEST_CASE("rows follow axis order") {
  const auto spec = small_spec();
  const auto rows = run_sweep(spec, 4);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].value1 == 0.0);
  CHECK(*rows[0].value2 == 0.08);
  CHECK(*rows[1].value2 == 0.12);
  CHECK(rows[5].value1 == 1.0);
  for (const auto& r : rows) CHECK(r.ok);

  // Each row equals a standalone solve of the same point.
  auto cfg = spec.base;
  cfg.alpha = 0.5;
  cfg.r_f_minus = 0.12;
  const auto direct = compute_xva(spec.claim, cfg, build_grid(spec.claim, cfg, 6.0, 101, 50));
  CHECK(rows[3].report.v_plus_0 == direct.v_plus_0);
  CHECK(rows[3].report.funding_buy_0 == direct.funding_buy_0);
}

TEST_CASE("one-dimensional sweep") {
  auto spec = small_spec();
  spec.axis2.reset();
  const auto rows = run_sweep(spec, 2);
  CHECK(rows.size() == 3);
  std::ostringstream os;
  write_sweep_csv(os, spec, rows);
  std::string header;
  std::getline(std::istringstream(os.str()) >> std::ws, header);
  CHECK(header ==
        "alpha,v_hat_0,xva_sell,xva_buy,xva_sell_rel,xva_buy_rel,band_width,xi_0,xi_I_0,xi_C_0,funding_sell,"
        "funding_buy,status");
}

TEST_CASE("parallel output equals serial output") {
  const auto spec = small_spec();
  const auto serial = csv(spec, 1);
  CHECK(csv(spec, 3) == serial);
  CHECK(csv(spec, 8) == serial);
  CHECK(csv(spec, 8) == csv(spec, 8));
}

TEST_CASE("failing points are reported per row") {
  auto spec = small_spec();
  spec.axis2 = SweepAxis{"r_f_minus", {0.08, 0.5}};
  auto rows = run_sweep(spec, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK(rows[1].error.find("arbitrage") != std::string::npos);
  std::ostringstream os;
  write_sweep_csv(os, spec, rows);
  CHECK(os.str().find("\"error: ") != std::string::npos);

  spec.fatal = true;
  CHECK_THROWS_AS(run_sweep(spec, 2), ArbitrageError);
}

TEST_CASE("output selection") {
  auto spec = small_spec();
  spec.outputs = {SweepOutput::funding};
  const auto text = csv(spec, 2);
  CHECK(text.rfind("alpha,r_f_minus,v_hat_0,funding_sell,funding_buy,status\n", 0) == 0);
}

TEST_CASE("canned tables") {
  const auto t1 = table1_spec();
  CHECK(t1.axis1.values == std::vector<double>{0.0, 0.25, 0.75, 1.0});
  CHECK(t1.axis2->values == std::vector<double>{0.08, 0.2});
  CHECK(t1.solver.allow_arbitrage);
  const auto t2 = table2_spec();
  CHECK(t2.axis1.values == std::vector<double>{0.08, 0.1, 0.15, 0.2});
  CHECK_FALSE(t2.axis2.has_value());
  CHECK(t2.base.alpha == 0.9);
  CHECK(t2.base.h_C_Q == 0.15);
}

TEST_CASE("thread count from the environment") {
  setenv("XVA_THREADS", "3", 1);
  CHECK(default_thread_count() == 3);
  setenv("XVA_THREADS", "zero", 1);
  CHECK(default_thread_count() >= 1);
  unsetenv("XVA_THREADS");
}

TEST_CASE("figure panels") {
  const auto dir = std::filesystem::temp_directory_path() / "xva_figures_test";
  std::filesystem::remove_all(dir);
  const auto files = write_figures(dir.string(), benchmark_config(), {6.0, 51, 20}, 4);
  CHECK(files.size() == 12);
  std::ifstream in(dir / "fig1_xva.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "r_f_minus,alpha,xva_sell_rel,xva_buy_rel,status");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 3 * 21);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence study") {
  const auto cfg = benchmark_config();
  const auto call = make_call(1.0, 1.0);
  CHECK_THROWS_AS(convergence_study(call, cfg, 1, ConvergenceMode::linear), std::invalid_argument);

  const auto lin = convergence_study(call, cfg, 3, ConvergenceMode::linear, {6.0, 201, 100});
  REQUIRE(lin.size() == 3);
  CHECK(lin[2].n_x == 801);
  CHECK(lin[2].n_t == 400);
  CHECK_FALSE(lin[0].order.has_value());
  CHECK(*lin[2].order == doctest::Approx(2.0).epsilon(0.25));

  const auto non = convergence_study(call, cfg, 4, ConvergenceMode::nonlinear, {6.0, 101, 50});
  CHECK(non.back().error == 0.0);
  CHECK(*non[3].order >= 1.5);

  std::ostringstream os;
  write_convergence_csv(os, lin);
  CHECK(os.str().rfind("level,n_x,n_t,dx,dt,value,error,order\n", 0) == 0);
}
