#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xva/benchmark.hpp"
#include "xva/oracle.hpp"
#include "xva/xva.hpp"

using namespace xva;

namespace {

SolverConfig permissive() {
  SolverConfig s;
  s.allow_arbitrage = true;
  return s;
}

double norm_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("benchmark report") {
  const auto cfg = benchmark_config();
  const auto call = make_call(1.0, 1.0);
  const auto run = run_xva(call, cfg, build_grid(call, cfg));
  const auto& r = run.report;
  CHECK(r.xva_sell > 0.0);
  CHECK(r.band_width >= 0.0);
  CHECK(r.xva_sell == r.v_plus_0 - r.v_hat_0);
  CHECK(r.xva_buy == r.v_minus_0 - r.v_hat_0);
  CHECK(r.band_width == doctest::Approx(r.xva_sell - r.xva_buy).epsilon(1e-12));
  CHECK(r.relative_sell() == doctest::Approx(r.xva_sell / r.v_hat_0));
  CHECK(r.relative_buy() == doctest::Approx(r.xva_buy / r.v_hat_0));
  CHECK(r.v_hat_0 == doctest::Approx(bs_closed_form(0.0, 1.0, call, cfg.r_D, cfg.sigma)).epsilon(1e-4));

  // The reported hedges are read back from the surfaces they came from.
  for (const auto& [surface, hedge] : {std::pair{&run.seller, r.hedge_sell}, std::pair{&run.buyer, r.hedge_buy}}) {
    const auto again = hedge_at(*surface, run.benchmark, cfg, 0.0, 1.0);
    CHECK(again.z_I == hedge.z_I);
    CHECK(again.z_C == hedge.z_C);
    CHECK(hedge.z_I == closeout_I(hedge.v_hat, cfg.alpha, cfg.L_I) - hedge.v);
    CHECK(hedge.z_C == closeout_C(hedge.v_hat, cfg.alpha, cfg.L_C) - hedge.v);
    CHECK(hedge.z == doctest::Approx(cfg.sigma * 1.0 * hedge.xi));
  }
  CHECK(r.funding_sell_0 == doctest::Approx(r.hedge_sell.funding_value).epsilon(1e-12));
  CHECK(r.funding_buy_0 == doctest::Approx(r.hedge_buy.funding_value).epsilon(1e-12));

  const auto j = to_json(r);
  CHECK(j.contains("band_width"));
  CHECK(j["hedge_sell"].contains("xi_C"));
}

TEST_CASE("symmetric rates give equal seller and buyer adjustments") {
  auto cfg = benchmark_config();
  cfg.r_f_minus = cfg.r_f_plus;
  cfg.r_r_minus = cfg.r_r_plus;
  cfg.r_c_minus = cfg.r_c_plus;
  const auto call = make_call(1.0, 1.0);
  const auto r = compute_xva(call, cfg, build_grid(call, cfg, 6.0, 401, 200), permissive());
  CHECK(std::abs(r.xva_sell - r.xva_buy) < 1e-8);
}

TEST_CASE("collapsed rates give zero adjustment") {
  const auto cfg = symmetrized(benchmark_config());
  const auto call = make_call(1.0, 1.0);
  const auto r = compute_xva(call, cfg, build_grid(call, cfg, 6.0, 401, 200), permissive());
  CHECK(std::abs(r.xva_sell) < 1e-8);
  CHECK(std::abs(r.xva_buy) < 1e-8);
}

TEST_CASE("zero claim gives an all-zero report") {
  const auto cfg = benchmark_config();
  const auto zero = make_custom({{0.0, 0.0}, {2.0, 0.0}}, 1.0);
  const auto r = compute_xva(zero, cfg, build_grid(zero, cfg, 6.0, 101, 50));
  CHECK(r.v_hat_0 == 0.0);
  CHECK(r.xva_sell == 0.0);
  CHECK(r.xva_buy == 0.0);
  CHECK(r.band_width == 0.0);
  CHECK(r.funding_sell_0 == 0.0);
  CHECK(r.funding_buy_0 == 0.0);
  CHECK(r.hedge_sell.xi == 0.0);
  CHECK_FALSE(r.xva_sell_rel.has_value());
  CHECK_THROWS_AS(r.relative_sell(), std::domain_error);
  CHECK_THROWS_AS(r.relative_buy(), std::domain_error);
  CHECK(to_json(r)["xva_sell_rel"].is_null());
}

TEST_CASE("linear-case delta") {
  const auto cfg = symmetrized(benchmark_config());
  auto linear = cfg;
  linear.h_I_Q = linear.h_C_Q = 0.0;
  const auto call = make_call(1.0, 1.0);
  const auto run = run_xva(call, linear, build_grid(call, linear), permissive());
  const double n_d1 = norm_cdf(0.15);
  CHECK(n_d1 == doctest::Approx(0.5596).epsilon(1e-4));
  CHECK(std::abs(run.report.hedge_sell.xi - n_d1) < 5e-3);
  CHECK(std::abs(run.report.hedge_buy.xi - n_d1) < 5e-3);
}

TEST_CASE("full collateral makes both default integrands equal") {
  auto cfg = benchmark_config();
  cfg.alpha = 1.0;
  const auto call = make_call(1.0, 1.0);
  const auto run = run_xva(call, cfg, build_grid(call, cfg, 6.0, 201, 100));
  for (double s : {0.8, 1.0, 1.25}) {
    const auto h = hedge_at(run.seller, run.benchmark, cfg, 0.3, s);
    CHECK(h.z_I == h.z_C);
    CHECK(h.z_I == h.v_hat - h.v);
  }
}

TEST_CASE("bond holdings at maturity carry no discounting") {
  const auto cfg = benchmark_config();
  const auto call = make_call(1.0, 1.0);
  const auto run = run_xva(call, cfg, build_grid(call, cfg, 6.0, 201, 100));
  const auto h = hedge_at(run.seller, run.benchmark, cfg, 1.0, 1.1);
  CHECK(h.xi_I == doctest::Approx(h.v - closeout_I(h.v_hat, cfg.alpha, cfg.L_I)).epsilon(1e-14));
  CHECK(h.xi_C == doctest::Approx(h.v - closeout_C(h.v_hat, cfg.alpha, cfg.L_C)).epsilon(1e-14));
  CHECK_THROWS_AS(hedge_at(run.seller, run.benchmark, cfg, 0.0, 100.0), std::out_of_range);
  CHECK_THROWS_AS(hedge_at(run.seller, run.benchmark, cfg, 0.0, -1.0), std::out_of_range);
}

TEST_CASE("funding account collapses to the benchmark price") {
  auto cfg = symmetrized(benchmark_config());
  cfg.alpha = 0.0;
  const auto call = make_call(1.0, 1.0);
  const auto run = run_xva(call, cfg, build_grid(call, cfg, 6.0, 201, 100), permissive());
  // theta_I = theta_C = v = v_hat, no collateral: 2 v_hat - v_hat.
  CHECK(funding_account_0(Side::seller, run) == doctest::Approx(run.report.v_hat_0).epsilon(1e-8));
  CHECK(funding_account_0(Side::buyer, run) == doctest::Approx(run.report.v_hat_0).epsilon(1e-8));
}

TEST_CASE("seller adjustment falls as counterparty risk rises") {
  auto cfg = benchmark_config();
  const auto call = make_call(1.0, 1.0);
  double prev = 1e300;
  for (double h : {0.10, 0.15, 0.25}) {
    cfg.h_C_Q = h;
    const auto r = compute_xva(call, cfg, build_grid(call, cfg, 6.0, 401, 200), permissive());
    CHECK(r.xva_sell <= prev);
    prev = r.xva_sell;
  }
}

TEST_CASE("band stays nonnegative over admissible configurations") {
  const auto call = make_call(1.0, 1.0);
  for (double alpha : {0.0, 0.5, 1.0}) {
    for (double rfm : {0.05, 0.1, 0.16}) {
      auto cfg = benchmark_config();
      cfg.alpha = alpha;
      cfg.r_f_minus = rfm;
      REQUIRE(validate_no_arbitrage(cfg).empty());
      const auto r = compute_xva(call, cfg, build_grid(call, cfg, 6.0, 201, 100));
      CHECK(r.band_width >= -1e-8);
    }
  }
}

TEST_CASE("config serialisation") {
  const auto j = to_json(benchmark_config());
  CHECK(j.size() == 15);
  CHECK(j["alpha"] == 0.9);
}
