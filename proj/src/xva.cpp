#include "xva/xva.hpp"

#include <cmath>
#include <stdexcept>

namespace xva {

namespace {

constexpr double kRelativeFloor = 1e-12;

}  // namespace

std::string to_string(Side side) { return side == Side::seller ? "seller" : "buyer"; }

Side parse_side(const std::string& name) {
  if (name == "seller") return Side::seller;
  if (name == "buyer") return Side::buyer;
  throw std::invalid_argument("unknown side '" + name + "' (expected seller or buyer)");
}

double XvaReport::relative_sell() const {
  if (!xva_sell_rel) throw std::domain_error("relative XVA undefined: benchmark price is zero");
  return *xva_sell_rel;
}

double XvaReport::relative_buy() const {
  if (!xva_buy_rel) throw std::domain_error("relative XVA undefined: benchmark price is zero");
  return *xva_buy_rel;
}

HedgeSnapshot hedge_at(const Surface& surface, const BenchmarkSurface& benchmark, const MarketConfig& cfg, double t,
                       double s) {
  if (!(s > 0.0)) throw std::out_of_range("hedge_at: spot must be > 0");
  const double x = std::log(s);
  const double tau = surface.grid.maturity - t;
  HedgeSnapshot h;
  h.v = surface.value_at(t, x);
  h.v_hat = benchmark.value_at(t, x);
  const double w_x = surface.derivative_at(t, x);
  h.xi = w_x / s;
  h.z = cfg.sigma * s * h.xi;
  const double th_I = closeout_I(h.v_hat, cfg.alpha, cfg.L_I);
  const double th_C = closeout_C(h.v_hat, cfg.alpha, cfg.L_C);
  h.z_I = th_I - h.v;
  h.z_C = th_C - h.v;
  h.xi_I = (h.v - th_I) * std::exp((cfg.r_D + cfg.h_I_Q) * tau);
  h.xi_C = (h.v - th_C) * std::exp((cfg.r_D + cfg.h_C_Q) * tau);
  h.funding_value = h.v + h.z_I + h.z_C - collateral(h.v_hat, cfg.alpha);
  return h;
}

double funding_account_0(Side side, const XvaRun& run) {
  const auto& r = run.report;
  const double v0 = side == Side::seller ? r.v_plus_0 : r.v_minus_0;
  const double th_I = closeout_I(r.v_hat_0, run.cfg.alpha, run.cfg.L_I);
  const double th_C = closeout_C(r.v_hat_0, run.cfg.alpha, run.cfg.L_C);
  return th_I + th_C - v0 - collateral(r.v_hat_0, run.cfg.alpha);
}

XvaRun run_xva(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid, const SolverConfig& solver_cfg) {
  claim.validate();
  cfg.validate();
  if (!solver_cfg.allow_arbitrage) require_no_arbitrage(cfg);

  XvaRun run;
  run.claim = claim;
  run.cfg = cfg;
  run.benchmark = benchmark_surface(grid, claim, cfg, solver_cfg);
  run.seller = solve_semilinear(claim, cfg, grid, solver_cfg, Side::seller, run.benchmark, &run.seller_diagnostics);
  run.buyer = solve_semilinear(claim, cfg, grid, solver_cfg, Side::buyer, run.benchmark, &run.buyer_diagnostics);

  auto& r = run.report;
  r.hedge_sell = hedge_at(run.seller, run.benchmark, cfg, 0.0, claim.spot);
  r.hedge_buy = hedge_at(run.buyer, run.benchmark, cfg, 0.0, claim.spot);
  r.v_hat_0 = r.hedge_sell.v_hat;
  r.v_plus_0 = r.hedge_sell.v;
  r.v_minus_0 = r.hedge_buy.v;
  r.xva_sell = r.v_plus_0 - r.v_hat_0;
  r.xva_buy = r.v_minus_0 - r.v_hat_0;
  r.band_width = r.v_plus_0 - r.v_minus_0;
  if (std::abs(r.v_hat_0) > kRelativeFloor) {
    r.xva_sell_rel = r.xva_sell / r.v_hat_0;
    r.xva_buy_rel = r.xva_buy / r.v_hat_0;
  }
  r.funding_sell_0 = funding_account_0(Side::seller, run);
  r.funding_buy_0 = funding_account_0(Side::buyer, run);
  return run;
}

XvaReport compute_xva(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
                      const SolverConfig& solver_cfg) {
  return run_xva(claim, cfg, grid, solver_cfg).report;
}

nlohmann::json to_json(const HedgeSnapshot& h) {
  return {{"v", h.v},         {"v_hat", h.v_hat}, {"xi", h.xi}, {"xi_I", h.xi_I}, {"xi_C", h.xi_C},
          {"funding_value", h.funding_value},     {"z", h.z},   {"z_I", h.z_I},   {"z_C", h.z_C}};
}

nlohmann::json to_json(const XvaReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"v_hat_0", r.v_hat_0},
          {"v_plus_0", r.v_plus_0},
          {"v_minus_0", r.v_minus_0},
          {"xva_sell", r.xva_sell},
          {"xva_buy", r.xva_buy},
          {"xva_sell_rel", opt(r.xva_sell_rel)},
          {"xva_buy_rel", opt(r.xva_buy_rel)},
          {"band_width", r.band_width},
          {"funding_sell_0", r.funding_sell_0},
          {"funding_buy_0", r.funding_buy_0},
          {"hedge_sell", to_json(r.hedge_sell)},
          {"hedge_buy", to_json(r.hedge_buy)}};
}

nlohmann::json to_json(const MarketConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& name : MarketConfig::field_names()) j[name] = cfg.get(name);
  return j;
}

}  // namespace xva
