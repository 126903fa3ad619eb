#ifndef XVA_XVA_HPP
#define XVA_XVA_HPP

#include <json.hpp>
#include <optional>
#include <string>

#include "xva/benchmark.hpp"
#include "xva/driver.hpp"
#include "xva/model.hpp"
#include "xva/pde.hpp"

namespace xva {

/// Replicating portfolio at one (t, S): stock shares xi, bond shares xi_I and
/// xi_C, dollar funding position, and the BSDE integrands.
struct HedgeSnapshot {
  double v = 0.0;
  double v_hat = 0.0;
  double xi = 0.0;
  double xi_I = 0.0;
  double xi_C = 0.0;
  double funding_value = 0.0;
  double z = 0.0;
  double z_I = 0.0;
  double z_C = 0.0;
};

struct XvaReport {
  double v_hat_0 = 0.0;
  double v_plus_0 = 0.0;
  double v_minus_0 = 0.0;
  double xva_sell = 0.0;
  double xva_buy = 0.0;
  /// Relative adjustments; absent when |v_hat_0| <= 1e-12.
  std::optional<double> xva_sell_rel;
  std::optional<double> xva_buy_rel;
  double band_width = 0.0;
  double funding_sell_0 = 0.0;
  double funding_buy_0 = 0.0;
  /// Replication of the seller's and buyer's positions at (0, S_0).
  HedgeSnapshot hedge_sell;
  HedgeSnapshot hedge_buy;

  /// Throw std::domain_error when the benchmark price vanishes.
  double relative_sell() const;
  double relative_buy() const;
};

/// Everything produced by one pricing run.
struct XvaRun {
  ClaimSpec claim;
  MarketConfig cfg;
  BenchmarkSurface benchmark;
  Surface seller;
  Surface buyer;
  SolveDiagnostics seller_diagnostics;
  SolveDiagnostics buyer_diagnostics;
  XvaReport report;
};

XvaRun run_xva(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
               const SolverConfig& solver_cfg = {});

/// One benchmark solve and two semilinear solves (seller and buyer), evaluated at (0, S_0).
XvaReport compute_xva(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
                      const SolverConfig& solver_cfg = {});

/// Replication strategy read off a solved surface:
///   xi = dv/dS, z = sigma S xi, z_j = theta_j(v_hat) - v,
///   xi_j = (v - theta_j(v_hat)) e^{(r_D + h_j^Q)(T - t)},
///   funding = v + z_I + z_C - alpha v_hat.
/// Throws std::out_of_range outside the lattice.
HedgeSnapshot hedge_at(const Surface& surface, const BenchmarkSurface& benchmark, const MarketConfig& cfg, double t,
                       double s);

/// Dollar funding position at time 0 for either side:
/// theta_I(v_hat_0) + theta_C(v_hat_0) - v_0 - alpha v_hat_0, with v_0 the
/// seller's or buyer's value.
double funding_account_0(Side side, const XvaRun& run);

nlohmann::json to_json(const XvaReport& report);
nlohmann::json to_json(const HedgeSnapshot& hedge);
nlohmann::json to_json(const MarketConfig& cfg);

}  // namespace xva

#endif  // XVA_XVA_HPP
