#include "xva/benchmark.hpp"

#include <cmath>
#include <stdexcept>

namespace xva {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void check_vanilla(double t, double s, const ClaimSpec& claim) {
  if (claim.kind == PayoffKind::custom) {
    throw std::invalid_argument("bs_closed_form: custom payoffs have no closed form, use benchmark_surface");
  }
  if (!(t >= 0.0 && t <= claim.maturity)) throw std::invalid_argument("bs_closed_form: t outside [0, T]");
  if (!(s > 0.0)) throw std::invalid_argument("bs_closed_form: spot must be > 0");
}

}  // namespace

double bs_closed_form(double t, double s, const ClaimSpec& claim, double r_D, double sigma) {
  check_vanilla(t, s, claim);
  const double tau = claim.maturity - t;
  const double k = claim.strike;
  const double vol = sigma * std::sqrt(tau);
  const double df = std::exp(-r_D * tau);
  if (tau == 0.0 || vol == 0.0) {
    // Deterministic forward s e^{r_D tau}, discounted.
    const double fwd = s * std::exp(r_D * tau);
    const double intrinsic = claim.kind == PayoffKind::call ? fwd - k : k - fwd;
    return df * std::max(intrinsic, 0.0);
  }
  const double d1 = (std::log(s / k) + (r_D + 0.5 * sigma * sigma) * tau) / vol;
  const double d2 = d1 - vol;
  if (claim.kind == PayoffKind::call) return s * normal_cdf(d1) - k * df * normal_cdf(d2);
  return k * df * normal_cdf(-d2) - s * normal_cdf(-d1);
}

double bs_delta(double t, double s, const ClaimSpec& claim, double r_D, double sigma) {
  check_vanilla(t, s, claim);
  const double tau = claim.maturity - t;
  const double vol = sigma * std::sqrt(tau);
  if (tau == 0.0 || vol == 0.0) {
    const double fwd = s * std::exp(r_D * tau);
    if (claim.kind == PayoffKind::call) return fwd > claim.strike ? 1.0 : 0.0;
    return fwd < claim.strike ? -1.0 : 0.0;
  }
  const double d1 = (std::log(s / claim.strike) + (r_D + 0.5 * sigma * sigma) * tau) / vol;
  return claim.kind == PayoffKind::call ? normal_cdf(d1) : normal_cdf(d1) - 1.0;
}

BenchmarkSurface benchmark_surface(const GridSpec& grid, const ClaimSpec& claim, const MarketConfig& cfg,
                                   const SolverConfig& solver_cfg) {
  return solve_linear(claim, grid, log_price_operator(cfg, cfg.r_D), solver_cfg);
}

}  // namespace xva
