#ifndef XVA_BENCHMARK_HPP
#define XVA_BENCHMARK_HPP

#include "xva/closeout.hpp"
#include "xva/model.hpp"
#include "xva/pde.hpp"

namespace xva {

/// Black-Scholes value at time t of a call or put discounted at r_D.
/// Throws std::invalid_argument for custom payoffs or t outside [0, T].
double bs_closed_form(double t, double s, const ClaimSpec& claim, double r_D, double sigma);

/// Black-Scholes delta dV/dS for a call or put.
double bs_delta(double t, double s, const ClaimSpec& claim, double r_D, double sigma);

/// Third-party valuation on the lattice: solves w_t + (r_D - sigma^2/2) w_x
/// + sigma^2/2 w_xx - r_D w = 0 backward from Phi(e^x) with the same stepper and
/// boundary policy as the XVA equation.
BenchmarkSurface benchmark_surface(const GridSpec& grid, const ClaimSpec& claim, const MarketConfig& cfg,
                                   const SolverConfig& solver_cfg = {});

}  // namespace xva

#endif  // XVA_BENCHMARK_HPP
