#ifndef XVA_ORACLE_HPP
#define XVA_ORACLE_HPP

#include "xva/driver.hpp"
#include "xva/model.hpp"
#include "xva/pde.hpp"

namespace xva {

struct TreeSpec {
  int n_steps = 500;
  ClaimSpec claim;
  MarketConfig cfg;

  static constexpr int kMaxSteps = 2000;
};

struct TreeResult {
  double value = 0.0;  ///< V at (0, S_0)
  double v_hat = 0.0;  ///< benchmark price on the same tree
};

/// Discrete BSDE on a recombining binomial tree in log-price with increments
/// +-sigma sqrt(dt) and drift (r_D - sigma^2/2) dt. Defaults enter through
/// the killing rate h_I + h_C and the closeout source, as in the PDE. Each node
/// solves its implicit one-step equation by fixed-point iteration to 1e-12.
/// Terminal cells that straddle a payoff kink carry the exact cell average.
TreeResult tree_bsde_solve(const TreeSpec& spec, Side side);

double tree_bsde_price(const TreeSpec& spec, Side side);

/// max over the lattice of |v - v_hat| for both sides when all rates equal
/// r_D and both loss rates are zero (the XVA equation then collapses to the
/// benchmark one). Throws std::invalid_argument for any other configuration.
double symmetric_case_residual(const ClaimSpec& claim, const MarketConfig& cfg_symmetric, const GridSpec& grid,
                               const SolverConfig& solver_cfg = {});

/// cfg with every funding, repo and collateral rate set to r_D and zero losses.
MarketConfig symmetrized(MarketConfig cfg);

}  // namespace xva

#endif  // XVA_ORACLE_HPP
