#include "xva/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "xva/benchmark.hpp"
#include "xva/closeout.hpp"

namespace xva {

namespace {

constexpr double kNodeTol = 1e-12;
constexpr int kNodeMaxIter = 200;

double terminal_value(const ClaimSpec& claim, double x, double half_cell) {
  const double lo = x - half_cell;
  const double hi = x + half_cell;
  for (double k : claim.kinks()) {
    if (k > 0.0) {
      const double y = std::log(k);
      if (y > lo && y < hi) return claim.log_cell_average(lo, hi);
    }
  }
  return claim.payoff(std::exp(x));
}

}  // namespace

TreeResult tree_bsde_solve(const TreeSpec& spec, Side side) {
  if (spec.n_steps < 1 || spec.n_steps > TreeSpec::kMaxSteps) {
    throw std::invalid_argument("tree: n_steps must lie in [1, " + std::to_string(TreeSpec::kMaxSteps) + "]");
  }
  spec.claim.validate();
  spec.cfg.validate();
  const auto& cfg = spec.cfg;
  const int n = spec.n_steps;
  const double dt = spec.claim.maturity / n;
  const double step = cfg.sigma * std::sqrt(dt);
  const double drift = (cfg.r_D - 0.5 * cfg.sigma * cfg.sigma) * dt;
  const double x0 = std::log(spec.claim.spot);
  const double discount = std::exp(-cfg.r_D * dt);
  const double kill = cfg.h_I_Q + cfg.h_C_Q;

  std::vector<double> v(n + 1);
  std::vector<double> v_hat(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double x = x0 + n * drift + (2 * j - n) * step;
    v[j] = terminal_value(spec.claim, x, step);
    v_hat[j] = v[j];
  }

  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j <= k; ++j) {
      const double up = v[j + 1];
      const double down = v[j];
      const double expected = 0.5 * (up + down);
      const double z = (up - down) / (2 * std::sqrt(dt));
      const double vh = discount * 0.5 * (v_hat[j + 1] + v_hat[j]);
      const double th_I = closeout_I(vh, cfg.alpha, cfg.L_I);
      const double th_C = closeout_C(vh, cfg.alpha, cfg.L_C);

      double cur = expected;
      bool converged = false;
      for (int it = 0; it < kNodeMaxIter; ++it) {
        const DriverInputs in{cur, z, th_I - cur, th_C - cur, vh};
        const double next =
            expected + dt * (driver(side, in, cfg) - kill * cur + cfg.h_I_Q * th_I + cfg.h_C_Q * th_C);
        const double diff = std::abs(next - cur);
        cur = next;
        if (diff < kNodeTol) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw std::runtime_error("tree: fixed point diverged at level " + std::to_string(k) + ", node " +
                                 std::to_string(j));
      }
      v[j] = cur;
      v_hat[j] = vh;
    }
  }
  return {v[0], v_hat[0]};
}

double tree_bsde_price(const TreeSpec& spec, Side side) { return tree_bsde_solve(spec, side).value; }

MarketConfig symmetrized(MarketConfig cfg) {
  cfg.r_f_plus = cfg.r_f_minus = cfg.r_D;
  cfg.r_r_plus = cfg.r_r_minus = cfg.r_D;
  cfg.r_c_plus = cfg.r_c_minus = cfg.r_D;
  cfg.L_I = cfg.L_C = 0.0;
  return cfg;
}

double symmetric_case_residual(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
                               const SolverConfig& solver_cfg) {
  const double r = cfg.r_D;
  const bool symmetric = cfg.r_f_plus == r && cfg.r_f_minus == r && cfg.r_r_plus == r && cfg.r_r_minus == r &&
                         cfg.r_c_plus == r && cfg.r_c_minus == r && cfg.L_I == 0.0 && cfg.L_C == 0.0;
  if (!symmetric) {
    throw std::invalid_argument("symmetric_case_residual: all rates must equal r_D and both losses must be zero");
  }
  SolverConfig scfg = solver_cfg;
  // With zero intensities the strict credit inequalities fail; the collapse holds regardless.
  scfg.allow_arbitrage = true;
  const BenchmarkSurface bench = benchmark_surface(grid, claim, cfg, scfg);
  double worst = 0.0;
  for (Side side : {Side::seller, Side::buyer}) {
    const Surface s = solve_semilinear(claim, cfg, grid, scfg, side, bench);
    worst = std::max(worst, (s.values - bench.values).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace xva
