#ifndef XVA_PDE_HPP
#define XVA_PDE_HPP

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "xva/driver.hpp"
#include "xva/model.hpp"

namespace xva {

/// Uniform lattice in (t, x = log S). n_x counts all nodes including the two
/// boundary nodes; time nodes are t_n = n * dt for n = 0..n_t.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_x = 0;
  int n_t = 0;
  double maturity = 0.0;

  static constexpr int kMinNodes = 5;

  void validate() const;
  double dx() const { return (x_max - x_min) / (n_x - 1); }
  double dt() const { return maturity / n_t; }
  double x(int m) const { return x_min + m * dx(); }
  double t(int n) const { return n == n_t ? maturity : n * dt(); }
  Eigen::VectorXd nodes() const;

  bool operator==(const GridSpec&) const = default;
};

/// Lattice centred at log(strike) with half-width width_sigmas * sigma * sqrt(T).
/// n_x must be odd so the strike is a node.
GridSpec build_grid(const ClaimSpec& claim, const MarketConfig& cfg, double width_sigmas = 6.0, int n_x = 801,
                    int n_t = 400);

/// Field of values on a lattice; row n holds the slice at t_n.
struct Surface {
  GridSpec grid;
  Eigen::MatrixXd values;
  /// Slice at T - dt/2 produced by the implicit-Euler startup; empty otherwise.
  Eigen::VectorXd startup;

  Eigen::VectorXd slice(int n) const { return values.row(n).transpose(); }
  double at(int n, int m) const { return values(n, m); }

  /// Bilinear interpolation; throws std::out_of_range outside the lattice.
  double value_at(double t, double x) const;
  /// d/dx by central differences (one-sided at the edges), interpolated bilinearly.
  double derivative_at(double t, double x) const;
};

/// Benchmark (third-party) valuation on the solver lattice.
using BenchmarkSurface = Surface;

struct SolverConfig {
  double picard_tol = 1e-12;
  int picard_max_iter = 50;
  /// 0.5 is Crank-Nicolson, 1 fully implicit.
  double theta_scheme = 0.5;
  /// Replace the first backward step by two implicit-Euler half steps.
  bool rannacher = true;
  /// Run even when the rate configuration admits hedger's arbitrage.
  bool allow_arbitrage = false;

  void validate() const;
};

struct StepDiagnostics {
  int step = 0;       ///< target time index n of the step t_{n+1} -> t_n
  int substep = 0;    ///< 0 for a full step, 1/2 for the startup half steps
  double t = 0.0;     ///< time reached by the step
  int iterations = 0;
  double residual = 0.0;
};

struct SolveDiagnostics {
  std::vector<StepDiagnostics> steps;

  int max_iterations() const;
  double max_residual() const;
  /// One JSON object per line.
  void write_json_lines(std::ostream& os, const std::string& label) const;
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(int step, double t, double residual, int iterations);

  int step() const { return step_; }
  double time() const { return t_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  int step_;
  double t_;
  double residual_;
  int iterations_;
};

/// A w = -(drift w_x + diffusion w_xx) + kill w.
struct LinearOperator {
  double drift = 0.0;
  double diffusion = 0.0;
  double kill = 0.0;
};

/// Operator of the log-price dynamics under Q with the given killing rate.
LinearOperator log_price_operator(const MarketConfig& cfg, double kill);

/// Nonlinear source F(w) evaluated at one time level; fills out at interior nodes.
using SourceFn = std::function<void(const Eigen::VectorXd& w, Eigen::VectorXd& out)>;

struct StepContext {
  GridSpec grid;
  LinearOperator op;
  double dt = 0.0;
  double theta = 0.5;
  SourceFn source_now;   ///< F(t_n, .); empty means zero
  SourceFn source_next;  ///< F(t_{n+1}, .); empty means zero
  double picard_tol = 1e-12;
  int picard_max_iter = 50;
  int step = 0;          ///< for diagnostics only
  double t_now = 0.0;
};

struct StepResult {
  Eigen::VectorXd values;
  int iterations = 0;
  double residual = 0.0;
};

/// One backward step of the theta scheme,
///   (I + theta dt A) w_n = (I - (1-theta) dt A) w_{n+1}
///                          + dt [theta F(t_n, w_n) + (1-theta) F(t_{n+1}, w_{n+1})],
/// with the implicit source resolved by Picard iteration. Boundary nodes carry a
/// zero second difference. Throws PicardDivergence.
StepResult cn_step(const Eigen::VectorXd& slice_next, const StepContext& ctx);

/// Source of the seller/buyer XVA equation at one time level, given the
/// benchmark slice at that level.
SourceFn xva_source(const MarketConfig& cfg, Side side, double dx, Eigen::VectorXd v_hat);

/// Solves w_t = A w backward from w(T, x) = Phi(e^x) with no source.
Surface solve_linear(const ClaimSpec& claim, const GridSpec& grid, const LinearOperator& op,
                     const SolverConfig& solver_cfg);

/// Semilinear XVA equation for the given side, coupled to a benchmark surface
/// solved on the same lattice. Throws std::invalid_argument if the rate
/// configuration admits arbitrage (unless allowed) or the lattices differ, and
/// PicardDivergence if a step fails to converge.
Surface solve_semilinear(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
                         const SolverConfig& solver_cfg, Side side, const BenchmarkSurface& benchmark,
                         SolveDiagnostics* diagnostics = nullptr);

/// Central differences in the interior, one-sided at the two edges.
Eigen::VectorXd spatial_derivative(const Eigen::VectorXd& w, double dx);

/// Writes "t,x,value" rows.
void write_surface_csv(std::ostream& os, const Surface& surface);

}  // namespace xva

#endif  // XVA_PDE_HPP
