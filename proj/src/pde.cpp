#include "xva/pde.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "xva/closeout.hpp"
#include "xva/tridiagonal.hpp"

namespace xva {

void GridSpec::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw std::invalid_argument("grid: need finite x_min < x_max");
  }
  if (n_x < kMinNodes) throw std::invalid_argument("grid: n_x must be >= " + std::to_string(kMinNodes));
  if (n_t < 1) throw std::invalid_argument("grid: n_t must be >= 1");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) throw std::invalid_argument("grid: maturity must be > 0");
}

Eigen::VectorXd GridSpec::nodes() const {
  Eigen::VectorXd out(n_x);
  for (int m = 0; m < n_x; ++m) out(m) = x(m);
  return out;
}

GridSpec build_grid(const ClaimSpec& claim, const MarketConfig& cfg, double width_sigmas, int n_x, int n_t) {
  claim.validate();
  if (!(width_sigmas > 0.0) || !std::isfinite(width_sigmas)) {
    throw std::invalid_argument("grid: width_sigmas must be > 0");
  }
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("grid: sigma must be > 0");
  if (n_x < GridSpec::kMinNodes) throw std::invalid_argument("grid: n_x must be >= " + std::to_string(GridSpec::kMinNodes));
  if (n_x % 2 == 0) throw std::invalid_argument("grid: n_x must be odd so that log(strike) is a node");
  if (n_t < 1) throw std::invalid_argument("grid: n_t must be >= 1");
  const double centre = std::log(claim.strike);
  const double half_width = width_sigmas * cfg.sigma * std::sqrt(claim.maturity);
  GridSpec grid{centre - half_width, centre + half_width, n_x, n_t, claim.maturity};
  grid.validate();
  return grid;
}

namespace {

// Locates the cell [n, n+1] x [m, m+1] containing (t, x) and the local weights.
struct Cell {
  int n;
  int m;
  double wt;
  double wx;
};

Cell locate(const GridSpec& g, double t, double x) {
  const double eps = 1e-12;
  if (!(t >= -eps * g.maturity && t <= g.maturity * (1 + eps))) {
    throw std::out_of_range("surface: t outside [0, T]");
  }
  const double span = g.x_max - g.x_min;
  if (!(x >= g.x_min - eps * span && x <= g.x_max + eps * span)) {
    throw std::out_of_range("surface: x outside the lattice");
  }
  const double ft = std::clamp(t / g.dt(), 0.0, static_cast<double>(g.n_t));
  const double fx = std::clamp((x - g.x_min) / g.dx(), 0.0, static_cast<double>(g.n_x - 1));
  const int n = std::min(static_cast<int>(std::floor(ft)), g.n_t - 1);
  const int m = std::min(static_cast<int>(std::floor(fx)), g.n_x - 2);
  return {n, m, ft - n, fx - m};
}

double bilinear(const Cell& c, double v00, double v01, double v10, double v11) {
  return (1 - c.wt) * ((1 - c.wx) * v00 + c.wx * v01) + c.wt * ((1 - c.wx) * v10 + c.wx * v11);
}

double node_derivative(const Eigen::MatrixXd& v, int n, int m, double dx) {
  const Eigen::Index last = v.cols() - 1;
  if (m == 0) return (v(n, 1) - v(n, 0)) / dx;
  if (m == last) return (v(n, last) - v(n, last - 1)) / dx;
  return (v(n, m + 1) - v(n, m - 1)) / (2 * dx);
}

}  // namespace

double Surface::value_at(double t, double x) const {
  const Cell c = locate(grid, t, x);
  return bilinear(c, values(c.n, c.m), values(c.n, c.m + 1), values(c.n + 1, c.m), values(c.n + 1, c.m + 1));
}

double Surface::derivative_at(double t, double x) const {
  const Cell c = locate(grid, t, x);
  const double dx = grid.dx();
  return bilinear(c, node_derivative(values, c.n, c.m, dx), node_derivative(values, c.n, c.m + 1, dx),
                  node_derivative(values, c.n + 1, c.m, dx), node_derivative(values, c.n + 1, c.m + 1, dx));
}

void SolverConfig::validate() const {
  if (!(picard_tol > 0.0)) throw std::invalid_argument("solver: picard_tol must be > 0");
  if (picard_max_iter < 1) throw std::invalid_argument("solver: picard_max_iter must be >= 1");
  if (!(theta_scheme >= 0.0 && theta_scheme <= 1.0)) {
    throw std::invalid_argument("solver: theta_scheme must lie in [0, 1]");
  }
}

int SolveDiagnostics::max_iterations() const {
  int out = 0;
  for (const auto& s : steps) out = std::max(out, s.iterations);
  return out;
}

double SolveDiagnostics::max_residual() const {
  double out = 0.0;
  for (const auto& s : steps) out = std::max(out, s.residual);
  return out;
}

void SolveDiagnostics::write_json_lines(std::ostream& os, const std::string& label) const {
  for (const auto& s : steps) {
    nlohmann::json j{{"solve", label},       {"step", s.step},
                     {"substep", s.substep}, {"t", s.t},
                     {"iterations", s.iterations}, {"residual", s.residual}};
    os << j.dump() << '\n';
  }
}

namespace {

std::string picard_message(int step, double t, double residual, int iterations) {
  std::ostringstream os;
  os << "Picard iteration did not converge at step " << step << " (t=" << t << ") after " << iterations
     << " iterations; last residual " << residual;
  return os.str();
}

}  // namespace

PicardDivergence::PicardDivergence(int step, double t, double residual, int iterations)
    : std::runtime_error(picard_message(step, t, residual, iterations)),
      step_(step),
      t_(t),
      residual_(residual),
      iterations_(iterations) {}

LinearOperator log_price_operator(const MarketConfig& cfg, double kill) {
  return {cfg.r_D - 0.5 * cfg.sigma * cfg.sigma, 0.5 * cfg.sigma * cfg.sigma, kill};
}

namespace {

// Fills boundary nodes so that the second difference vanishes there.
void extrapolate_boundaries(Eigen::VectorXd& w) {
  const Eigen::Index last = w.size() - 1;
  w(0) = 2.0 * w(1) - w(2);
  w(last) = 2.0 * w(last - 1) - w(last - 2);
}

}  // namespace

StepResult cn_step(const Eigen::VectorXd& slice_next, const StepContext& ctx) {
  const int n_x = ctx.grid.n_x;
  if (slice_next.size() != n_x) throw std::invalid_argument("cn_step: slice size does not match grid");
  if (!slice_next.allFinite()) throw std::invalid_argument("cn_step: slice contains non-finite values");

  const int n_in = n_x - 2;
  const double dx = ctx.grid.dx();
  const double a = ctx.op.drift / (2 * dx) - ctx.op.diffusion / (dx * dx);
  const double b = 2 * ctx.op.diffusion / (dx * dx) + ctx.op.kill;
  const double c = -ctx.op.drift / (2 * dx) - ctx.op.diffusion / (dx * dx);
  const double imp = ctx.theta * ctx.dt;
  const double exp = (1 - ctx.theta) * ctx.dt;

  // Implicit matrix on interior nodes 1..n_x-2 with w_0 = 2w_1 - w_2 and
  // w_{N-1} = 2w_{N-2} - w_{N-3} eliminated.
  Eigen::VectorXd lower = Eigen::VectorXd::Constant(n_in, imp * a);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n_in, 1 + imp * b);
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(n_in, imp * c);
  diag(0) += imp * 2 * a;
  upper(0) = imp * (c - a);
  diag(n_in - 1) += imp * 2 * c;
  lower(n_in - 1) = imp * (a - c);
  const TridiagonalLU<double> lu(lower, diag, upper);

  Eigen::VectorXd base(n_in);
  for (int i = 0; i < n_in; ++i) {
    const int m = i + 1;
    const double aw = a * slice_next(m - 1) + b * slice_next(m) + c * slice_next(m + 1);
    base(i) = slice_next(m) - exp * aw;
  }
  Eigen::VectorXd source(n_x);
  if (ctx.source_next && exp != 0.0) {
    source.setZero();
    ctx.source_next(slice_next, source);
    base += exp * source.segment(1, n_in);
  }

  StepResult result;
  result.values.resize(n_x);
  if (!ctx.source_now || imp == 0.0) {
    Eigen::VectorXd rhs = base;
    if (ctx.source_now) {
      source.setZero();
      ctx.source_now(slice_next, source);
      rhs += ctx.dt * source.segment(1, n_in);
    }
    result.values.segment(1, n_in) = lu.solve(rhs);
    extrapolate_boundaries(result.values);
    result.iterations = 1;
    result.residual = 0.0;
    return result;
  }

  Eigen::VectorXd iterate = slice_next;
  double residual = 0.0;
  for (int k = 1; k <= ctx.picard_max_iter; ++k) {
    source.setZero();
    ctx.source_now(iterate, source);
    Eigen::VectorXd next(n_x);
    next.segment(1, n_in) = lu.solve(base + imp * source.segment(1, n_in));
    extrapolate_boundaries(next);
    residual = (next - iterate).cwiseAbs().maxCoeff();
    iterate.swap(next);
    if (residual < ctx.picard_tol) {
      result.values = std::move(iterate);
      result.iterations = k;
      result.residual = residual;
      return result;
    }
  }
  throw PicardDivergence(ctx.step, ctx.t_now, residual, ctx.picard_max_iter);
}

SourceFn xva_source(const MarketConfig& cfg, Side side, double dx, Eigen::VectorXd v_hat) {
  return [cfg, side, dx, v_hat = std::move(v_hat)](const Eigen::VectorXd& w, Eigen::VectorXd& out) {
    const Eigen::Index last = w.size() - 1;
    for (Eigen::Index m = 1; m < last; ++m) {
      const double vh = v_hat(m);
      const double th_I = closeout_I(vh, cfg.alpha, cfg.L_I);
      const double th_C = closeout_C(vh, cfg.alpha, cfg.L_C);
      const double z = cfg.sigma * (w(m + 1) - w(m - 1)) / (2 * dx);
      const DriverInputs in{w(m), z, th_I - w(m), th_C - w(m), vh};
      out(m) = driver(side, in, cfg) + cfg.h_I_Q * th_I + cfg.h_C_Q * th_C;
    }
  };
}

namespace {

Eigen::VectorXd terminal_slice(const ClaimSpec& claim, const GridSpec& grid) {
  Eigen::VectorXd w(grid.n_x);
  for (int m = 0; m < grid.n_x; ++m) w(m) = claim.payoff(std::exp(grid.x(m)));
  return w;
}

// source_at(n, half) returns F at time level n, or at T - dt/2 when half is set.
template <typename SourceAt>
Surface march(const ClaimSpec& claim, const GridSpec& grid, const LinearOperator& op, const SolverConfig& scfg,
              SourceAt&& source_at, SolveDiagnostics* diagnostics) {
  claim.validate();
  grid.validate();
  scfg.validate();
  if (std::abs(grid.maturity - claim.maturity) > 1e-12 * claim.maturity) {
    throw std::invalid_argument("grid maturity does not match the claim");
  }

  Surface out;
  out.grid = grid;
  out.values.resize(grid.n_t + 1, grid.n_x);
  Eigen::VectorXd w = terminal_slice(claim, grid);
  out.values.row(grid.n_t) = w.transpose();

  StepContext ctx;
  ctx.grid = grid;
  ctx.op = op;
  ctx.picard_tol = scfg.picard_tol;
  ctx.picard_max_iter = scfg.picard_max_iter;

  auto record = [&](int n, int sub, double t, const StepResult& r) {
    if (diagnostics) diagnostics->steps.push_back({n, sub, t, r.iterations, r.residual});
  };

  const double dt = grid.dt();
  for (int n = grid.n_t - 1; n >= 0; --n) {
    ctx.step = n;
    if (n == grid.n_t - 1 && scfg.rannacher) {
      ctx.theta = 1.0;
      ctx.dt = 0.5 * dt;
      ctx.source_next = nullptr;
      ctx.source_now = source_at(n, true);
      ctx.t_now = grid.maturity - 0.5 * dt;
      StepResult half = cn_step(w, ctx);
      record(n, 1, ctx.t_now, half);
      out.startup = half.values;
      ctx.source_now = source_at(n, false);
      ctx.t_now = grid.t(n);
      StepResult full = cn_step(half.values, ctx);
      record(n, 2, ctx.t_now, full);
      w = std::move(full.values);
    } else {
      ctx.theta = scfg.theta_scheme;
      ctx.dt = dt;
      ctx.source_now = source_at(n, false);
      ctx.source_next = source_at(n + 1, false);
      ctx.t_now = grid.t(n);
      StepResult r = cn_step(w, ctx);
      record(n, 0, ctx.t_now, r);
      w = std::move(r.values);
    }
    out.values.row(n) = w.transpose();
  }
  return out;
}

}  // namespace

Surface solve_linear(const ClaimSpec& claim, const GridSpec& grid, const LinearOperator& op,
                     const SolverConfig& solver_cfg) {
  return march(claim, grid, op, solver_cfg, [](int, bool) { return SourceFn{}; }, nullptr);
}

Surface solve_semilinear(const ClaimSpec& claim, const MarketConfig& cfg, const GridSpec& grid,
                         const SolverConfig& solver_cfg, Side side, const BenchmarkSurface& benchmark,
                         SolveDiagnostics* diagnostics) {
  cfg.validate();
  if (!solver_cfg.allow_arbitrage) require_no_arbitrage(cfg);
  if (!(benchmark.grid == grid) || benchmark.values.rows() != grid.n_t + 1 || benchmark.values.cols() != grid.n_x) {
    throw std::invalid_argument("benchmark surface lives on a different lattice");
  }
  if (solver_cfg.rannacher && benchmark.startup.size() != grid.n_x) {
    throw std::invalid_argument("benchmark surface lacks the startup half-step slice");
  }
  const LinearOperator op = log_price_operator(cfg, cfg.h_I_Q + cfg.h_C_Q);
  const double dx = grid.dx();
  auto source_at = [&](int n, bool half) {
    return xva_source(cfg, side, dx, half ? benchmark.startup : benchmark.slice(n));
  };
  return march(claim, grid, op, solver_cfg, source_at, diagnostics);
}

Eigen::VectorXd spatial_derivative(const Eigen::VectorXd& w, double dx) {
  const Eigen::Index n = w.size();
  if (n < 2) throw std::invalid_argument("spatial_derivative: need at least two nodes");
  Eigen::VectorXd d(n);
  d(0) = (w(1) - w(0)) / dx;
  d(n - 1) = (w(n - 1) - w(n - 2)) / dx;
  for (Eigen::Index m = 1; m + 1 < n; ++m) d(m) = (w(m + 1) - w(m - 1)) / (2 * dx);
  return d;
}

void write_surface_csv(std::ostream& os, const Surface& surface) {
  const auto& g = surface.grid;
  os << "t,x,value\n";
  os.precision(17);
  for (int n = 0; n <= g.n_t; ++n) {
    for (int m = 0; m < g.n_x; ++m) os << g.t(n) << ',' << g.x(m) << ',' << surface.values(n, m) << '\n';
  }
}

}  // namespace xva
