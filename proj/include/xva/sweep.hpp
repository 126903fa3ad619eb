#ifndef XVA_SWEEP_HPP
#define XVA_SWEEP_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xva/model.hpp"
#include "xva/pde.hpp"
#include "xva/xva.hpp"

namespace xva {

struct SweepAxis {
  std::string name;  ///< a MarketConfig field
  std::vector<double> values;
};

/// Lattice parameters handed to build_grid for every point.
struct GridParams {
  double width_sigmas = 6.0;
  int n_x = 801;
  int n_t = 400;
};

enum class SweepOutput { xva, strategies, funding, band };

struct SweepSpec {
  MarketConfig base;
  ClaimSpec claim;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::vector<SweepOutput> outputs{SweepOutput::xva, SweepOutput::band, SweepOutput::strategies,
                                   SweepOutput::funding};
  GridParams grid;
  SolverConfig solver;
  /// Abort on the first failing point instead of recording it in its row.
  bool fatal = false;

  /// Throws std::invalid_argument for unknown parameter names or empty axes.
  void validate() const;
};

struct SweepRow {
  double value1 = 0.0;
  std::optional<double> value2;
  bool ok = false;
  std::string error;
  XvaReport report;
};

/// Worker count: XVA_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

/// Solves every grid point (axis1 outer, axis2 inner) with up to `threads`
/// concurrent workers; rows come back in axis order regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = default_thread_count());

void write_sweep_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows);

SweepOutput parse_sweep_output(const std::string& name);

/// Canned funding-account sweeps: alpha x r_f-, and r_f- alone at alpha = 0.9.
SweepSpec table1_spec();
SweepSpec table2_spec();

/// Writes one plot-ready CSV per figure panel into `directory`; returns the file names.
std::vector<std::string> write_figures(const std::string& directory, const MarketConfig& base, const GridParams& grid,
                                       int threads = default_thread_count());

enum class ConvergenceMode {
  linear,    ///< benchmark solve against the Black-Scholes closed form
  nonlinear  ///< seller solve against the richest level
};

struct ConvergenceRow {
  int n_x = 0;
  int n_t = 0;
  double dx = 0.0;
  double dt = 0.0;
  double value = 0.0;
  double error = 0.0;
  std::optional<double> order;
};

/// Successive halvings of (dx, dt) starting from `base`. In linear mode the
/// error is against the closed form and the order is log2(e_{k-1}/e_k); in
/// nonlinear mode the error is against the finest level and the order is the
/// Richardson estimate log2(|u_{k-1}-u_{k-2}| / |u_k-u_{k-1}|).
std::vector<ConvergenceRow> convergence_study(const ClaimSpec& claim, const MarketConfig& cfg, int levels,
                                              ConvergenceMode mode, const GridParams& base = {},
                                              const SolverConfig& solver = {});

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace xva

#endif  // XVA_SWEEP_HPP
