// xva_cli: pricing runs, parameter sweeps, canned tables, figure data and
// convergence studies for the XVA engine.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "xva/io.hpp"
#include "xva/model.hpp"
#include "xva/pde.hpp"
#include "xva/sweep.hpp"
#include "xva/xva.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitArbitrage = 2;

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

struct ClaimArgs {
  std::string kind = "call";
  double strike = 1.0;
  double maturity = 1.0;
  double spot = 1.0;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.path, "market configuration JSON (defaults to the benchmark set)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "override a field, name=value (repeatable)");
}

void add_claim_options(CLI::App* cmd, ClaimArgs& args) {
  cmd->add_option("--claim", args.kind, "call or put")->check(CLI::IsMember({"call", "put"}));
  cmd->add_option("--strike", args.strike, "strike");
  cmd->add_option("--maturity", args.maturity, "maturity in years");
  cmd->add_option("--spot", args.spot, "spot at which values are reported");
}

void add_grid_options(CLI::App* cmd, xva::GridParams& grid) {
  cmd->add_option("--nx", grid.n_x, "space nodes (odd)");
  cmd->add_option("--nt", grid.n_t, "time steps");
  cmd->add_option("--width", grid.width_sigmas, "domain half-width in units of sigma sqrt(T)");
}

xva::MarketConfig resolve_config(const ConfigArgs& args) {
  xva::MarketConfig cfg = args.path.empty() ? xva::benchmark_config() : xva::load_market_config(args.path);
  for (const auto& o : args.overrides) xva::apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

xva::ClaimSpec resolve_claim(const ClaimArgs& args) {
  auto claim = args.kind == "put" ? xva::make_put(args.strike, args.maturity, args.spot)
                                  : xva::make_call(args.strike, args.maturity, args.spot);
  claim.validate();
  return claim;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("bad axis value '" + item + "'");
    values.push_back(v);
  }
  return values;
}

xva::SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("axis must look like name=v1,v2,...: '" + text + "'");
  return {text.substr(0, eq), parse_values(text.substr(eq + 1))};
}

// Writes to the named file, or stdout when the name is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  fn(os);
}

void log_rows(const std::string& path, const xva::SweepSpec& spec, const std::vector<xva::SweepRow>& rows) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (const auto& row : rows) {
    nlohmann::json j;
    j[spec.axis1.name] = row.value1;
    if (spec.axis2) j[spec.axis2->name] = *row.value2;
    j["status"] = row.ok ? "ok" : "error";
    if (row.ok)
      j["report"] = xva::to_json(row.report);
    else
      j["error"] = row.error;
    os << j.dump() << '\n';
  }
}

int run_price(const ConfigArgs& cargs, const ClaimArgs& claim_args, const xva::GridParams& gp, bool allow_arbitrage,
              const std::string& log_path) {
  const auto cfg = resolve_config(cargs);
  const auto claim = resolve_claim(claim_args);
  xva::SolverConfig scfg;
  scfg.allow_arbitrage = allow_arbitrage;
  const auto grid = xva::build_grid(claim, cfg, gp.width_sigmas, gp.n_x, gp.n_t);
  const auto run = xva::run_xva(claim, cfg, grid, scfg);

  nlohmann::json out;
  out["claim"] = {{"kind", xva::to_string(claim.kind)},
                  {"strike", claim.strike},
                  {"maturity", claim.maturity},
                  {"spot", claim.spot}};
  out["grid"] = {{"n_x", grid.n_x}, {"n_t", grid.n_t}, {"x_min", grid.x_min}, {"x_max", grid.x_max}};
  out["config"] = xva::to_json(cfg);
  if (allow_arbitrage) {
    auto& v = out["violations"] = nlohmann::json::array();
    for (const auto& violation : xva::validate_no_arbitrage(cfg)) v.push_back(violation.condition);
  }
  out["report"] = xva::to_json(run.report);
  std::cout << out.dump(2) << '\n';

  if (!log_path.empty()) {
    std::ofstream os(log_path);
    if (!os) throw std::runtime_error("cannot open " + log_path);
    run.seller_diagnostics.write_json_lines(os, "seller");
    run.buyer_diagnostics.write_json_lines(os, "buyer");
  }
  return 0;
}

int run_sweep_cmd(const xva::SweepSpec& spec, int threads, const std::string& out, const std::string& log_path) {
  const auto rows = xva::run_sweep(spec, threads);
  emit(out, [&](std::ostream& os) { xva::write_sweep_csv(os, spec, rows); });
  log_rows(log_path, spec, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XVA pricing engine"};
  app.require_subcommand(1);

  ConfigArgs cargs;
  ClaimArgs claim_args;
  xva::GridParams gp;
  bool allow_arbitrage = false;
  bool fatal = false;
  int threads = xva::default_thread_count();
  std::string out;
  std::string log_path;

  auto* price = app.add_subcommand("price", "price one claim and print the XVA report as JSON");
  add_config_options(price, cargs);
  add_claim_options(price, claim_args);
  add_grid_options(price, gp);
  price->add_flag("--allow-arbitrage", allow_arbitrage, "solve even if the rates admit hedger's arbitrage");
  price->add_option("--log", log_path, "write per-step solver diagnostics as JSON lines");

  std::string axis1_text;
  std::string axis2_text;
  std::vector<std::string> output_names{"xva", "band", "strategies", "funding"};
  auto* sweep = app.add_subcommand("sweep", "solve a one- or two-axis parameter grid and write CSV");
  add_config_options(sweep, cargs);
  add_claim_options(sweep, claim_args);
  add_grid_options(sweep, gp);
  sweep->add_option("--axis1", axis1_text, "name=v1,v2,...")->required();
  sweep->add_option("--axis2", axis2_text, "name=v1,v2,...");
  sweep->add_option("--outputs", output_names, "any of xva, strategies, funding, band")->delimiter(',');
  sweep->add_flag("--allow-arbitrage", allow_arbitrage, "solve even if the rates admit hedger's arbitrage");
  sweep->add_flag("--fatal", fatal, "abort on the first failing point");

  auto* table1 = app.add_subcommand("table1", "funding-account positions over alpha and r_f-");
  auto* table2 = app.add_subcommand("table2", "funding-account positions over r_f- at alpha = 0.9");
  for (auto* cmd : {table1, table2}) add_grid_options(cmd, gp);

  for (auto* cmd : {sweep, table1, table2}) {
    cmd->add_option("--out", out, "CSV destination (stdout if omitted)");
    cmd->add_option("--threads", threads, "worker threads (default XVA_THREADS or hardware)");
    cmd->add_option("--log", log_path, "write one JSON line per grid point");
  }

  int levels = 4;
  std::string mode = "linear";
  auto* convergence = app.add_subcommand("convergence", "successive grid halvings with observed order");
  add_config_options(convergence, cargs);
  add_claim_options(convergence, claim_args);
  convergence->add_option("--levels", levels, "number of grids (>= 3)");
  convergence->add_option("--mode", mode, "linear (against the closed form) or nonlinear (self-convergence)")
      ->check(CLI::IsMember({"linear", "nonlinear"}));
  convergence->add_option("--nx", gp.n_x, "space nodes of the coarsest grid");
  convergence->add_option("--nt", gp.n_t, "time steps of the coarsest grid");
  convergence->add_option("--width", gp.width_sigmas, "domain half-width in units of sigma sqrt(T)");
  convergence->add_flag("--allow-arbitrage", allow_arbitrage, "solve even if the rates admit hedger's arbitrage");
  convergence->add_option("--out", out, "CSV destination (stdout if omitted)");

  std::string fig_dir = "figures";
  auto* figures = app.add_subcommand("figures", "write one CSV per panel of the three comparative-statics figures");
  add_config_options(figures, cargs);
  add_grid_options(figures, gp);
  figures->add_option("--dir", fig_dir, "output directory");
  figures->add_option("--threads", threads, "worker threads (default XVA_THREADS or hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*price) return run_price(cargs, claim_args, gp, allow_arbitrage, log_path);

    if (*sweep) {
      xva::SweepSpec spec;
      spec.base = resolve_config(cargs);
      spec.claim = resolve_claim(claim_args);
      spec.axis1 = parse_axis(axis1_text);
      if (!axis2_text.empty()) spec.axis2 = parse_axis(axis2_text);
      spec.outputs.clear();
      for (const auto& name : output_names) spec.outputs.push_back(xva::parse_sweep_output(name));
      spec.grid = gp;
      spec.solver.allow_arbitrage = allow_arbitrage;
      spec.fatal = fatal;
      return run_sweep_cmd(spec, threads, out, log_path);
    }

    if (*table1 || *table2) {
      auto spec = *table1 ? xva::table1_spec() : xva::table2_spec();
      spec.grid = gp;
      return run_sweep_cmd(spec, threads, out, log_path);
    }

    if (*convergence) {
      const auto cfg = resolve_config(cargs);
      const auto claim = resolve_claim(claim_args);
      xva::SolverConfig scfg;
      scfg.allow_arbitrage = allow_arbitrage;
      if (mode == "nonlinear" && !allow_arbitrage) xva::require_no_arbitrage(cfg);
      const auto rows = xva::convergence_study(
          claim, cfg, levels, mode == "linear" ? xva::ConvergenceMode::linear : xva::ConvergenceMode::nonlinear, gp,
          scfg);
      emit(out, [&](std::ostream& os) { xva::write_convergence_csv(os, rows); });
      return 0;
    }

    if (*figures) {
      for (const auto& file : xva::write_figures(fig_dir, resolve_config(cargs), gp, threads))
        std::cout << fig_dir << '/' << file << '\n';
      return 0;
    }
  } catch (const xva::ArbitrageError& e) {
    std::cerr << "error: rate configuration admits hedger's arbitrage\n";
    for (const auto& v : e.violations()) std::cerr << "  violated: " << v.condition << " (" << v.detail << ")\n";
    std::cerr << "rerun with --allow-arbitrage to solve anyway\n";
    return kExitArbitrage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
