#include "xva/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "xva/benchmark.hpp"
#include "xva/io.hpp"

namespace xva {

namespace {

struct Point {
  double value1;
  std::optional<double> value2;
};

std::vector<Point> expand(const SweepSpec& spec) {
  std::vector<Point> points;
  for (double a : spec.axis1.values) {
    if (!spec.axis2) {
      points.push_back({a, std::nullopt});
      continue;
    }
    for (double b : spec.axis2->values) points.push_back({a, b});
  }
  return points;
}

bool wants(const SweepSpec& spec, SweepOutput o) {
  return std::find(spec.outputs.begin(), spec.outputs.end(), o) != spec.outputs.end();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

void SweepSpec::validate() const {
  const auto names = MarketConfig::field_names();
  auto check = [&](const SweepAxis& axis) {
    if (std::find(names.begin(), names.end(), axis.name) == names.end())
      throw std::invalid_argument("sweep: unknown parameter '" + axis.name + "'");
    if (axis.values.empty()) throw std::invalid_argument("sweep: axis '" + axis.name + "' has no values");
  };
  check(axis1);
  if (axis2) {
    check(*axis2);
    if (axis2->name == axis1.name) throw std::invalid_argument("sweep: both axes vary '" + axis1.name + "'");
  }
  if (outputs.empty()) throw std::invalid_argument("sweep: no outputs requested");
  claim.validate();
  solver.validate();
}

int default_thread_count() {
  if (const char* env = std::getenv("XVA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const auto points = expand(spec);
  std::vector<SweepRow> rows(points.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&] {
    for (;;) {
      if (abort) return;
      const std::size_t i = next++;
      if (i >= points.size()) return;
      SweepRow& row = rows[i];
      row.value1 = points[i].value1;
      row.value2 = points[i].value2;
      try {
        MarketConfig cfg = spec.base;
        cfg.set(spec.axis1.name, row.value1);
        if (spec.axis2) cfg.set(spec.axis2->name, *row.value2);
        const GridSpec grid = build_grid(spec.claim, cfg, spec.grid.width_sigmas, spec.grid.n_x, spec.grid.n_t);
        row.report = compute_xva(spec.claim, cfg, grid, spec.solver);
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
        if (spec.fatal) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          abort = true;
        }
      }
    }
  };

  const int n_workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int k = 0; k < n_workers; ++k) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const bool xva = wants(spec, SweepOutput::xva);
  const bool band = wants(spec, SweepOutput::band);
  const bool strategies = wants(spec, SweepOutput::strategies);
  const bool funding = wants(spec, SweepOutput::funding);

  os << spec.axis1.name;
  if (spec.axis2) os << ',' << spec.axis2->name;
  os << ",v_hat_0";
  if (xva) os << ",xva_sell,xva_buy,xva_sell_rel,xva_buy_rel";
  if (band) os << ",band_width";
  if (strategies) os << ",xi_0,xi_I_0,xi_C_0";
  if (funding) os << ",funding_sell,funding_buy";
  os << ",status\n";

  for (const auto& row : rows) {
    os << format_number(row.value1);
    if (spec.axis2) os << ',' << format_number(*row.value2);
    const auto& r = row.report;
    auto num = [&](double v) { return row.ok ? format_number(v) : std::string(); };
    os << ',' << num(r.v_hat_0);
    if (xva) {
      os << ',' << num(r.xva_sell) << ',' << num(r.xva_buy) << ',' << (row.ok ? optional_number(r.xva_sell_rel) : "")
         << ',' << (row.ok ? optional_number(r.xva_buy_rel) : "");
    }
    if (band) os << ',' << num(r.band_width);
    if (strategies) os << ',' << num(r.hedge_sell.xi) << ',' << num(r.hedge_sell.xi_I) << ',' << num(r.hedge_sell.xi_C);
    if (funding) os << ',' << num(r.funding_sell_0) << ',' << num(r.funding_buy_0);
    os << ',' << (row.ok ? std::string("ok") : csv_quote("error: " + row.error)) << '\n';
  }
}

SweepOutput parse_sweep_output(const std::string& name) {
  if (name == "xva") return SweepOutput::xva;
  if (name == "strategies") return SweepOutput::strategies;
  if (name == "funding") return SweepOutput::funding;
  if (name == "band") return SweepOutput::band;
  throw std::invalid_argument("unknown sweep output '" + name + "' (expected xva, strategies, funding or band)");
}

SweepSpec table1_spec() {
  SweepSpec spec;
  spec.base = benchmark_config();
  spec.claim = make_call(1.0, 1.0);
  spec.axis1 = {"alpha", {0.0, 0.25, 0.75, 1.0}};
  spec.axis2 = SweepAxis{"r_f_minus", {0.08, 0.2}};
  spec.outputs = {SweepOutput::funding};
  // r_f- = 0.2 exceeds the cheapest bond return, so part of this grid admits arbitrage.
  spec.solver.allow_arbitrage = true;
  return spec;
}

SweepSpec table2_spec() {
  SweepSpec spec;
  spec.base = benchmark_config();
  spec.base.alpha = 0.9;
  spec.base.h_C_Q = 0.15;
  spec.claim = make_call(1.0, 1.0);
  spec.axis1 = {"r_f_minus", {0.08, 0.1, 0.15, 0.2}};
  spec.outputs = {SweepOutput::funding};
  spec.solver.allow_arbitrage = true;
  return spec;
}

std::vector<std::string> write_figures(const std::string& directory, const MarketConfig& base, const GridParams& grid,
                                       int threads) {
  struct Figure {
    std::string stem;
    SweepAxis outer;
    SweepAxis inner;
  };
  const std::vector<Figure> figures{
      {"fig1", {"r_f_minus", {0.08, 0.14, 0.2}}, {"alpha", linspace(0.0, 1.0, 21)}},
      {"fig2", {"h_C_Q", {0.10, 0.15, 0.25}}, {"alpha", linspace(0.0, 1.0, 21)}},
      {"fig3", {"alpha", {0.25, 0.5, 0.75, 0.9}}, {"h_C_Q", linspace(0.05, 0.3, 21)}},
  };

  std::filesystem::create_directories(directory);
  std::vector<std::string> written;
  for (const auto& fig : figures) {
    SweepSpec spec;
    spec.base = base;
    spec.claim = make_call(1.0, 1.0);
    spec.axis1 = fig.outer;
    spec.axis2 = fig.inner;
    spec.grid = grid;
    spec.solver.allow_arbitrage = true;
    const auto rows = run_sweep(spec, threads);

    struct Panel {
      std::string name;
      std::vector<std::string> columns;
    };
    const std::vector<Panel> panels{
        {"xva", {"xva_sell_rel", "xva_buy_rel"}}, {"xi", {"xi"}}, {"xi_I", {"xi_I"}}, {"xi_C", {"xi_C"}}};
    for (const auto& panel : panels) {
      const std::string file = fig.stem + "_" + panel.name + ".csv";
      std::ofstream os(std::filesystem::path(directory) / file);
      if (!os) throw std::runtime_error("cannot write " + file);
      os << fig.outer.name << ',' << fig.inner.name;
      for (const auto& c : panel.columns) os << ',' << c;
      os << ",status\n";
      for (const auto& row : rows) {
        os << format_number(row.value1) << ',' << format_number(*row.value2);
        const auto& r = row.report;
        for (const auto& c : panel.columns) {
          os << ',';
          if (!row.ok) continue;
          if (c == "xva_sell_rel") os << optional_number(r.xva_sell_rel);
          if (c == "xva_buy_rel") os << optional_number(r.xva_buy_rel);
          if (c == "xi") os << format_number(r.hedge_sell.xi);
          if (c == "xi_I") os << format_number(r.hedge_sell.xi_I);
          if (c == "xi_C") os << format_number(r.hedge_sell.xi_C);
        }
        os << ',' << (row.ok ? std::string("ok") : csv_quote("error: " + row.error)) << '\n';
      }
      written.push_back(file);
    }
  }
  return written;
}

std::vector<ConvergenceRow> convergence_study(const ClaimSpec& claim, const MarketConfig& cfg, int levels,
                                              ConvergenceMode mode, const GridParams& base,
                                              const SolverConfig& solver) {
  if (levels < 3) throw std::invalid_argument("convergence: levels must be >= 3");
  claim.validate();
  cfg.validate();

  const double x0 = std::log(claim.spot);
  std::vector<ConvergenceRow> rows;
  for (int k = 0; k < levels; ++k) {
    ConvergenceRow row;
    row.n_x = (base.n_x - 1) * (1 << k) + 1;
    row.n_t = base.n_t * (1 << k);
    const GridSpec grid = build_grid(claim, cfg, base.width_sigmas, row.n_x, row.n_t);
    row.dx = grid.dx();
    row.dt = grid.dt();
    if (mode == ConvergenceMode::linear) {
      row.value = benchmark_surface(grid, claim, cfg, solver).value_at(0.0, x0);
      row.error = std::abs(row.value - bs_closed_form(0.0, claim.spot, claim, cfg.r_D, cfg.sigma));
    } else {
      row.value = compute_xva(claim, cfg, grid, solver).v_plus_0;
    }
    rows.push_back(row);
  }

  if (mode == ConvergenceMode::linear) {
    for (int k = 1; k < levels; ++k) {
      if (rows[k].error > 0.0 && rows[k - 1].error > 0.0) rows[k].order = std::log2(rows[k - 1].error / rows[k].error);
    }
  } else {
    const double richest = rows.back().value;
    for (auto& row : rows) row.error = std::abs(row.value - richest);
    for (int k = 2; k < levels; ++k) {
      const double coarse = std::abs(rows[k - 1].value - rows[k - 2].value);
      const double fine = std::abs(rows[k].value - rows[k - 1].value);
      if (coarse > 0.0 && fine > 0.0) rows[k].order = std::log2(coarse / fine);
    }
  }
  return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "level,n_x,n_t,dx,dt,value,error,order\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    os << k << ',' << r.n_x << ',' << r.n_t << ',' << format_number(r.dx) << ',' << format_number(r.dt) << ','
       << format_number(r.value) << ',' << format_number(r.error) << ',' << optional_number(r.order) << '\n';
  }
}

}  // namespace xva
