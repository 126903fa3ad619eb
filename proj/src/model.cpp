#include "xva/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xva {

namespace {

struct FieldRef {
  const char* name;
  double MarketConfig::*member;
};

constexpr FieldRef kFields[] = {
    {"sigma", &MarketConfig::sigma},         {"r_D", &MarketConfig::r_D},
    {"r_f_plus", &MarketConfig::r_f_plus},   {"r_f_minus", &MarketConfig::r_f_minus},
    {"r_r_plus", &MarketConfig::r_r_plus},   {"r_r_minus", &MarketConfig::r_r_minus},
    {"r_c_plus", &MarketConfig::r_c_plus},   {"r_c_minus", &MarketConfig::r_c_minus},
    {"r_I", &MarketConfig::r_I},             {"r_C", &MarketConfig::r_C},
    {"h_I_Q", &MarketConfig::h_I_Q},         {"h_C_Q", &MarketConfig::h_C_Q},
    {"L_I", &MarketConfig::L_I},             {"L_C", &MarketConfig::L_C},
    {"alpha", &MarketConfig::alpha},
};

const FieldRef& find_field(const std::string& name) {
  for (const auto& f : kFields) {
    if (name == f.name) return f;
  }
  throw std::invalid_argument("unknown market parameter '" + name + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

}  // namespace

void MarketConfig::validate() const {
  for (const auto& f : kFields) {
    require(std::isfinite(this->*f.member), f.name, "must be finite");
  }
  require(sigma > 0.0, "sigma", "must be > 0");
  require(h_I_Q >= 0.0, "h_I_Q", "must be >= 0");
  require(h_C_Q >= 0.0, "h_C_Q", "must be >= 0");
  require(L_I >= 0.0 && L_I <= 1.0, "L_I", "must lie in [0, 1]");
  require(L_C >= 0.0 && L_C <= 1.0, "L_C", "must lie in [0, 1]");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha", "must lie in [0, 1]");
}

const std::vector<std::string>& MarketConfig::field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kFields) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

double MarketConfig::get(const std::string& name) const { return this->*find_field(name).member; }

void MarketConfig::set(const std::string& name, double value) { this->*find_field(name).member = value; }

MarketConfig benchmark_config() { return MarketConfig{}; }

double intensity_q_to_p(double h_Q, double r_bond, double r_D) {
  const double h_P = h_Q - (r_bond - r_D);
  if (h_P < 0.0) {
    throw std::domain_error("negative P-intensity " + fmt(h_P) + " from h_Q=" + fmt(h_Q) +
                            ", r_bond=" + fmt(r_bond) + ", r_D=" + fmt(r_D));
  }
  return h_P;
}

double intensity_p_to_q(double h_P, double r_bond, double r_D) { return h_P + (r_bond - r_D); }

CreditP credit_p(const MarketConfig& cfg) {
  return {cfg.h_I_Q - (cfg.r_I - cfg.r_D), cfg.h_C_Q - (cfg.r_C - cfg.r_D)};
}

std::vector<Violation> validate_no_arbitrage(const MarketConfig& cfg) {
  std::vector<Violation> out;
  const CreditP p = credit_p(cfg);
  const double yield_I = cfg.r_I + p.h_I_P;
  const double yield_C = cfg.r_C + p.h_C_P;

  auto check = [&](bool ok, const char* condition, const std::string& detail) {
    if (!ok) out.push_back({condition, detail});
  };

  check(p.h_I_P >= 0.0, "h_I^P >= 0", "h_I^P = " + fmt(p.h_I_P));
  check(p.h_C_P >= 0.0, "h_C^P >= 0", "h_C^P = " + fmt(p.h_C_P));
  check(cfg.r_r_plus <= cfg.r_f_plus, "r_r+ <= r_f+",
        "r_r+ = " + fmt(cfg.r_r_plus) + ", r_f+ = " + fmt(cfg.r_f_plus));
  check(cfg.r_f_plus <= cfg.r_r_minus, "r_f+ <= r_r-",
        "r_f+ = " + fmt(cfg.r_f_plus) + ", r_r- = " + fmt(cfg.r_r_minus));
  check(cfg.r_f_plus <= cfg.r_f_minus, "r_f+ <= r_f-",
        "r_f+ = " + fmt(cfg.r_f_plus) + ", r_f- = " + fmt(cfg.r_f_minus));
  const double carry = std::max(cfg.r_f_plus, cfg.r_D);
  check(carry < yield_I, "max(r_f+, r_D) < r_I + h_I^P",
        "max(r_f+, r_D) = " + fmt(carry) + ", r_I + h_I^P = " + fmt(yield_I));
  check(carry < yield_C, "max(r_f+, r_D) < r_C + h_C^P",
        "max(r_f+, r_D) = " + fmt(carry) + ", r_C + h_C^P = " + fmt(yield_C));
  const double coll = std::max(cfg.r_c_plus, cfg.r_c_minus);
  check(coll <= cfg.r_f_minus, "max(r_c+, r_c-) <= r_f-",
        "max(r_c+, r_c-) = " + fmt(coll) + ", r_f- = " + fmt(cfg.r_f_minus));
  const double cap = std::min(yield_I, yield_C);
  check(cfg.r_f_minus <= cap, "r_f- <= min(r_I + h_I^P, r_C + h_C^P)",
        "r_f- = " + fmt(cfg.r_f_minus) + ", min = " + fmt(cap));
  return out;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::string out = "rate configuration admits hedger's arbitrage:";
  for (const auto& v : violations) out += " [" + v.condition + ": " + v.detail + "]";
  return out;
}

}  // namespace

ArbitrageError::ArbitrageError(std::vector<Violation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

void require_no_arbitrage(const MarketConfig& cfg) {
  auto violations = validate_no_arbitrage(cfg);
  if (!violations.empty()) throw ArbitrageError(std::move(violations));
}

void ClaimSpec::validate() const {
  if (!(maturity > 0.0) || !std::isfinite(maturity)) {
    throw std::invalid_argument("maturity: must be > 0");
  }
  if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("strike: must be > 0");
  if (!(spot > 0.0) || !std::isfinite(spot)) throw std::invalid_argument("spot: must be > 0");
  if (kind == PayoffKind::custom) {
    if (knots.size() < 2) throw std::invalid_argument("knots: need at least two knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second) || knots[i].first < 0.0) {
        throw std::invalid_argument("knots: knot " + std::to_string(i) + " is not a finite point with s >= 0");
      }
      if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
        throw std::invalid_argument("knots: spots must be strictly increasing");
      }
    }
  }
}

double ClaimSpec::payoff(double s) const {
  switch (kind) {
    case PayoffKind::call:
      return std::max(s - strike, 0.0);
    case PayoffKind::put:
      return std::max(strike - s, 0.0);
    case PayoffKind::custom:
      break;
  }
  // Segment index: first knot strictly right of s, clamped to [1, n-1].
  const auto it = std::upper_bound(knots.begin(), knots.end(), s,
                                   [](double v, const auto& k) { return v < k.first; });
  std::size_t hi = static_cast<std::size_t>(it - knots.begin());
  hi = std::clamp<std::size_t>(hi, 1, knots.size() - 1);
  const auto& [s0, v0] = knots[hi - 1];
  const auto& [s1, v1] = knots[hi];
  return v0 + (v1 - v0) * (s - s0) / (s1 - s0);
}

std::vector<double> ClaimSpec::kinks() const {
  if (kind != PayoffKind::custom) return {strike};
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) out.push_back(knots[i].first);
  return out;
}

double ClaimSpec::log_cell_average(double y_lo, double y_hi) const {
  if (!(y_hi > y_lo)) return payoff(std::exp(y_lo));
  // Phi is affine in s between kinks: integral of a + b e^y is a*dy + b*(e^y1 - e^y0).
  std::vector<double> cuts{y_lo};
  for (double k : kinks()) {
    if (k > 0.0) {
      const double y = std::log(k);
      if (y > y_lo && y < y_hi) cuts.push_back(y);
    }
  }
  cuts.push_back(y_hi);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double s0 = std::exp(cuts[i]);
    const double s1 = std::exp(cuts[i + 1]);
    if (!(s1 > s0)) continue;  // kink within rounding of a cell edge
    const double v0 = payoff(s0);
    const double v1 = payoff(s1);
    const double slope = (v1 - v0) / (s1 - s0);
    const double intercept = v0 - slope * s0;
    integral += intercept * (cuts[i + 1] - cuts[i]) + slope * (s1 - s0);
  }
  return integral / (y_hi - y_lo);
}

ClaimSpec make_call(double strike, double maturity, double spot) {
  return {PayoffKind::call, strike, maturity, spot, {}};
}

ClaimSpec make_put(double strike, double maturity, double spot) {
  return {PayoffKind::put, strike, maturity, spot, {}};
}

ClaimSpec make_custom(std::vector<std::pair<double, double>> knots, double maturity, double strike,
                      double spot) {
  return {PayoffKind::custom, strike, maturity, spot, std::move(knots)};
}

PayoffKind parse_payoff_kind(const std::string& name) {
  if (name == "call") return PayoffKind::call;
  if (name == "put") return PayoffKind::put;
  if (name == "custom") return PayoffKind::custom;
  throw std::invalid_argument("unknown claim kind '" + name + "' (expected call, put or custom)");
}

std::string to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::call:
      return "call";
    case PayoffKind::put:
      return "put";
    case PayoffKind::custom:
      return "custom";
  }
  return "?";
}

}  // namespace xva
