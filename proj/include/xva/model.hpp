#ifndef XVA_MODEL_HPP
#define XVA_MODEL_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xva {

/// Market, funding and credit parameters. All rates are continuously
/// compounded per year; default intensities are stored under the valuation
/// measure Q.
struct MarketConfig {
  double sigma = 0.2;
  double r_D = 0.01;
  double r_f_plus = 0.05;
  double r_f_minus = 0.08;
  double r_r_plus = 0.05;
  double r_r_minus = 0.05;
  double r_c_plus = 0.01;
  double r_c_minus = 0.01;
  double r_I = 0.03;
  double r_C = 0.04;
  double h_I_Q = 0.2;
  double h_C_Q = 0.15;
  double L_I = 0.5;
  double L_C = 0.5;
  double alpha = 0.9;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  static const std::vector<std::string>& field_names();
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
};

/// Reference parameter set (at-the-money call,
/// asymmetric funding, 90% collateral).
MarketConfig benchmark_config();

/// Default intensities under the physical measure.
struct CreditP {
  double h_I_P = 0.0;
  double h_C_P = 0.0;
};

/// h^P = h^Q - r_bond + r_D. Throws std::domain_error if the result is negative.
double intensity_q_to_p(double h_Q, double r_bond, double r_D);
/// h^Q = h^P + r_bond - r_D.
double intensity_p_to_q(double h_P, double r_bond, double r_D);

/// Unchecked P-intensities of both names (may be negative for bad inputs).
CreditP credit_p(const MarketConfig& cfg);

struct Violation {
  std::string condition;
  std::string detail;
};

/// Checks the hedger's no-arbitrage rate conditions. One entry per violated
/// inequality; an empty result means the configuration is admissible.
std::vector<Violation> validate_no_arbitrage(const MarketConfig& cfg);

/// Raised by solvers handed a configuration that admits hedger's arbitrage.
class ArbitrageError : public std::invalid_argument {
 public:
  explicit ArbitrageError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws ArbitrageError unless the configuration is admissible.
void require_no_arbitrage(const MarketConfig& cfg);

enum class PayoffKind { call, put, custom };

/// European payoff Phi(S_T). Custom payoffs are piecewise linear through
/// (spot, value) knots and extrapolate linearly beyond the end knots.
struct ClaimSpec {
  PayoffKind kind = PayoffKind::call;
  double strike = 1.0;
  double maturity = 1.0;
  double spot = 1.0;
  std::vector<std::pair<double, double>> knots;

  /// Throws std::invalid_argument on a malformed claim.
  void validate() const;

  double payoff(double s) const;

  /// Spot levels where the payoff has a kink.
  std::vector<double> kinks() const;

  /// Exact mean of Phi(e^y) for y uniform on [y_lo, y_hi].
  double log_cell_average(double y_lo, double y_hi) const;
};

ClaimSpec make_call(double strike, double maturity, double spot = 1.0);
ClaimSpec make_put(double strike, double maturity, double spot = 1.0);
ClaimSpec make_custom(std::vector<std::pair<double, double>> knots, double maturity,
                      double strike = 1.0, double spot = 1.0);

PayoffKind parse_payoff_kind(const std::string& name);
std::string to_string(PayoffKind kind);

}  // namespace xva

#endif  // XVA_MODEL_HPP
