#ifndef XVA_DRIVER_HPP
#define XVA_DRIVER_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "xva/model.hpp"

namespace xva {

enum class Side { seller, buyer };

template <typename Scalar>
inline Scalar positive_part(Scalar x) {
  return x > Scalar(0) ? x : Scalar(0);
}

template <typename Scalar>
inline Scalar negative_part(Scalar x) {
  return x < Scalar(0) ? -x : Scalar(0);
}

// Account rates. Both indicators vanish at a zero position, so the rate is 0 there.

template <typename Scalar>
inline Scalar rate_repo(Scalar x, const MarketConfig& cfg) {
  if (x < Scalar(0)) return Scalar(cfg.r_r_minus);
  if (x > Scalar(0)) return Scalar(cfg.r_r_plus);
  return Scalar(0);
}

template <typename Scalar>
inline Scalar rate_fund(Scalar y, const MarketConfig& cfg) {
  if (y < Scalar(0)) return Scalar(cfg.r_f_minus);
  if (y > Scalar(0)) return Scalar(cfg.r_f_plus);
  return Scalar(0);
}

template <typename Scalar>
inline Scalar rate_coll(Scalar x, const MarketConfig& cfg) {
  if (x > Scalar(0)) return Scalar(cfg.r_c_plus);
  if (x < Scalar(0)) return Scalar(cfg.r_c_minus);
  return Scalar(0);
}

/// Arguments of the BSDE generator: wealth v, Brownian integrand z (currency,
/// z = xi sigma S), default-jump integrands z_I and z_C, benchmark price v_hat.
template <typename Scalar>
struct BasicDriverInputs {
  Scalar v{0};
  Scalar z{0};
  Scalar z_I{0};
  Scalar z_C{0};
  Scalar v_hat{0};
};

using DriverInputs = BasicDriverInputs<double>;

/// Generator of the seller's BSDE: minus the drift of the replicating wealth
/// (funding carry on v + z_I + z_C - C, repo carry on the stock position,
/// bond carry, collateral remuneration on C = alpha v_hat).
template <typename Scalar>
Scalar f_seller(const BasicDriverInputs<Scalar>& in, const MarketConfig& cfg) {
  const Scalar collateral = Scalar(cfg.alpha) * in.v_hat;
  const Scalar funding = in.v + in.z_I + in.z_C - collateral;
  const Scalar carry =
      Scalar(cfg.r_f_plus) * positive_part(funding) - Scalar(cfg.r_f_minus) * negative_part(funding) +
      Scalar(cfg.r_D - cfg.r_r_minus) * positive_part(in.z) / Scalar(cfg.sigma) -
      Scalar(cfg.r_D - cfg.r_r_plus) * negative_part(in.z) / Scalar(cfg.sigma) - Scalar(cfg.r_D) * in.z_I -
      Scalar(cfg.r_D) * in.z_C + Scalar(cfg.r_c_plus) * positive_part(collateral) -
      Scalar(cfg.r_c_minus) * negative_part(collateral);
  return -carry;
}

/// Buyer's generator, the sign reflection of the seller's.
template <typename Scalar>
Scalar f_buyer(const BasicDriverInputs<Scalar>& in, const MarketConfig& cfg) {
  return -f_seller(BasicDriverInputs<Scalar>{-in.v, -in.z, -in.z_I, -in.z_C, -in.v_hat}, cfg);
}

template <typename Scalar>
Scalar driver(Side side, const BasicDriverInputs<Scalar>& in, const MarketConfig& cfg) {
  return side == Side::seller ? f_seller(in, cfg) : f_buyer(in, cfg);
}

/// Lipschitz bound of f in (v, z, z_I, z_C) under the l1 norm of increments.
inline double driver_lipschitz_bound(const MarketConfig& cfg) {
  return std::max(cfg.r_f_minus, cfg.r_f_plus) + std::abs(cfg.r_D - cfg.r_r_minus) / cfg.sigma +
         std::abs(cfg.r_D - cfg.r_r_plus) / cfg.sigma + 2.0 * cfg.r_D;
}

std::string to_string(Side side);
Side parse_side(const std::string& name);

}  // namespace xva

#endif  // XVA_DRIVER_HPP
