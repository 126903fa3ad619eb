#ifndef XVA_CLOSEOUT_HPP
#define XVA_CLOSEOUT_HPP

#include "xva/driver.hpp"

namespace xva {

/// Contract value settled when the trader defaults first.
template <typename Scalar>
inline Scalar closeout_I(Scalar v_hat, double alpha, double L_I) {
  return v_hat - Scalar(L_I) * positive_part(Scalar(1.0 - alpha) * v_hat);
}

/// Contract value settled when the counterparty defaults first.
template <typename Scalar>
inline Scalar closeout_C(Scalar v_hat, double alpha, double L_C) {
  return v_hat + Scalar(L_C) * negative_part(Scalar(1.0 - alpha) * v_hat);
}

/// Variation margin C = alpha * v_hat.
template <typename Scalar>
inline Scalar collateral(Scalar v_hat, double alpha) {
  return Scalar(alpha) * v_hat;
}

}  // namespace xva

#endif  // XVA_CLOSEOUT_HPP
