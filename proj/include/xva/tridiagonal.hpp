#ifndef XVA_TRIDIAGONAL_HPP
#define XVA_TRIDIAGONAL_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace xva {

/// LU factorisation of a tridiagonal matrix (Thomas algorithm). Factor once,
/// then each solve is O(n).
///
/// lower(i) multiplies x(i-1) in row i (lower(0) unused), upper(i) multiplies
/// x(i+1) (upper(n-1) unused).
template <typename Scalar>
class TridiagonalLU {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalLU() = default;

  TridiagonalLU(const Vector& lower, const Vector& diag, const Vector& upper) { factor(lower, diag, upper); }

  void factor(const Vector& lower, const Vector& diag, const Vector& upper) {
    const Eigen::Index n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
      throw std::invalid_argument("tridiagonal: band sizes must match and be non-empty");
    }
    lower_ = lower;
    upper_ = upper;
    pivot_.resize(n);
    pivot_(0) = diag(0);
    check_pivot(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      pivot_(i) = diag(i) - lower_(i) * upper_(i - 1) / pivot_(i - 1);
      check_pivot(i);
    }
  }

  Eigen::Index size() const { return pivot_.size(); }

  template <typename Rhs>
  Vector solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    const Eigen::Index n = size();
    if (rhs.size() != n) throw std::invalid_argument("tridiagonal: rhs size mismatch");
    Vector y(n);
    y(0) = rhs(0);
    for (Eigen::Index i = 1; i < n; ++i) y(i) = rhs(i) - lower_(i) / pivot_(i - 1) * y(i - 1);
    Vector x(n);
    x(n - 1) = y(n - 1) / pivot_(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = (y(i) - upper_(i) * x(i + 1)) / pivot_(i);
    return x;
  }

 private:
  void check_pivot(Eigen::Index i) const {
    if (pivot_(i) == Scalar(0)) throw std::runtime_error("tridiagonal: zero pivot");
  }

  Vector lower_;
  Vector upper_;
  Vector pivot_;
};

/// y = T x for the same band convention.
template <typename Scalar, typename X>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tridiagonal_multiply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
                                                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
                                                              const Eigen::MatrixBase<X>& x) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = diag(i) * x(i);
    if (i > 0) acc += lower(i) * x(i - 1);
    if (i + 1 < n) acc += upper(i) * x(i + 1);
    y(i) = acc;
  }
  return y;
}

}  // namespace xva

#endif  // XVA_TRIDIAGONAL_HPP
