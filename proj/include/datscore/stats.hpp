#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>

namespace datscore::stats {

// Shannon entropy -sum p ln p in nats. Zero-probability entries contribute 0.
template <typename Derived>
typename Derived::Scalar entropy_nats(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p.derived().coeff(i);
    if (pi > Scalar(0)) h -= pi * std::log(pi);
  }
  return h;
}

// Exact test: every coefficient equal. Pearson is undefined on such data.
template <typename Derived>
bool is_constant(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 || x.minCoeff() == x.maxCoeff();
}

// Pearson product-moment correlation of two equally sized vectors.
// Returns nullopt when either vector has zero variance.
template <typename DerivedX, typename DerivedY>
std::optional<typename DerivedX::Scalar> pearson(const Eigen::MatrixBase<DerivedX>& x,
                                                 const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  eigen_assert(x.size() == y.size());
  if (is_constant(x) || is_constant(y)) return std::nullopt;
  const auto dx = (x.array() - x.mean()).matrix().eval();
  const auto dy = (y.array() - y.mean()).matrix().eval();
  const Scalar denom = std::sqrt(dx.squaredNorm() * dy.squaredNorm());
  if (!(denom > Scalar(0))) return std::nullopt;
  return std::clamp(dx.dot(dy) / denom, Scalar(-1), Scalar(1));
}

// Column-by-column Pearson matrix. Pairs involving a zero-variance column are 0
// and the diagonal is 1 for non-constant columns.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> column_correlations(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = m.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> corr =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const Scalar r = pearson(m.col(a), m.col(b)).value_or(Scalar(0));
      corr(a, b) = r;
      corr(b, a) = r;
    }
  }
  return corr;
}

}  // namespace datscore::stats
