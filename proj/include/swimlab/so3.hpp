#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace swimlab::so3 {

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> hat(const Eigen::MatrixBase<Derived>& w) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using S = typename Derived::Scalar;
  Eigen::Matrix<S, 3, 3> m;
  m << S(0), -w(2), w(1),
       w(2), S(0), -w(0),
       -w(1), w(0), S(0);
  return m;
}

/// Axial vector of the skew part of m.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> vee(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  return Eigen::Matrix<S, 3, 1>(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) / S(2);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> exp(const Eigen::MatrixBase<Derived>& w) {
  using S = typename Derived::Scalar;
  return Eigen::AngleAxis<S>(w.norm(), w.norm() > S(0) ? Eigen::Matrix<S, 3, 1>(w.normalized())
                                                       : Eigen::Matrix<S, 3, 1>::UnitZ())
      .toRotationMatrix();
}

/// Rotation vector of R (angle in [0, pi]).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> log(const Eigen::MatrixBase<Derived>& R) {
  using S = typename Derived::Scalar;
  const Eigen::AngleAxis<S> aa{Eigen::Matrix<S, 3, 3>(R)};
  return aa.angle() * aa.axis();
}

/// Nearest rotation in the Frobenius norm (orthogonal polar factor).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> project(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  Eigen::JacobiSVD<Eigen::Matrix<S, 3, 3>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix<S, 3, 3> u = svd.matrixU();
  if ((u * svd.matrixV().transpose()).determinant() < S(0)) u.col(2) *= S(-1);
  return u * svd.matrixV().transpose();
}

template <typename Derived>
typename Derived::Scalar orthogonality_defect(const Eigen::MatrixBase<Derived>& R) {
  using S = typename Derived::Scalar;
  return (R.transpose() * R - Eigen::Matrix<S, 3, 3>::Identity()).norm();
}

}  // namespace swimlab::so3
