#pragma once

#include <vector>

#include <Eigen/Dense>

#include "swimlab/sphgrid.hpp"

namespace swimlab {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Exterior Stokes field around the unit ball in Lamb form. Entry [n][n + m]
/// of each family multiplies the irregular solid harmonic of degree -(n+1):
///   p   -> pressure,
///   phi -> potential part,
///   chi -> toroidal part.
/// Degree 0 is kept for indexing and is always zero.
struct LambSolution {
  int max_degree = 0;
  std::vector<Eigen::VectorXcd> p;
  std::vector<Eigen::VectorXcd> phi;
  std::vector<Eigen::VectorXcd> chi;

  static LambSolution zero(int max_degree);

  LambSolution& operator+=(const LambSolution& other);
  LambSolution& operator*=(double s);
};

/// Torque and force in the body frame, angular part first.
struct Wrench {
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  Eigen::Vector3d force = Eigen::Vector3d::Zero();

  Vector6d as_vector() const {
    Vector6d v;
    v << torque, force;
    return v;
  }
};

inline constexpr int kDefaultLambDegree = 6;

double lamb_alpha(int n);  // coefficient of rho^2 grad p
double lamb_beta(int n);   // coefficient of p x

/// Decaying Stokes solution matching `data` on the unit sphere, truncated at
/// degree n0. Throws PrecisionError when the quadrature is not exact to
/// degree 2 n0 + 2 and IncompatibleDataError on a net flux through the sphere.
LambSolution solve_boundary(const SurfaceField& data, int n0 = kDefaultLambDegree);

/// Velocity at |x| >= 1.
Eigen::Vector3d eval_velocity(const LambSolution& sol, const Eigen::Vector3d& x);

/// Pressure (unit viscosity) at |x| >= 1.
double eval_pressure(const LambSolution& sol, const Eigen::Vector3d& x);

/// Velocity gradient G(i, k) = d u_i / d x_k at a point of the unit sphere.
Eigen::Matrix3d eval_velocity_gradient(const LambSolution& sol, const Eigen::Vector3d& x);

/// Force and torque read off the degree-1 block.
Wrench force_torque(const LambSolution& sol);

namespace detail {

// Series evaluation without the domain checks; valid for any x != 0.
Eigen::Vector3d velocity_series(const LambSolution& sol, const Eigen::Vector3d& x);
Eigen::Matrix3d velocity_gradient_series(const LambSolution& sol, const Eigen::Vector3d& x);

}  // namespace detail

}  // namespace swimlab
