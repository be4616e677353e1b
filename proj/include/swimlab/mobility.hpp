#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "swimlab/lamb.hpp"
#include "swimlab/sphgrid.hpp"

namespace swimlab {

using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Radial deformation amplitude * rho^radial_exponent * (Re|Im) Y_{n,m} e_rho,
/// optionally plus small decaying radial terms (used by signature perturbation).
struct DeformationMode {
  struct Term {
    HarmonicIndex harmonic;
    double amplitude = 0.0;
  };

  HarmonicIndex harmonic;
  int radial_exponent = -1;
  double amplitude = 1.0;
  std::vector<Term> extra;  // each with exponent -(degree + 1)

  /// Mode with the decaying exponent -(n+1).
  static DeformationMode decaying(HarmonicIndex idx, double amplitude = 1.0);

  void validate() const;
  int max_degree() const;

  /// Full vector field at any x != 0.
  Eigen::Vector3d field(const Eigen::Vector3d& x) const;
};

/// The four degree-3/4 modes used as the reference swimmer.
std::vector<DeformationMode> reference_modes();

struct ResistanceSet {
  Matrix6d M = Matrix6d::Zero();
  Matrix6Xd N;
  std::vector<Matrix6Xd> dN;  // dN[k] = d N / d s_k at s = 0

  Eigen::Index mode_count() const { return N.cols(); }

  /// N(s) = N + sum_k s_k dN_k under the first-order model.
  Matrix6Xd coupling_at(const Eigen::VectorXd& s) const;

  /// Every matrix multiplied by a viscosity mu.
  ResistanceSet scaled(double mu) const;
};

/// e_i x x (i = 1..3) or e_{i-3} (i = 4..6) on the given grid.
SurfaceField rigid_boundary_field(int i, std::shared_ptr<const SphereQuadrature> quadrature);

SurfaceField mode_boundary_field(const DeformationMode& mode, std::shared_ptr<const SphereQuadrature> quadrature);

Matrix6d grand_resistance_sphere(std::shared_ptr<const SphereQuadrature> quadrature);
Matrix6Xd coupling_matrix(const std::vector<DeformationMode>& modes,
                          std::shared_ptr<const SphereQuadrature> quadrature);

/// d N / d s_k with k zero-based. Column j is the wrench of the exterior
/// solution with boundary data -grad(u_j) V_k on the sphere.
Matrix6Xd coupling_derivative(int k, const std::vector<DeformationMode>& modes,
                              std::shared_ptr<const SphereQuadrature> quadrature);

ResistanceSet resistance_set(const std::vector<DeformationMode>& modes,
                             std::shared_ptr<const SphereQuadrature> quadrature);

}  // namespace swimlab
