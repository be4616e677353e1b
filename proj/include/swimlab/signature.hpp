#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "swimlab/mobility.hpp"

namespace swimlab {

/// Axis-aligned admissible region for the shape parameters.
struct ShapeBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static ShapeBox symmetric(Eigen::Index n, double half_width);

  Eigen::Index size() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& s, double tol = 1e-12) const;
};

/// Deformation modes, admissible box and first-order resistance data.
/// Indices i, j, k below are zero-based mode indices.
class SwimmerSignature {
 public:
  /// Validates the modes (independent, self-propelled) and the box; throws
  /// SignatureError on failure.
  SwimmerSignature(std::vector<DeformationMode> modes, ShapeBox box, ResistanceSet resistance,
                   std::shared_ptr<const SphereQuadrature> quadrature);

  /// Computes the resistance set with the Lamb solver.
  static SwimmerSignature build(std::vector<DeformationMode> modes, ShapeBox box,
                                std::shared_ptr<const SphereQuadrature> quadrature);

  Eigen::Index size() const { return static_cast<Eigen::Index>(modes_.size()); }
  const std::vector<DeformationMode>& modes() const { return modes_; }
  const ShapeBox& box() const { return box_; }
  const ResistanceSet& resistance() const { return resistance_; }
  const std::shared_ptr<const SphereQuadrature>& quadrature() const { return quadrature_; }
  const Matrix6d& mobility_inverse() const { return m_inv_; }

  double gram_condition() const { return gram_condition_; }
  double constraint_residual() const { return constraint_residual_; }

  /// Body twist -M^{-1} N(s) lambda for shape rates lambda.
  Vector6d twist(const Eigen::VectorXd& s, const Eigen::VectorXd& rates) const;

  /// Same signature with every resistance matrix multiplied by mu.
  SwimmerSignature with_viscosity(double mu) const;

 private:
  std::vector<DeformationMode> modes_;
  ShapeBox box_;
  ResistanceSet resistance_;
  std::shared_ptr<const SphereQuadrature> quadrature_;
  Matrix6d m_inv_;
  double gram_condition_ = 0.0;
  double constraint_residual_ = 0.0;
};

/// Gram matrix of the boundary fields under the surface inner product.
Eigen::MatrixXd mode_gram_matrix(const std::vector<DeformationMode>& modes,
                                 const std::shared_ptr<const SphereQuadrature>& quadrature);

/// Largest of |int V|, |int x x V| and |int V_i x V_j| over the modes.
double self_propelled_residual(const std::vector<DeformationMode>& modes,
                               const std::shared_ptr<const SphereQuadrature>& quadrature);

/// Vector field on SO(3) x R^3 x R^n written in body components.
struct ControlField {
  Vector6d body_twist = Vector6d::Zero();  // (Omega, v)
  Eigen::VectorXd shape_rate;

  /// (6 + n)-vector: angular, linear, shape.
  Eigen::VectorXd stacked() const;
};

ControlField generator(const SwimmerSignature& sig, int i, const Eigen::VectorXd& s);

ControlField lie_bracket(const SwimmerSignature& sig, int i, int j, const Eigen::VectorXd& s);

/// [Z_k, [Z_i, Z_j]] with s-derivatives of the inner bracket by central
/// differences of step h.
ControlField depth_two_bracket(const SwimmerSignature& sig, int k, int i, int j, const Eigen::VectorXd& s,
                               double h = 1e-5);

struct BracketRecord {
  std::vector<int> word;  // mode indices, outermost first
  ControlField field;
};

struct RankCertificate {
  int rank = 0;
  int target = 0;
  int depth = 1;
  int bracket_span = 0;  // rank of the twist parts of the first-order brackets
  std::vector<double> singular_values;
  std::vector<BracketRecord> brackets;
  bool controllable = false;
};

inline constexpr double kRankThreshold = 1e-8;

/// Numerical rank with cutoff rel_tol * sigma_max; singular values decreasing.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kRankThreshold,
                   std::vector<double>* singular_values = nullptr);

RankCertificate rank_certificate(const SwimmerSignature& sig, const Eigen::VectorXd& s);

/// One random admissible perturbation of surface norm <= delta per mode,
/// made of decaying radial harmonics of degree 2..4.
SwimmerSignature perturb_signature(const SwimmerSignature& sig, double delta, std::mt19937_64& rng);

/// Returns sig if it certifies at s = 0; otherwise perturbs until it does.
/// Throws NoCertificateError with the best rank when the budget runs out.
SwimmerSignature perturb_to_controllable(const SwimmerSignature& sig, double delta, std::uint64_t seed,
                                         int max_tries = 20);

}  // namespace swimlab
