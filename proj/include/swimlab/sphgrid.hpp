#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "swimlab/solid_harmonic.hpp"

namespace swimlab {

enum class HarmonicPart { Real, Imag };

/// Normalization of the complex spherical harmonics. All conventions carry
/// the Condon-Shortley phase; they differ by a per-degree factor.
enum class HarmonicConvention {
  Orthonormal,  ///< int |Y|^2 = 1
  FourPi,       ///< int |Y|^2 = 4 pi
  Schmidt,      ///< int |Y|^2 = 4 pi / (2n + 1)
};

/// Factor f(n) with Y^{convention}_{n,m} = f(n) Y^{orthonormal}_{n,m}.
double convention_factor(HarmonicConvention convention, int degree);

struct HarmonicIndex {
  int degree = 0;
  int order = 0;
  HarmonicPart part = HarmonicPart::Real;

  /// Throws DomainError unless |m| <= n and (part == Imag implies m >= 1).
  void validate() const;
};

/// Y_{n,m}(cos beta, alpha); alpha is the azimuth, beta the polar angle.
Complex eval_harmonic(const HarmonicIndex& idx, double alpha, double beta,
                      HarmonicConvention convention = HarmonicConvention::Orthonormal);

/// Real or imaginary part of Y_{n,m} (selected by idx.part) at a unit vector.
double eval_real_harmonic(const HarmonicIndex& idx, const Eigen::Vector3d& unit,
                          HarmonicConvention convention = HarmonicConvention::Orthonormal);

/// Orthonormal Y_{n,m} and its tangential gradient at a unit vector,
/// evaluated from the solid-harmonic polynomial.
Complex harmonic_at(int n, int m, const Eigen::Vector3d& unit);
Eigen::Vector3cd harmonic_surface_gradient(int n, int m, const Eigen::Vector3d& unit);

struct SphereQuadrature {
  Eigen::VectorXd azimuth;  // alpha per node
  Eigen::VectorXd polar;    // beta per node
  Eigen::Matrix3Xd points;  // unit vectors
  Eigen::VectorXd weights;
  int max_exact_degree = 0;

  Eigen::Index size() const { return weights.size(); }
};

/// Gauss-Legendre in cos(beta) times uniform azimuth; exact for spherical
/// polynomials of degree <= L.
std::shared_ptr<const SphereQuadrature> build_quadrature(int L);

/// Three-vector per quadrature node.
class SurfaceField {
 public:
  SurfaceField(std::shared_ptr<const SphereQuadrature> quadrature, Eigen::Matrix3Xd values);

  static SurfaceField zero(std::shared_ptr<const SphereQuadrature> quadrature);
  static SurfaceField sample(std::shared_ptr<const SphereQuadrature> quadrature,
                             const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f);

  const SphereQuadrature& quadrature() const { return *quadrature_; }
  const std::shared_ptr<const SphereQuadrature>& quadrature_ptr() const { return quadrature_; }
  const Eigen::Matrix3Xd& values() const { return values_; }

  /// Quadrature of the field, i.e. int_Sigma f dsigma.
  Eigen::Vector3d integral() const;

  SurfaceField& operator+=(const SurfaceField& other);
  SurfaceField& operator*=(double s);

 private:
  std::shared_ptr<const SphereQuadrature> quadrature_;
  Eigen::Matrix3Xd values_;
};

SurfaceField operator+(SurfaceField a, const SurfaceField& b);
SurfaceField operator*(double s, SurfaceField a);

/// Surface inner product int_Sigma f . g dsigma.
double surface_inner(const SurfaceField& f, const SurfaceField& g);

/// Per (n, m) with n <= max_degree: <Y, f.e_r>, <Y, div_s f>, <Y, e_r.curl f>.
struct ProjectionTable {
  int max_degree = 0;
  std::vector<Complex> radial;
  std::vector<Complex> divergence;
  std::vector<Complex> curl;

  static int index(int n, int m) { return n * n + n + m; }
};

ProjectionTable surface_projections(const SurfaceField& f, int L);

}  // namespace swimlab
