#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace swimlab {

using Complex = std::complex<double>;

/// Homogeneous polynomial of fixed degree d in (x, y, z) with complex
/// coefficients; the term x^a y^b z^(d-a-b) is stored at coeff(a, b).
class HomogeneousPolynomial {
 public:
  explicit HomogeneousPolynomial(int degree);

  int degree() const { return degree_; }
  Complex& coeff(int a, int b) { return coeffs_[index(a, b)]; }
  Complex coeff(int a, int b) const { return coeffs_[index(a, b)]; }

  Complex value(const Eigen::Vector3d& x) const;
  Eigen::Vector3cd gradient(const Eigen::Vector3d& x) const;
  Eigen::Matrix3cd hessian(const Eigen::Vector3d& x) const;

  HomogeneousPolynomial operator*(const HomogeneousPolynomial& other) const;
  HomogeneousPolynomial& operator*=(Complex s);
  HomogeneousPolynomial& operator+=(const HomogeneousPolynomial& other);

 private:
  int index(int a, int b) const;

  int degree_;
  std::vector<Complex> coeffs_;
};

inline constexpr int kMaxSolidHarmonicDegree = 20;

/// Regular solid harmonic rho^n Y_{n,m}(x/rho) with Y orthonormal on the unit
/// sphere and Condon-Shortley phase. Built once per (n, m) and cached.
const HomogeneousPolynomial& regular_solid_harmonic(int n, int m);

/// Value, gradient and Hessian of an irregular solid harmonic
/// rho^{-(n+1)} Y_{n,m}(x/rho) = rho^{-(2n+1)} R_{n,m}(x).
struct SolidHarmonicJet {
  Complex value;
  Eigen::Vector3cd gradient;
  Eigen::Matrix3cd hessian;
};

SolidHarmonicJet irregular_solid_harmonic_jet(int n, int m, const Eigen::Vector3d& x);

}  // namespace swimlab
