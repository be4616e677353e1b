#include "swimlab/solid_harmonic.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "swimlab/errors.hpp"

namespace swimlab {

HomogeneousPolynomial::HomogeneousPolynomial(int degree)
    : degree_(degree), coeffs_(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2)) {
  if (degree < 0) throw DomainError("negative polynomial degree");
}

// Terms are grouped by a; within a group b runs 0..degree-a.
int HomogeneousPolynomial::index(int a, int b) const {
  return a * (degree_ + 1) - a * (a - 1) / 2 + b;
}

namespace {

std::vector<double> powers(double v, int n) {
  std::vector<double> p(static_cast<std::size_t>(n + 1), 1.0);
  for (int k = 1; k <= n; ++k) p[k] = p[k - 1] * v;
  return p;
}

}  // namespace

Complex HomogeneousPolynomial::value(const Eigen::Vector3d& x) const {
  const auto px = powers(x(0), degree_), py = powers(x(1), degree_), pz = powers(x(2), degree_);
  Complex sum = 0.0;
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const Complex c = coeffs_[index(a, b)];
      if (c == Complex(0.0)) continue;
      sum += c * (px[a] * py[b] * pz[degree_ - a - b]);
    }
  return sum;
}

Eigen::Vector3cd HomogeneousPolynomial::gradient(const Eigen::Vector3d& x) const {
  Eigen::Vector3cd g = Eigen::Vector3cd::Zero();
  if (degree_ == 0) return g;
  const auto px = powers(x(0), degree_), py = powers(x(1), degree_), pz = powers(x(2), degree_);
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const Complex c = coeffs_[index(a, b)];
      if (c == Complex(0.0)) continue;
      const int e = degree_ - a - b;
      if (a > 0) g(0) += c * (a * px[a - 1] * py[b] * pz[e]);
      if (b > 0) g(1) += c * (b * px[a] * py[b - 1] * pz[e]);
      if (e > 0) g(2) += c * (e * px[a] * py[b] * pz[e - 1]);
    }
  return g;
}

Eigen::Matrix3cd HomogeneousPolynomial::hessian(const Eigen::Vector3d& x) const {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  if (degree_ < 2) return h;
  const auto px = powers(x(0), degree_), py = powers(x(1), degree_), pz = powers(x(2), degree_);
  auto p = [&](const std::vector<double>& t, int k) { return k < 0 ? 0.0 : t[k]; };
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const Complex c = coeffs_[index(a, b)];
      if (c == Complex(0.0)) continue;
      const int e = degree_ - a - b;
      h(0, 0) += c * (a * (a - 1) * p(px, a - 2) * py[b] * pz[e]);
      h(1, 1) += c * (b * (b - 1) * px[a] * p(py, b - 2) * pz[e]);
      h(2, 2) += c * (e * (e - 1) * px[a] * py[b] * p(pz, e - 2));
      h(0, 1) += c * (a * b * p(px, a - 1) * p(py, b - 1) * pz[e]);
      h(0, 2) += c * (a * e * p(px, a - 1) * py[b] * p(pz, e - 1));
      h(1, 2) += c * (b * e * px[a] * p(py, b - 1) * p(pz, e - 1));
    }
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

HomogeneousPolynomial HomogeneousPolynomial::operator*(const HomogeneousPolynomial& other) const {
  HomogeneousPolynomial out(degree_ + other.degree_);
  for (int a = 0; a <= degree_; ++a)
    for (int b = 0; a + b <= degree_; ++b) {
      const Complex c = coeff(a, b);
      if (c == Complex(0.0)) continue;
      for (int a2 = 0; a2 <= other.degree_; ++a2)
        for (int b2 = 0; a2 + b2 <= other.degree_; ++b2)
          out.coeff(a + a2, b + b2) += c * other.coeff(a2, b2);
    }
  return out;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator+=(const HomogeneousPolynomial& other) {
  if (other.degree_ != degree_) throw DomainError("adding polynomials of different degree");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Coefficients (ascending powers of t) of d^m/dt^m P_n(t).
std::vector<double> legendre_derivative_coeffs(int n, int m) {
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  for (int k = 0; 2 * k <= n; ++k)
    c[n - 2 * k] = std::pow(2.0, -n) * ((k % 2) ? -1.0 : 1.0) * binomial(n, k) * binomial(2 * n - 2 * k, n);
  for (int d = 0; d < m; ++d) {
    std::vector<double> dc(c.size(), 0.0);
    for (std::size_t p = 1; p < c.size(); ++p) dc[p - 1] = static_cast<double>(p) * c[p];
    c = std::move(dc);
  }
  return c;
}

HomogeneousPolynomial rho_squared_power(int j) {
  HomogeneousPolynomial r2(2);
  r2.coeff(2, 0) = 1.0;
  r2.coeff(0, 2) = 1.0;
  r2.coeff(0, 0) = 1.0;
  HomogeneousPolynomial out(0);
  out.coeff(0, 0) = 1.0;
  for (int k = 0; k < j; ++k) out = out * r2;
  return out;
}

HomogeneousPolynomial build_regular(int n, int m) {
  const int am = std::abs(m);
  HomogeneousPolynomial xy(1);
  xy.coeff(1, 0) = 1.0;
  xy.coeff(0, 1) = Complex(0.0, 1.0);
  HomogeneousPolynomial ladder(0);
  ladder.coeff(0, 0) = 1.0;
  for (int k = 0; k < am; ++k) ladder = ladder * xy;

  const auto c = legendre_derivative_coeffs(n, am);
  HomogeneousPolynomial zonal(n - am);
  for (int k = 0; k <= n - am; ++k) {
    if (c[k] == 0.0) continue;
    HomogeneousPolynomial zk(k);
    zk.coeff(0, 0) = c[k];
    zonal += zk * rho_squared_power((n - am - k) / 2);
  }

  const double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * std::numbers::pi) * factorial(n - am) / factorial(n + am));
  HomogeneousPolynomial out = ladder * zonal;
  out *= Complex(norm * ((am % 2) ? -1.0 : 1.0));
  if (m < 0) {
    HomogeneousPolynomial conj(n);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) conj.coeff(a, b) = std::conj(out.coeff(a, b));
    conj *= Complex((am % 2) ? -1.0 : 1.0);
    return conj;
  }
  return out;
}

}  // namespace

const HomogeneousPolynomial& regular_solid_harmonic(int n, int m) {
  if (n < 0 || std::abs(m) > n) throw DomainError("invalid harmonic index");
  if (n > kMaxSolidHarmonicDegree) throw PrecisionError("solid harmonic degree above supported maximum");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<HomogeneousPolynomial>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, m}];
  if (!slot) slot = std::make_unique<HomogeneousPolynomial>(build_regular(n, m));
  return *slot;
}

SolidHarmonicJet irregular_solid_harmonic_jet(int n, int m, const Eigen::Vector3d& x) {
  const HomogeneousPolynomial& poly = regular_solid_harmonic(n, m);
  const double r2 = x.squaredNorm();
  const double rho = std::sqrt(r2);
  const double k = 2.0 * n + 1.0;
  const double f0 = std::pow(rho, -k);       // rho^{-(2n+1)}
  const double f1 = -k * f0 / r2;            // (1/rho) d/drho of f0
  const double f2 = k * (k + 2.0) * f0 / (r2 * r2);

  const Complex r = poly.value(x);
  const Eigen::Vector3cd g = poly.gradient(x);
  const Eigen::Matrix3cd h = poly.hessian(x);
  const Eigen::Vector3cd xc = x.cast<Complex>();

  SolidHarmonicJet jet;
  jet.value = f0 * r;
  jet.gradient = f0 * g + f1 * r * xc;
  jet.hessian = f0 * h + f1 * (xc * g.transpose() + g * xc.transpose()) +
                (f1 * r) * Eigen::Matrix3cd::Identity() + (f2 * r) * (xc * xc.transpose());
  return jet;
}

}  // namespace swimlab
