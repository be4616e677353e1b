#include "swimlab/sphgrid.hpp"

#include <cmath>
#include <numbers>

#include "swimlab/errors.hpp"

namespace swimlab {

using std::numbers::pi;

double convention_factor(HarmonicConvention convention, int degree) {
  switch (convention) {
    case HarmonicConvention::Orthonormal: return 1.0;
    case HarmonicConvention::FourPi: return std::sqrt(4.0 * pi);
    case HarmonicConvention::Schmidt: return std::sqrt(4.0 * pi / (2.0 * degree + 1.0));
  }
  return 1.0;
}

void HarmonicIndex::validate() const {
  if (degree < 0) throw DomainError("harmonic degree must be non-negative");
  if (std::abs(order) > degree) throw DomainError("harmonic order exceeds degree");
  if (part == HarmonicPart::Imag && order < 1)
    throw DomainError("imaginary part requires order >= 1");
}

namespace {

// Fully normalized P_n^m(cos beta) (CS phase included), m >= 0, via the
// standard three-term recurrence in n.
double normalized_legendre(int n, int m, double ct, double st) {
  double pmm = 1.0 / std::sqrt(4.0 * pi);
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
  if (n == m) return pmm;
  double pm1 = std::sqrt(2.0 * m + 3.0) * ct * pmm;
  if (n == m + 1) return pm1;
  double pnm2 = pmm, pnm1 = pm1, pn = 0.0;
  for (int l = m + 2; l <= n; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
    const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
    pn = a * (ct * pnm1 - b * pnm2);
    pnm2 = pnm1;
    pnm1 = pn;
  }
  return pn;
}

}  // namespace

Complex eval_harmonic(const HarmonicIndex& idx, double alpha, double beta, HarmonicConvention convention) {
  idx.validate();
  if (!(beta >= 0.0 && beta <= pi) || !std::isfinite(alpha))
    throw DomainError("angles out of range");
  const int am = std::abs(idx.order);
  const double p = normalized_legendre(idx.degree, am, std::cos(beta), std::sin(beta));
  Complex y = p * std::polar(1.0, am * alpha);
  if (idx.order < 0) y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
  return convention_factor(convention, idx.degree) * y;
}

double eval_real_harmonic(const HarmonicIndex& idx, const Eigen::Vector3d& unit, HarmonicConvention convention) {
  idx.validate();
  const Complex y = convention_factor(convention, idx.degree) * harmonic_at(idx.degree, idx.order, unit);
  return idx.part == HarmonicPart::Real ? y.real() : y.imag();
}

Complex harmonic_at(int n, int m, const Eigen::Vector3d& unit) {
  return regular_solid_harmonic(n, m).value(unit);
}

Eigen::Vector3cd harmonic_surface_gradient(int n, int m, const Eigen::Vector3d& unit) {
  // R is homogeneous of degree n, so its radial derivative on the sphere is n Y.
  const HomogeneousPolynomial& r = regular_solid_harmonic(n, m);
  return r.gradient(unit) - (static_cast<double>(n) * r.value(unit)) * unit.cast<Complex>();
}

namespace {

// P_k(t) and P_k'(t).
std::pair<double, double> legendre_with_derivative(int k, double t) {
  double p0 = 1.0, p1 = t;
  for (int l = 2; l <= k; ++l) {
    const double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
    p0 = p1;
    p1 = p2;
  }
  return {p1, k * (t * p1 - p0) / (t * t - 1.0)};
}

void gauss_legendre(int k, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(k);
  weights.resize(k);
  for (int i = 0; i < k; ++i) {
    double t = std::cos(pi * (i + 0.75) / (k + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(k, t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(k, t).second;
    nodes(i) = t;
    weights(i) = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

std::shared_ptr<const SphereQuadrature> build_quadrature(int L) {
  if (L < 2) throw DomainError("quadrature degree must be >= 2");
  const int k = (L + 2) / 2;  // ceil((L + 1) / 2)
  const int na = 2 * L + 1;
  Eigen::VectorXd ct, wt;
  gauss_legendre(k, ct, wt);

  auto q = std::make_shared<SphereQuadrature>();
  const Eigen::Index n = static_cast<Eigen::Index>(k) * na;
  q->azimuth.resize(n);
  q->polar.resize(n);
  q->points.resize(3, n);
  q->weights.resize(n);
  q->max_exact_degree = L;
  Eigen::Index idx = 0;
  for (int i = 0; i < k; ++i) {
    const double st = std::sqrt(1.0 - ct(i) * ct(i));
    for (int j = 0; j < na; ++j, ++idx) {
      const double a = 2.0 * pi * j / na;
      q->azimuth(idx) = a;
      q->polar(idx) = std::acos(ct(i));
      q->points.col(idx) << st * std::cos(a), st * std::sin(a), ct(i);
      q->weights(idx) = wt(i) * 2.0 * pi / na;
    }
  }
  return q;
}

SurfaceField::SurfaceField(std::shared_ptr<const SphereQuadrature> quadrature, Eigen::Matrix3Xd values)
    : quadrature_(std::move(quadrature)), values_(std::move(values)) {
  if (!quadrature_) throw DomainError("surface field without quadrature");
  if (values_.cols() != quadrature_->size()) throw DomainError("surface field size does not match node count");
  if (!values_.allFinite()) throw DomainError("surface field has non-finite entries");
}

SurfaceField SurfaceField::zero(std::shared_ptr<const SphereQuadrature> quadrature) {
  const Eigen::Index n = quadrature->size();
  return SurfaceField(std::move(quadrature), Eigen::Matrix3Xd::Zero(3, n));
}

SurfaceField SurfaceField::sample(std::shared_ptr<const SphereQuadrature> quadrature,
                                  const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f) {
  Eigen::Matrix3Xd v(3, quadrature->size());
  for (Eigen::Index q = 0; q < v.cols(); ++q) v.col(q) = f(quadrature->points.col(q));
  return SurfaceField(std::move(quadrature), std::move(v));
}

Eigen::Vector3d SurfaceField::integral() const { return values_ * quadrature_->weights; }

SurfaceField& SurfaceField::operator+=(const SurfaceField& other) {
  if (other.quadrature_ != quadrature_) throw DomainError("surface fields on different quadratures");
  values_ += other.values_;
  return *this;
}

SurfaceField& SurfaceField::operator*=(double s) {
  values_ *= s;
  return *this;
}

SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
SurfaceField operator*(double s, SurfaceField a) { return a *= s; }

double surface_inner(const SurfaceField& f, const SurfaceField& g) {
  if (&f.quadrature() != &g.quadrature()) throw DomainError("surface fields on different quadratures");
  return (f.values().cwiseProduct(g.values()).colwise().sum().transpose().array() *
          f.quadrature().weights.array())
      .sum();
}

ProjectionTable surface_projections(const SurfaceField& f, int L) {
  const SphereQuadrature& quad = f.quadrature();
  if (L < 0) throw DomainError("negative projection degree");
  if (quad.max_exact_degree < 2 * L)
    throw PrecisionError("quadrature exactness below twice the projection degree");

  ProjectionTable table;
  table.max_degree = L;
  const std::size_t count = static_cast<std::size_t>((L + 1) * (L + 1));
  table.radial.assign(count, 0.0);
  table.divergence.assign(count, 0.0);
  table.curl.assign(count, 0.0);

  for (Eigen::Index q = 0; q < quad.size(); ++q) {
    const Eigen::Vector3d x = quad.points.col(q);
    const Eigen::Vector3d v = f.values().col(q);
    const double w = quad.weights(q);
    const double vr = v.dot(x);
    const Eigen::Vector3d xv = x.cross(v);
    for (int n = 0; n <= L; ++n) {
      for (int m = 0; m <= n; ++m) {
        const HomogeneousPolynomial& r = regular_solid_harmonic(n, m);
        const Complex y = std::conj(r.value(x));
        // Eigen's complex dot conjugates its left operand, so gs.dot(v) = grad_s conj(Y) . v.
        const Eigen::Vector3cd gs = r.gradient(x) - (static_cast<double>(n) * r.value(x)) * x.cast<Complex>();
        const int i = ProjectionTable::index(n, m);
        table.radial[i] += w * vr * y;
        // Weak forms: int conj(Y) div_s v = 2 int conj(Y) v_r - int grad_s conj(Y) . v,
        // int conj(Y) e_r . curl v = int grad_s conj(Y) . (e_r x v).
        table.divergence[i] += w * (2.0 * vr * y - gs.dot(v.cast<Complex>()));
        table.curl[i] += w * gs.dot(xv.cast<Complex>());
      }
    }
  }
  // Negative orders follow from Y_{n,-m} = (-1)^m conj(Y_{n,m}) and f real.
  for (int n = 1; n <= L; ++n)
    for (int m = 1; m <= n; ++m) {
      const double sign = (m % 2) ? -1.0 : 1.0;
      const int pos = ProjectionTable::index(n, m), neg = ProjectionTable::index(n, -m);
      table.radial[neg] = sign * std::conj(table.radial[pos]);
      table.divergence[neg] = sign * std::conj(table.divergence[pos]);
      table.curl[neg] = sign * std::conj(table.curl[pos]);
    }
  return table;
}

}  // namespace swimlab
