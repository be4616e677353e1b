#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "swimlab/errors.hpp"
#include "swimlab/motion.hpp"
#include "swimlab/so3.hpp"

namespace swimlab {

namespace {

// First-derivative weights at z over the nodes x (Fornberg's recursion).
std::vector<double> derivative_weights(double z, const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

// First index of a window of `width` grid points centred near i (clamped).
std::size_t window_start(std::size_t i, std::size_t count, std::size_t width) {
  const std::size_t half = width / 2;
  if (i < half) return 0;
  return std::min(i - half, count - width);
}

void check_path(const BoundaryPath& path) {
  if (!path.quadrature) throw DomainError("boundary path without quadrature");
  if (path.times.size() < 5 || path.maps.size() != path.times.size())
    throw DomainError("boundary path needs at least five time samples");
  for (std::size_t i = 1; i < path.times.size(); ++i)
    if (!(path.times[i] > path.times[i - 1])) throw DomainError("boundary path times must increase");
  for (const auto& m : path.maps)
    if (m.cols() != path.quadrature->size() || !m.allFinite()) throw DomainError("boundary path map has the wrong size");
}

std::vector<Eigen::Matrix3Xd> time_derivative(const std::vector<double>& t, const std::vector<Eigen::Matrix3Xd>& f) {
  const std::size_t width = f.size() >= 7 ? 7 : 5;
  std::vector<Eigen::Matrix3Xd> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t s = window_start(i, f.size(), width);
    const std::vector<double> nodes(t.begin() + static_cast<std::ptrdiff_t>(s),
                                    t.begin() + static_cast<std::ptrdiff_t>(s + width));
    const auto w = derivative_weights(t[i], nodes);
    out[i] = Eigen::Matrix3Xd::Zero(3, f[i].cols());
    for (std::size_t k = 0; k < width; ++k) out[i] += w[k] * f[s + k];
  }
  return out;
}

Eigen::Vector3d moment(const SphereQuadrature& quad, const Eigen::Matrix3Xd& a, const Eigen::Matrix3Xd& b) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (Eigen::Index q = 0; q < quad.size(); ++q) m += quad.weights(q) * a.col(q).cross(b.col(q));
  return m;
}

}  // namespace

std::pair<double, double> constraint_residuals(const BoundaryPath& path) {
  check_path(path);
  const SphereQuadrature& quad = *path.quadrature;
  const auto rates = time_derivative(path.times, path.maps);
  double lin = 0.0, ang = 0.0;
  for (std::size_t i = 0; i < path.maps.size(); ++i) {
    lin = std::max(lin, (path.maps[i] * quad.weights).norm());
    ang = std::max(ang, moment(quad, rates[i], path.maps[i]).norm());
  }
  return {lin, ang};
}

AllowableProjection project_allowable(const BoundaryPath& path) {
  check_path(path);
  const SphereQuadrature& quad = *path.quadrature;
  const std::size_t K = path.times.size();
  const double area = 4.0 * std::numbers::pi;
  if ((path.maps.front() * quad.weights).norm() > 1e-8)
    throw DomainError("initial boundary map is not centred");

  AllowableProjection out;
  std::vector<Eigen::Matrix3Xd> centred(K);
  for (std::size_t i = 0; i < K; ++i) {
    out.sbar.push_back(path.maps[i] * quad.weights / area);
    centred[i] = path.maps[i].colwise() - out.sbar.back();
  }
  const auto rates = time_derivative(path.times, centred);

  std::vector<Eigen::Vector3d> chi(K);
  for (std::size_t i = 0; i < K; ++i) {
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
    for (Eigen::Index q = 0; q < quad.size(); ++q) {
      const Eigen::Vector3d th = centred[i].col(q);
      J += quad.weights(q) * (th.squaredNorm() * Eigen::Matrix3d::Identity() - th * th.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(J);
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())))
      throw ProjectionError("inertia-like matrix J is singular at t = " + std::to_string(path.times[i]));
    chi[i] = J.ldlt().solve(moment(quad, rates[i], centred[i]));
  }

  // chi between grid points by cubic Lagrange interpolation.
  auto chi_at = [&](double t, std::size_t i) {
    const std::size_t s = window_start(i, K, 4);
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (std::size_t a = s; a < s + 4; ++a) {
      double l = 1.0;
      for (std::size_t b = s; b < s + 4; ++b)
        if (b != a) l *= (t - path.times[b]) / (path.times[a] - path.times[b]);
      v += l * chi[a];
    }
    return v;
  };

  Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  out.Q.push_back(Q);
  for (std::size_t i = 0; i + 1 < K; ++i) {
    const double t = path.times[i], h = path.times[i + 1] - t;
    const Eigen::Vector3d cm = chi_at(t + 0.5 * h, i + 1);
    const Eigen::Matrix3d k1 = Q * so3::hat(chi[i]);
    const Eigen::Matrix3d k2 = (Q + 0.5 * h * k1) * so3::hat(cm);
    const Eigen::Matrix3d k3 = (Q + 0.5 * h * k2) * so3::hat(cm);
    const Eigen::Matrix3d k4 = (Q + h * k3) * so3::hat(chi[i + 1]);
    Q = so3::project(Q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    out.Q.push_back(Q);
  }

  out.corrected.quadrature = path.quadrature;
  out.corrected.times = path.times;
  for (std::size_t i = 0; i < K; ++i) {
    out.shift.push_back(-out.Q[i] * out.sbar[i]);
    out.corrected.maps.push_back(out.Q[i] * centred[i]);
  }
  std::tie(out.translation_residual, out.rotation_residual) = constraint_residuals(out.corrected);
  return out;
}

}  // namespace swimlab
