#include "swimlab/lamb.hpp"

#include <cmath>
#include <numbers>

#include "swimlab/errors.hpp"

namespace swimlab {

using std::numbers::pi;

LambSolution LambSolution::zero(int max_degree) {
  if (max_degree < 0) throw DomainError("negative truncation degree");
  LambSolution s;
  s.max_degree = max_degree;
  for (int n = 0; n <= max_degree; ++n) {
    s.p.push_back(Eigen::VectorXcd::Zero(2 * n + 1));
    s.phi.push_back(Eigen::VectorXcd::Zero(2 * n + 1));
    s.chi.push_back(Eigen::VectorXcd::Zero(2 * n + 1));
  }
  return s;
}

LambSolution& LambSolution::operator+=(const LambSolution& other) {
  if (other.max_degree != max_degree) throw DomainError("adding Lamb solutions of different truncation");
  for (int n = 0; n <= max_degree; ++n) {
    p[n] += other.p[n];
    phi[n] += other.phi[n];
    chi[n] += other.chi[n];
  }
  return *this;
}

LambSolution& LambSolution::operator*=(double s) {
  for (int n = 0; n <= max_degree; ++n) {
    p[n] *= s;
    phi[n] *= s;
    chi[n] *= s;
  }
  return *this;
}

double lamb_alpha(int n) { return -(n - 2.0) / (2.0 * n * (2.0 * n - 1.0)); }
double lamb_beta(int n) { return (n + 1.0) / (n * (2.0 * n - 1.0)); }

LambSolution solve_boundary(const SurfaceField& data, int n0) {
  if (n0 < 1) throw DomainError("truncation degree must be >= 1");
  if (data.quadrature().max_exact_degree < 2 * n0 + 2)
    throw PrecisionError("quadrature not exact to twice the truncation degree plus two");

  const ProjectionTable proj = surface_projections(data, n0);
  const double scale = 1.0 + data.values().cwiseAbs().maxCoeff();
  if (std::abs(proj.radial[0]) > 1e-10 * scale)
    throw IncompatibleDataError("boundary data has a net flux through the sphere");

  LambSolution sol = LambSolution::zero(n0);
  for (int n = 1; n <= n0; ++n) {
    const double nn1 = n * (n + 1.0);
    for (int m = -n; m <= n; ++m) {
      const int i = ProjectionTable::index(n, m);
      const Complex a = proj.radial[i];
      // Data = a Y e_r + b grad_s Y + c e_r x grad_s Y; the surface divergence
      // and normal curl of that field are (2a - n(n+1) b) Y and -n(n+1) c Y.
      const Complex b = (2.0 * a - proj.divergence[i]) / nn1;
      const Complex c = -proj.curl[i] / nn1;
      const Complex pc = n * (2.0 * n - 1.0) / (n + 1.0) * (a + (n + 1.0) * b);
      sol.p[n](n + m) = pc;
      sol.phi[n](n + m) = b - lamb_alpha(n) * pc;
      sol.chi[n](n + m) = -c;
    }
  }
  return sol;
}

namespace detail {

namespace {

// Eigen's cross() conjugates complex results; the series needs the plain product.
Eigen::Vector3cd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

}  // namespace

Eigen::Vector3d velocity_series(const LambSolution& sol, const Eigen::Vector3d& x) {
  const Eigen::Vector3cd xc = x.cast<Complex>();
  const double r2 = x.squaredNorm();
  Eigen::Vector3cd u = Eigen::Vector3cd::Zero();
  for (int n = 1; n <= sol.max_degree; ++n) {
    const double al = lamb_alpha(n), be = lamb_beta(n);
    for (int m = -n; m <= n; ++m) {
      const Complex cp = sol.p[n](n + m), cf = sol.phi[n](n + m), cx = sol.chi[n](n + m);
      if (cp == 0.0 && cf == 0.0 && cx == 0.0) continue;
      const SolidHarmonicJet s = irregular_solid_harmonic_jet(n, m, x);
      u += cx * cross(s.gradient, xc) + cf * s.gradient + (al * r2) * cp * s.gradient + be * cp * s.value * xc;
    }
  }
  return u.real();
}

Eigen::Matrix3d velocity_gradient_series(const LambSolution& sol, const Eigen::Vector3d& x) {
  const Eigen::Vector3cd xc = x.cast<Complex>();
  const double r2 = x.squaredNorm();
  const Eigen::Matrix3cd eye = Eigen::Matrix3cd::Identity();
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  for (int n = 1; n <= sol.max_degree; ++n) {
    const double al = lamb_alpha(n), be = lamb_beta(n);
    for (int m = -n; m <= n; ++m) {
      const Complex cp = sol.p[n](n + m), cf = sol.phi[n](n + m), cx = sol.chi[n](n + m);
      if (cp == 0.0 && cf == 0.0 && cx == 0.0) continue;
      const SolidHarmonicJet s = irregular_solid_harmonic_jet(n, m, x);
      // grad(chi) x x: d_k (eps_ijl d_j chi x_l) = eps_ijl (H_jk x_l + d_j chi delta_lk).
      if (cx != 0.0) {
        Eigen::Matrix3cd t = Eigen::Matrix3cd::Zero();
        for (int k = 0; k < 3; ++k) {
          t.col(k) = cross(s.hessian.col(k), xc);
          t.col(k) += cross(s.gradient, eye.col(k));
        }
        g += cx * t;
      }
      g += cf * s.hessian;
      g += cp * (al * (2.0 * s.gradient * xc.transpose() + r2 * s.hessian) +
                 be * (xc * s.gradient.transpose() + s.value * eye));
    }
  }
  return g.real();
}

}  // namespace detail

Eigen::Vector3d eval_velocity(const LambSolution& sol, const Eigen::Vector3d& x) {
  if (!x.allFinite() || x.norm() < 1.0 - 1e-12) throw DomainError("velocity requested inside the unit ball");
  return detail::velocity_series(sol, x);
}

double eval_pressure(const LambSolution& sol, const Eigen::Vector3d& x) {
  if (!x.allFinite() || x.norm() < 1.0 - 1e-12) throw DomainError("pressure requested inside the unit ball");
  Complex p = 0.0;
  for (int n = 1; n <= sol.max_degree; ++n)
    for (int m = -n; m <= n; ++m)
      if (sol.p[n](n + m) != 0.0) p += sol.p[n](n + m) * irregular_solid_harmonic_jet(n, m, x).value;
  return p.real();
}

Eigen::Matrix3d eval_velocity_gradient(const LambSolution& sol, const Eigen::Vector3d& x) {
  if (!x.allFinite() || std::abs(x.norm() - 1.0) > 1e-12)
    throw DomainError("velocity gradient requested off the unit sphere");
  return detail::velocity_gradient_series(sol, x);
}

Wrench force_torque(const LambSolution& sol) {
  Wrench w;
  if (sol.max_degree < 1) return w;
  // rho^3 chi_{-2} and rho^3 p_{-2} are linear; their gradients are constant.
  Eigen::Vector3cd gchi = Eigen::Vector3cd::Zero(), gp = Eigen::Vector3cd::Zero();
  const Eigen::Vector3d any = Eigen::Vector3d::UnitZ();
  for (int m = -1; m <= 1; ++m) {
    const Eigen::Vector3cd g = regular_solid_harmonic(1, m).gradient(any);
    gchi += sol.chi[1](1 + m) * g;
    gp += sol.p[1](1 + m) * g;
  }
  w.torque = 8.0 * pi * gchi.real();
  w.force = 4.0 * pi * gp.real();
  return w;
}

}  // namespace swimlab
