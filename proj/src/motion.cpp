#include "swimlab/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "swimlab/errors.hpp"
#include "swimlab/so3.hpp"

namespace swimlab {

void RigidState::validate(double tol) const {
  if (!R.allFinite() || !r.allFinite()) throw DomainError("rigid state has non-finite entries");
  if (so3::orthogonality_defect(R) > tol || std::abs(R.determinant() - 1.0) > tol)
    throw DomainError("rigid state rotation is not in SO(3)");
}

ControlLaw& ControlLaw::add(double t0, double t1, Rate rate) {
  if (!(t1 > t0)) throw DomainError("control piece must have positive length");
  for (const auto& p : pieces_)
    if (t0 < p.t1 && p.t0 < t1) throw DomainError("control pieces overlap");
  pieces_.push_back({t0, t1, std::move(rate)});
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.t0 < b.t0; });
  return *this;
}

ControlLaw& ControlLaw::add_constant(double t0, double t1, const Eigen::VectorXd& rate) {
  if (rate.size() != modes_) throw DomainError("rate vector size does not match mode count");
  return add(t0, t1, [rate](double) { return rate; });
}

Eigen::VectorXd ControlLaw::operator()(double t) const {
  for (const auto& p : pieces_)
    if (t >= p.t0 && t < p.t1) return p.rate(t);
  return Eigen::VectorXd::Zero(modes_);
}

Eigen::VectorXd ControlLaw::eval_in(double t, double a, double b) const {
  const double mid = 0.5 * (a + b);
  for (const auto& p : pieces_)
    if (mid >= p.t0 && mid < p.t1) return p.rate(t);
  return Eigen::VectorXd::Zero(modes_);
}

std::vector<double> ControlLaw::breakpoints(double T) const {
  std::vector<double> out;
  for (const auto& p : pieces_)
    for (double t : {p.t0, p.t1})
      if (t > 0.0 && t < T) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), out.end());
  return out;
}

namespace {

struct Derivative {
  Eigen::Matrix3d dR;
  Eigen::Vector3d dr;
  Eigen::VectorXd ds;
};

}  // namespace

IntegrationResult integrate_model(const TwistModel& model, const ControlLaw& law, const RigidState& state0,
                                  const Eigen::VectorXd& s0, double T, double h, const ShapeBox* box,
                                  bool keep_path) {
  if (!(h > 0.0) || !(T >= 0.0) || !std::isfinite(T)) throw DomainError("step and horizon must be positive");
  if (s0.size() != law.modes()) throw DomainError("initial shape size does not match the control law");
  state0.validate();
  if (box && !box->contains(s0)) throw DomainError("initial shape outside the admissible box");

  IntegrationResult res;
  Trajectory& tr = res.trajectory;
  RigidState x = state0;
  Eigen::VectorXd s = s0;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  tr.shapes.push_back(s);
  tr.rates.push_back(law(0.0));
  if (T == 0.0) return res;

  std::vector<double> knots{0.0};
  for (double b : law.breakpoints(T)) knots.push_back(b);
  knots.push_back(T);

  for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
    const double a = knots[seg], b = knots[seg + 1];
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    const double hs = (b - a) / steps;
    auto f = [&](double t, const Eigen::Matrix3d& R, const Eigen::VectorXd& sv) {
      const Eigen::VectorXd lam = law.eval_in(t, a, b);
      const Vector6d xi = model(t, sv, lam);
      return Derivative{R * so3::hat(xi.head<3>()), R * xi.tail<3>(), lam};
    };
    for (int k = 0; k < steps; ++k) {
      const double t = a + k * hs;
      const Derivative k1 = f(t, x.R, s);
      const Derivative k2 = f(t + 0.5 * hs, x.R + 0.5 * hs * k1.dR, s + 0.5 * hs * k1.ds);
      const Derivative k3 = f(t + 0.5 * hs, x.R + 0.5 * hs * k2.dR, s + 0.5 * hs * k2.ds);
      const Derivative k4 = f(t + hs, x.R + hs * k3.dR, s + hs * k3.ds);
      RigidState next;
      next.R = so3::project(x.R + hs / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR));
      next.r = x.r + hs / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
      const Eigen::VectorXd s_next = s + hs / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
      if (!next.R.allFinite() || !next.r.allFinite() || !s_next.allFinite())
        throw NumericalError("non-finite state during integration at t = " + std::to_string(t));
      if (box && !box->contains(s_next, 1e-12)) {
        res.status = IntegrationStatus::LeftShapeBox;
        res.message = "shape left the admissible box at t = " + std::to_string(t + hs);
        return res;
      }
      x = next;
      s = s_next;
      res.max_orthogonality_defect = std::max(res.max_orthogonality_defect, so3::orthogonality_defect(x.R));
      const double tn = (k + 1 == steps) ? b : t + hs;
      if (!keep_path && !(k + 1 == steps && seg + 2 == knots.size())) continue;
      tr.times.push_back(tn);
      tr.states.push_back(x);
      tr.shapes.push_back(s);
      tr.rates.push_back(law.eval_in(tn, a, b));
    }
  }
  return res;
}

IntegrationResult integrate(const SwimmerSignature& sig, const ControlLaw& law, const RigidState& state0,
                            const Eigen::VectorXd& s0, double T, double h) {
  if (law.modes() != sig.size()) throw DomainError("control law does not match the signature");
  const TwistModel model = [&sig](double, const Eigen::VectorXd& s, const Eigen::VectorXd& lam) {
    return sig.twist(s, lam);
  };
  return integrate_model(model, law, state0, s0, T, h, &sig.box());
}

double dissipated_energy(const SwimmerSignature& sig, const Trajectory& traj) {
  double e = 0.0;
  auto power = [&](std::size_t i) {
    const Vector6d xi = sig.twist(traj.shapes[i], traj.rates[i]);
    return xi.dot(sig.resistance().M * xi);
  };
  for (std::size_t i = 1; i < traj.size(); ++i)
    e += 0.5 * (traj.times[i] - traj.times[i - 1]) * (power(i - 1) + power(i));
  return e;
}

double frame_equivalence_check(const SwimmerSignature& sig, const ControlLaw& law, const RigidState& state0,
                               const RigidPath& path, double T, double h) {
  const IntegrationResult base = integrate(sig, law, state0, Eigen::VectorXd::Zero(sig.size()), T, h);

  // Rigid velocity of the displacement, by fourth-order central differences.
  const double d = 1e-3;
  auto rigid_twist = [&](double t) {
    const Eigen::Matrix3d dQ = (-path.Q(t + 2 * d) + 8.0 * path.Q(t + d) - 8.0 * path.Q(t - d) + path.Q(t - 2 * d)) / (12.0 * d);
    const Eigen::Vector3d ds = (-path.sbar(t + 2 * d) + 8.0 * path.sbar(t + d) - 8.0 * path.sbar(t - d) + path.sbar(t - 2 * d)) / (12.0 * d);
    const Eigen::Vector3d w = so3::vee(dQ * path.Q(t).transpose());
    Vector6d xi;
    xi << w, ds - w.cross(path.sbar(t));
    return xi;
  };
  const TwistModel displaced = [&](double t, const Eigen::VectorXd& s, const Eigen::VectorXd& lam) {
    const Eigen::Matrix3d Q = path.Q(t);
    Matrix6d ad = Matrix6d::Zero();
    ad.topLeftCorner<3, 3>() = Q;
    ad.bottomRightCorner<3, 3>() = Q;
    ad.bottomLeftCorner<3, 3>() = so3::hat(path.sbar(t)) * Q;
    const Matrix6d ad_inv = ad.inverse();
    const Matrix6d m_dag = ad_inv.transpose() * sig.resistance().M * ad_inv;
    const Vector6d n_dag = ad_inv.transpose() * (sig.resistance().coupling_at(s) * lam) + m_dag * rigid_twist(t);
    return Vector6d(-m_dag.ldlt().solve(n_dag));
  };
  const IntegrationResult dag =
      integrate_model(displaced, law, state0, Eigen::VectorXd::Zero(sig.size()), T, h, &sig.box());
  if (dag.trajectory.size() != base.trajectory.size()) throw NumericalError("equivalence runs used different grids");

  const SphereQuadrature& quad = *sig.quadrature();
  std::vector<Eigen::Matrix3Xd> V;
  for (const auto& m : sig.modes()) V.push_back(mode_boundary_field(m, sig.quadrature()).values());
  double worst = 0.0;
  for (std::size_t i = 0; i < base.trajectory.size(); ++i) {
    const double t = base.trajectory.times[i];
    const RigidState& a = base.trajectory.states[i];
    const RigidState& b = dag.trajectory.states[i];
    Eigen::Matrix3Xd theta = quad.points;
    const Eigen::VectorXd& s = base.trajectory.shapes[i];
    for (std::size_t k = 0; k < V.size(); ++k) theta += s(static_cast<Eigen::Index>(k)) * V[k];
    const Eigen::Matrix3Xd lhs = (b.R * path.Q(t) * theta).colwise() + (b.R * path.sbar(t) + b.r);
    const Eigen::Matrix3Xd rhs = (a.R * theta).colwise() + a.r;
    worst = std::max(worst, (lhs - rhs).colwise().norm().maxCoeff());
  }
  return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.shapes.empty() ? 0 : traj.shapes.front().size();
  out << "t";
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) out << ",R" << i << j;
  out << ",r1,r2,r3";
  for (Eigen::Index k = 1; k <= n; ++k) out << ",s" << k;
  for (Eigen::Index k = 1; k <= n; ++k) out << ",lambda" << k;
  out << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < traj.size(); ++i) {
    put(traj.times[i]);
    const RigidState& x = traj.states[i];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out << ',', put(x.R(a, b));
    for (int a = 0; a < 3; ++a) out << ',', put(x.r(a));
    for (Eigen::Index k = 0; k < n; ++k) out << ',', put(traj.shapes[i](k));
    for (Eigen::Index k = 0; k < n; ++k) out << ',', put(traj.rates[i](k));
    out << '\n';
  }
}

}  // namespace swimlab
