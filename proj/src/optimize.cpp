#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "swimlab/errors.hpp"
#include "swimlab/planner.hpp"

namespace swimlab {

double stroke_cost(const SwimmerSignature& sig, const Stroke& stroke, StrokeCost cost, int steps) {
  if (cost == StrokeCost::Effort) return stroke.effort();
  ControlLaw law(sig.size());
  append_stroke(law, stroke, 0.0);
  const TwistModel model = [&sig](double, const Eigen::VectorXd& s, const Eigen::VectorXd& lam) {
    return sig.twist(s, lam);
  };
  const IntegrationResult res = integrate_model(model, law, RigidState{}, Eigen::VectorXd::Zero(sig.size()),
                                                stroke.period, stroke.period / steps);
  return dissipated_energy(sig, res.trajectory);
}

namespace {

struct Problem {
  const SwimmerSignature& sig;
  StrokeCost cost;
  Vector6d target;
  Eigen::VectorXd K;
  const OptimizeOptions& options;

  Eigen::Index modes() const { return sig.size(); }
  double period() const { return options.steer.period; }
  Stroke stroke(const Eigen::VectorXd& x) const { return Stroke::from_flat(x, modes(), period()); }

  // Uniform rescaling into the amplitude box.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd amp = stroke(x).amplitude();
    double scale = 1.0;
    for (Eigen::Index i = 0; i < amp.size(); ++i)
      if (amp(i) > K(i)) scale = std::min(scale, K(i) / amp(i));
    return scale < 1.0 ? Eigen::VectorXd(scale * x) : x;
  }

  double residual(const Eigen::VectorXd& x) const {
    return (detail::stroke_endpoint(sig, stroke(x), options.steer.steps) - target).norm();
  }

  double objective(const Eigen::VectorXd& x) const { return stroke_cost(sig, stroke(x), cost, options.steer.steps); }

  double penalized(const Eigen::VectorXd& x, double w) const {
    const double scale = std::max(target.norm(), 1e-12);
    const double r = residual(x) / scale;
    return objective(x) + w * r * r;
  }

  Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian(const Eigen::VectorXd& x) const {
    const double h = options.steer.fd_step;
    Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      J.col(k) = (detail::stroke_endpoint(sig, stroke(xp), options.steer.steps) -
                  detail::stroke_endpoint(sig, stroke(xm), options.steer.steps)) / (2.0 * h);
    }
    return J;
  }

  bool feasible(const Eigen::VectorXd& x) const {
    return (project(x) - x).norm() == 0.0 && residual(x) < options.feasibility;
  }

  // Full Newton back onto the constraint.
  bool restore(Eigen::VectorXd& x) const {
    Stroke st = stroke(x);
    detail::newton_restore([this](const Stroke& s) { return detail::stroke_endpoint(sig, s, options.steer.steps); }, st,
                           target, options.steer);
    x = st.flat();
    return feasible(x);
  }

  // Chord iteration with a frozen Jacobian; minimum-norm corrections.
  bool restore_chord(Eigen::VectorXd& x, const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>& J) const {
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 12; ++it) {
      const Vector6d F = detail::stroke_endpoint(sig, stroke(x), options.steer.steps) - target;
      if (F.norm() < options.steer.tolerance) break;
      if (!(F.norm() < last)) return false;  // chord iteration diverging
      last = F.norm();
      x -= J.solve(Eigen::VectorXd(F));
    }
    return feasible(x);
  }
};

// Coordinate descent with step halving on the penalized cost.
Eigen::VectorXd descend(const Problem& pb, Eigen::VectorXd x, double w) {
  double f = pb.penalized(x, w);
  double step = std::max(0.25 * x.cwiseAbs().maxCoeff(), 1e-3 * pb.K.minCoeff());
  for (int sweep = 0; sweep < pb.options.max_sweeps && step > 1e-7; ++sweep) {
    bool improved = false;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y(k) += sgn * step;
        y = pb.project(y);
        const double fy = pb.penalized(y, w);
        if (fy < f) {
          x = y;
          f = fy;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace

OptimizeResult optimize_stroke(const SwimmerSignature& sig, StrokeCost cost, const Vector6d& target,
                               const Eigen::VectorXd& K, const OptimizeOptions& options) {
  if (K.size() != sig.size() || !(K.array() > 0.0).all()) throw DomainError("amplitude box K must be positive per mode");
  if (options.starts < 1) throw DomainError("need at least one start");
  const Problem pb{sig, cost, target, K, options};
  const Eigen::Index dim = 4 * sig.size();

  OptimizeResult out;
  out.stroke = Stroke::zero(sig.size(), options.steer.period);
  if (target.norm() == 0.0) {
    // The zero stroke is feasible and every cost is nonnegative.
    out.start_costs.assign(1, 0.0);
    out.certified = true;
    return out;
  }

  const Eigen::VectorXd x0 = pb.project(area_stroke(sig, target, options.steer.period).flat());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread = 0.3 * std::max(x0.cwiseAbs().maxCoeff(), 1e-6);

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (int start = 0; start < options.starts; ++start) {
    Eigen::VectorXd x = x0;
    if (start > 0)
      for (Eigen::Index k = 0; k < dim; ++k) x(k) += spread * normal(rng);
    x = pb.project(x);
    for (double w : options.penalty_weights) x = descend(pb, x, w);
    if (!pb.restore(x)) {
      out.start_costs.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double c = pb.objective(x);
    out.start_costs.push_back(c);
    if (c < best) {
      best = c;
      best_x = x;
    }
  }
  if (best_x.size() == 0)
    throw SteeringError("no feasible stroke found inside the amplitude box", pb.residual(x0));

  // Feasible coordinate search at decreasing step sizes. A final sweep over
  // every step size without improvement is the stationarity certificate.
  Eigen::VectorXd x = best_x;
  double c = best;
  auto sweep = [&](double delta) {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> J(pb.jacobian(x));
    bool improved = false;
    for (Eigen::Index k = 0; k < dim; ++k) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y(k) += sgn * delta;
        if (!pb.restore_chord(y, J)) continue;
        const double cy = pb.objective(y);
        if (cy < c - options.improvement) {
          x = y;
          c = cy;
          improved = true;
          break;
        }
      }
    }
    return improved;
  };
  bool certified = false;
  for (int round = 0; round < 4 && !certified; ++round) {
    for (double delta : options.polish_steps)
      for (int pass = 0; pass < options.max_sweeps && sweep(delta); ++pass) {
      }
    certified = true;
    for (double delta : options.polish_steps)
      if (sweep(delta)) {
        certified = false;
        break;
      }
  }

  out.stroke = pb.stroke(x);
  out.cost = c;
  out.residual = pb.residual(x);
  out.certified = certified;
  return out;
}

}  // namespace swimlab
