#include "swimlab/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swimlab/errors.hpp"
#include "swimlab/so3.hpp"

namespace swimlab {

using std::numbers::pi;

Stroke Stroke::zero(Eigen::Index modes, double period) {
  if (!(period > 0.0)) throw DomainError("stroke period must be positive");
  return {period, Eigen::MatrixXd::Zero(modes, 4)};
}

Eigen::VectorXd Stroke::shape(double t) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(modes());
  for (int h = 1; h <= 2; ++h) {
    const double w = 2.0 * pi * h / period;
    s += coeffs.col(2 * h - 2) * std::sin(w * t) + coeffs.col(2 * h - 1) * (std::cos(w * t) - 1.0);
  }
  return s;
}

Eigen::VectorXd Stroke::rate(double t) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(modes());
  for (int h = 1; h <= 2; ++h) {
    const double w = 2.0 * pi * h / period;
    s += w * (coeffs.col(2 * h - 2) * std::cos(w * t) - coeffs.col(2 * h - 1) * std::sin(w * t));
  }
  return s;
}

Eigen::VectorXd Stroke::amplitude() const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(modes());
  const int samples = 512;
  for (int k = 0; k < samples; ++k) a = a.cwiseMax(shape(period * k / samples).cwiseAbs());
  return a;
}

Eigen::MatrixXd Stroke::areas() const {
  const Eigen::Index n = modes();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int h = 1; h <= 2; ++h) {
    const Eigen::VectorXd a = coeffs.col(2 * h - 2), b = coeffs.col(2 * h - 1);
    A += pi * h * (b * a.transpose() - a * b.transpose());
  }
  return A;
}

double Stroke::effort() const {
  double e = 0.0;
  for (int h = 1; h <= 2; ++h) {
    const double w = 2.0 * pi * h / period;
    e += 0.5 * period * w * w * (coeffs.col(2 * h - 2).squaredNorm() + coeffs.col(2 * h - 1).squaredNorm());
  }
  return e;
}

Eigen::VectorXd Stroke::flat() const {
  Eigen::VectorXd v(coeffs.size());
  for (Eigen::Index i = 0; i < modes(); ++i) v.segment(4 * i, 4) = coeffs.row(i).transpose();
  return v;
}

Stroke Stroke::from_flat(const Eigen::VectorXd& v, Eigen::Index modes, double period) {
  Stroke s = zero(modes, period);
  for (Eigen::Index i = 0; i < modes; ++i) s.coeffs.row(i) = v.segment(4 * i, 4).transpose();
  return s;
}

void append_stroke(ControlLaw& law, const Stroke& stroke, double t0) {
  law.add(t0, t0 + stroke.period, [stroke, t0](double t) { return stroke.rate(t - t0); });
}

Vector6d pose_coordinates(const RigidState& g) {
  Vector6d c;
  c << so3::log(g.R), g.r;
  return c;
}

RigidState pose_from_coordinates(const Vector6d& c) {
  RigidState g;
  g.R = so3::exp(c.head<3>());
  g.r = c.tail<3>();
  return g;
}

RigidState compose(const RigidState& a, const RigidState& b) {
  RigidState g;
  g.R = so3::project(a.R * b.R);
  g.r = a.R * b.r + a.r;
  return g;
}

RigidState inverse(const RigidState& g) {
  RigidState out;
  out.R = g.R.transpose();
  out.r = -(g.R.transpose() * g.r);
  return out;
}

double pose_distance(const RigidState& a, const RigidState& b) { return (a.R - b.R).norm() + (a.r - b.r).norm(); }

Eigen::Matrix<double, 6, Eigen::Dynamic> bracket_matrix(const SwimmerSignature& sig) {
  const int n = static_cast<int>(sig.size());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  Eigen::Matrix<double, 6, Eigen::Dynamic> B(6, n * (n - 1) / 2);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) B.col(c++) = lie_bracket(sig, i, j, zero).body_twist;
  return B;
}

namespace {

// Endpoint displacement of one stroke started at shape s0 with an optional
// background rate, integrated without the box check.
Vector6d endpoint(const SwimmerSignature& sig, const Stroke& stroke, int steps, const Eigen::VectorXd& s0,
                  const std::function<Eigen::VectorXd(double)>& background, double t_offset) {
  ControlLaw law(sig.size());
  if (background)
    law.add(0.0, stroke.period, [&](double t) { return Eigen::VectorXd(stroke.rate(t) + background(t + t_offset)); });
  else
    append_stroke(law, stroke, 0.0);
  const TwistModel model = [&sig](double, const Eigen::VectorXd& s, const Eigen::VectorXd& lam) {
    return sig.twist(s, lam);
  };
  const IntegrationResult res = integrate_model(model, law, RigidState{}, s0, stroke.period, stroke.period / steps,
                                               nullptr, false);
  return pose_coordinates(res.trajectory.final_state());
}

Eigen::VectorXd box_limits(const SwimmerSignature& sig, double margin) {
  return margin * sig.box().upper.cwiseMin(-sig.box().lower);
}

}  // namespace

HolonomyResult stroke_holonomy(const SwimmerSignature& sig, const Stroke& stroke, int steps) {
  if (stroke.modes() != sig.size()) throw DomainError("stroke does not match the signature");
  if (steps < 1) throw DomainError("need at least one step per stroke");
  ControlLaw law(sig.size());
  append_stroke(law, stroke, 0.0);
  const IntegrationResult res =
      integrate(sig, law, RigidState{}, Eigen::VectorXd::Zero(sig.size()), stroke.period, stroke.period / steps);
  if (res.status != IntegrationStatus::Completed) throw DomainError("stroke leaves the shape box: " + res.message);
  HolonomyResult out;
  out.integrated = pose_coordinates(res.trajectory.final_state());
  const Eigen::MatrixXd A = stroke.areas();
  const auto B = bracket_matrix(sig);
  int c = 0;
  for (Eigen::Index i = 0; i < sig.size(); ++i)
    for (Eigen::Index j = i + 1; j < sig.size(); ++j) out.predicted += A(i, j) * B.col(c++);
  return out;
}

Stroke area_stroke(const SwimmerSignature& sig, const Vector6d& target, double period) {
  const Eigen::Index n = sig.size();
  Stroke stroke = Stroke::zero(n, period);
  if (n < 2 || target.norm() == 0.0) return stroke;
  const auto B = bracket_matrix(sig);
  const Eigen::VectorXd a = B.completeOrthogonalDecomposition().solve(target);

  // Skew matrix of the wanted areas; its real Schur form pairs the modes into
  // planes, one plane per harmonic.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  int c = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      S(i, j) = a(c++);
      S(j, i) = -S(i, j);
    }
  Eigen::RealSchur<Eigen::MatrixXd> schur(S);
  const Eigen::MatrixXd& T = schur.matrixT();
  const Eigen::MatrixXd& U = schur.matrixU();
  struct Plane {
    double t;
    Eigen::VectorXd u, v;
  };
  std::vector<Plane> planes;
  for (Eigen::Index p = 0; p + 1 < n;) {
    if (std::abs(T(p + 1, p)) > 0.0) {
      planes.push_back({0.5 * (T(p, p + 1) - T(p + 1, p)), U.col(p), U.col(p + 1)});
      p += 2;
    } else {
      ++p;
    }
  }
  std::sort(planes.begin(), planes.end(), [](const Plane& x, const Plane& y) { return std::abs(x.t) > std::abs(y.t); });
  // The second harmonic encloses twice the area per amplitude, so the largest
  // plane goes there.
  for (std::size_t k = 0; k < planes.size() && k < 2; ++k) {
    const int h = 2 - static_cast<int>(k);
    Plane pl = planes[k];
    if (pl.t < 0.0) std::swap(pl.u, pl.v);
    const double amp = std::sqrt(std::abs(pl.t) / (pi * h));
    stroke.coeffs.col(2 * h - 2) = amp * pl.v;  // a
    stroke.coeffs.col(2 * h - 1) = amp * pl.u;  // b
  }
  return stroke;
}

namespace detail {

Vector6d stroke_endpoint(const SwimmerSignature& sig, const Stroke& stroke, int steps) {
  return endpoint(sig, stroke, steps, Eigen::VectorXd::Zero(sig.size()), nullptr, 0.0);
}

bool newton_restore(const std::function<Vector6d(const Stroke&)>& endpoint_fn, Stroke& stroke, const Vector6d& target,
                    const SteerOptions& options, std::vector<double>* history) {
  const Eigen::Index n = stroke.modes();
  Eigen::VectorXd x = stroke.flat();
  auto residual_at = [&](const Eigen::VectorXd& v) {
    return Vector6d(endpoint_fn(Stroke::from_flat(v, n, stroke.period)) - target);
  };
  Vector6d F = residual_at(x);
  for (int it = 0; it < options.max_newton; ++it) {
    if (history) history->push_back(F.norm());
    if (F.norm() < options.tolerance) break;
    Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += options.fd_step;
      xm(k) -= options.fd_step;
      J.col(k) = (residual_at(xp) - residual_at(xm)) / (2.0 * options.fd_step);
    }
    const Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(-F);
    double step = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 10; ++ls, step *= 0.5) {
      const Eigen::VectorXd xn = x + step * dx;
      const Vector6d Fn = residual_at(xn);
      if (Fn.norm() < F.norm()) {
        x = xn;
        F = Fn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (history && (history->empty() || history->back() != F.norm())) history->push_back(F.norm());
  stroke = Stroke::from_flat(x, n, stroke.period);
  return F.norm() < options.acceptance;
}

}  // namespace detail

namespace {

struct Window {
  double t_start = 0.0;
  double duration = 0.0;  // <= 0: each stroke uses options.period
  std::function<Eigen::VectorXd(double)> macro_shape;  // absent: strokes start at s = 0
  std::function<Eigen::VectorXd(double)> macro_rate;
};

// Steers `target` (body-frame pose coordinates) with consecutive strokes.
// Appends the pieces to `law` when given.
SteerResult steer_window(const SwimmerSignature& sig, const Vector6d& target, int budget, const SteerOptions& options,
                         const Window& win, ControlLaw* law) {
  SteerResult out;
  const bool has_macro = static_cast<bool>(win.macro_rate);
  if (target.norm() < 1e-14 && !has_macro) return out;

  const Eigen::VectorXd lim = box_limits(sig, options.box_margin);
  const RigidState goal = pose_from_coordinates(target);
  const double ratio = (area_stroke(sig, target).amplitude().array() / lim.array()).maxCoeff();
  int k = std::max(1, static_cast<int>(std::ceil(ratio * ratio)));

  for (;; k += std::max(1, k / 2)) {
    if (k > budget)
      throw SteeringError("stroke budget exhausted (" + std::to_string(k) + " strokes needed)",
                          pose_coordinates(compose(inverse(goal), out.achieved)).norm());
    out.strokes.clear();
    out.achieved = RigidState{};
    const double period = win.duration > 0.0 ? win.duration / k : options.period;
    std::vector<double> starts;
    bool ok = true;
    for (int m = 0; m < k && ok; ++m) {
      const double t0 = win.t_start + (win.duration > 0.0 ? win.duration * m / k : m * period);
      const Eigen::VectorXd s0 = has_macro ? win.macro_shape(t0) : Eigen::VectorXd::Zero(sig.size());
      const Vector6d sub = pose_coordinates(compose(inverse(out.achieved), goal)) / static_cast<double>(k - m);
      auto fn = [&](const Stroke& st) { return endpoint(sig, st, options.steps, s0, win.macro_rate, t0); };
      const Vector6d drift = has_macro ? fn(Stroke::zero(sig.size(), period)) : Vector6d::Zero().eval();
      Stroke stroke = area_stroke(sig, sub - drift, period);
      out.newton_residuals.clear();
      ok = detail::newton_restore(fn, stroke, sub, options, &out.newton_residuals) &&
           !(stroke.amplitude().array() > lim.array()).any();
      if (!ok) break;
      out.achieved = compose(out.achieved, pose_from_coordinates(fn(stroke)));
      out.strokes.push_back(stroke);
      starts.push_back(t0);
    }
    if (!ok) continue;
    if (law) {
      // Piece ends are taken from the next start so rounding cannot make
      // neighbouring pieces overlap.
      starts.push_back(win.duration > 0.0 ? win.t_start + win.duration : starts.back() + period);
      for (std::size_t m = 0; m < out.strokes.size(); ++m) {
        const Stroke st = out.strokes[m];
        const double t0 = starts[m];
        const auto bg = win.macro_rate;
        if (bg)
          law->add(t0, starts[m + 1], [st, t0, bg](double t) { return Eigen::VectorXd(st.rate(t - t0) + bg(t)); });
        else
          law->add(t0, starts[m + 1], [st, t0](double t) { return st.rate(t - t0); });
      }
    }
    break;
  }
  out.residual = pose_coordinates(compose(inverse(goal), out.achieved)).norm();
  return out;
}

}  // namespace

SteerResult steer(const SwimmerSignature& sig, const Vector6d& target, int budget, const SteerOptions& options) {
  return steer_window(sig, target, budget, options, Window{}, nullptr);
}

TrackingResult track(const SwimmerSignature& sig, const TrackingProblem& problem, const SteerOptions& options) {
  if (!(problem.epsilon > 0.0) || !(problem.horizon > 0.0)) throw DomainError("tracking needs positive epsilon and horizon");
  if (!problem.reference) throw DomainError("tracking needs a reference path");
  const double T = problem.horizon;
  const RigidState start = problem.reference(0.0);
  start.validate();
  const bool has_macro = static_cast<bool>(problem.macro_rate);

  double last_dev = 0.0;
  for (int refine = 0, m = problem.initial_intervals; refine <= problem.max_refinements; ++refine, m *= 2) {
    TrackingResult out{Trajectory{}, ControlLaw(sig.size()), {}, {}, {}, {}, {}, 0.0, 0.0, m};
    RigidState state = start;
    bool steered = true;
    double min_piece = T;
    for (int j = 0; j < m && steered; ++j) {
      const double a = T * j / m, b = T * (j + 1) / m;
      out.knots.push_back(a);
      const Vector6d target = pose_coordinates(compose(inverse(state), problem.reference(b)));
      Window win;
      win.t_start = a;
      win.duration = b - a;
      if (has_macro) {
        win.macro_shape = problem.macro_shape;
        win.macro_rate = problem.macro_rate;
      }
      try {
        const SteerResult sr = steer_window(sig, target, problem.budget_per_interval, options, win, &out.law);
        state = compose(state, sr.achieved);
        out.targets.push_back(target);
        for (std::size_t q = 0; q < sr.strokes.size(); ++q)
          out.plan.push_back({j, a + (b - a) * static_cast<double>(q) / static_cast<double>(sr.strokes.size()),
                              sr.strokes[q]});
        out.strokes_per_interval.push_back(static_cast<int>(sr.strokes.size()));
        if (!sr.strokes.empty()) min_piece = std::min(min_piece, (b - a) / static_cast<double>(sr.strokes.size()));
      } catch (const SteeringError&) {
        steered = false;
      }
    }
    out.knots.push_back(T);
    if (!steered) continue;

    const double h = min_piece / options.steps;
    const IntegrationResult run =
        integrate(sig, out.law, start, has_macro ? problem.macro_shape(0.0) : Eigen::VectorXd::Zero(sig.size()), T, h);
    if (run.status != IntegrationStatus::Completed) continue;
    out.trajectory = run.trajectory;
    for (std::size_t i = 0; i < out.trajectory.size(); ++i)
      out.sup_deviation = std::max(out.sup_deviation,
                                   pose_distance(out.trajectory.states[i], problem.reference(out.trajectory.times[i])));
    for (double knot : out.knots) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < out.trajectory.size(); ++i)
        if (std::abs(out.trajectory.times[i] - knot) < std::abs(out.trajectory.times[best] - knot)) best = i;
      const double r = pose_distance(out.trajectory.states[best], problem.reference(knot));
      out.waypoint_residuals.push_back(r);
      out.max_waypoint_residual = std::max(out.max_waypoint_residual, r);
    }
    last_dev = out.sup_deviation;
    if (out.sup_deviation < problem.epsilon && out.max_waypoint_residual < 1e-6) return out;
  }
  throw SteeringError("reference not tracked within epsilon after refinement", last_dev);
}

}  // namespace swimlab
