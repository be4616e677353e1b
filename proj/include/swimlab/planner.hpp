#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swimlab/motion.hpp"
#include "swimlab/signature.hpp"

namespace swimlab {

/// Closed two-harmonic loop in shape space:
///   s_i(t) = sum_{h=1,2} a_ih sin(2 pi h t / tau) + b_ih (cos(2 pi h t / tau) - 1).
/// coeffs has one row per mode with columns (a_i1, b_i1, a_i2, b_i2).
struct Stroke {
  double period = 1.0;
  Eigen::MatrixXd coeffs;

  static Stroke zero(Eigen::Index modes, double period = 1.0);

  Eigen::Index modes() const { return coeffs.rows(); }
  Eigen::VectorXd shape(double t) const;
  Eigen::VectorXd rate(double t) const;

  /// max_t |s_i(t)| per mode, sampled densely.
  Eigen::VectorXd amplitude() const;

  /// Signed areas A_ij = closed integral of s_i ds_j.
  Eigen::MatrixXd areas() const;

  /// Effort int_0^tau |ds/dt|^2 dt (closed form).
  double effort() const;

  /// Coefficients flattened row by row, and back.
  Eigen::VectorXd flat() const;
  static Stroke from_flat(const Eigen::VectorXd& v, Eigen::Index modes, double period);
};

/// Appends the stroke to a control law on [t0, t0 + period).
void append_stroke(ControlLaw& law, const Stroke& stroke, double t0);

/// Pose coordinates (rotation vector, translation) of a rigid displacement.
Vector6d pose_coordinates(const RigidState& g);
RigidState pose_from_coordinates(const Vector6d& c);
RigidState compose(const RigidState& a, const RigidState& b);
RigidState inverse(const RigidState& g);

struct HolonomyResult {
  Vector6d integrated = Vector6d::Zero();  // pose coordinates after one period
  Vector6d predicted = Vector6d::Zero();   // sum_{i<j} A_ij [Z_i, Z_j](0)
};

inline constexpr int kStepsPerStroke = 200;

HolonomyResult stroke_holonomy(const SwimmerSignature& sig, const Stroke& stroke, int steps = kStepsPerStroke);

/// Twist parts of the first-order brackets at s = 0, one column per pair i < j
/// in lexicographic order.
Eigen::Matrix<double, 6, Eigen::Dynamic> bracket_matrix(const SwimmerSignature& sig);

/// Stroke whose leading-order holonomy equals `target` (minimum-norm areas).
Stroke area_stroke(const SwimmerSignature& sig, const Vector6d& target, double period = 1.0);

struct SteerOptions {
  double period = 1.0;
  int steps = kStepsPerStroke;
  double tolerance = 1e-9;     // Newton stops below this pose residual
  double acceptance = 1e-6;    // a stroke counts as hitting its target below this
  int max_newton = 25;
  double fd_step = 1e-4;
  double box_margin = 0.9;     // fraction of the shape box a stroke may use
};

struct SteerResult {
  std::vector<Stroke> strokes;
  std::vector<double> newton_residuals;  // per Newton iteration of the last stroke
  double residual = 0.0;                  // pose-coordinate distance to the target
  RigidState achieved;
};

/// Strokes from s = 0 whose concatenated displacement matches `target` (pose
/// coordinates, body frame). Throws SteeringError when more than `budget`
/// strokes would be needed.
SteerResult steer(const SwimmerSignature& sig, const Vector6d& target, int budget,
                  const SteerOptions& options = {});

struct TrackingProblem {
  std::function<RigidState(double)> reference;
  double epsilon = 0.02;
  double horizon = 1.0;
  int budget_per_interval = 400;
  int max_refinements = 6;
  int initial_intervals = 4;
  /// Optional superimposed macro shape path; must start and end at zero.
  std::function<Eigen::VectorXd(double)> macro_shape;
  std::function<Eigen::VectorXd(double)> macro_rate;
};

struct PlannedStroke {
  int interval = 0;
  double start = 0.0;
  Stroke stroke;
};

struct TrackingResult {
  Trajectory trajectory;
  ControlLaw law;
  std::vector<PlannedStroke> plan;
  std::vector<Vector6d> targets;  // body-frame displacement requested per interval
  std::vector<double> knots;
  std::vector<double> waypoint_residuals;
  std::vector<int> strokes_per_interval;
  double sup_deviation = 0.0;
  double max_waypoint_residual = 0.0;
  int intervals = 0;
};

/// ||R - Rbar||_F + ||r - rbar||.
double pose_distance(const RigidState& a, const RigidState& b);

TrackingResult track(const SwimmerSignature& sig, const TrackingProblem& problem,
                     const SteerOptions& options = {});

enum class StrokeCost { Effort, Dissipation };

struct OptimizeOptions {
  int starts = 8;
  std::vector<double> penalty_weights{1e2, 1e3, 1e4};
  std::vector<double> polish_steps{1e-3, 1e-4, 1e-5};
  double improvement = 1e-8;
  double feasibility = 1e-5;
  int max_sweeps = 60;
  std::uint64_t seed = 1;
  SteerOptions steer;
};

struct OptimizeResult {
  Stroke stroke;
  double cost = 0.0;
  double residual = 0.0;
  bool certified = false;  // no feasible coordinate step improves the cost
  std::vector<double> start_costs;
};

double stroke_cost(const SwimmerSignature& sig, const Stroke& stroke, StrokeCost cost, int steps = kStepsPerStroke);

/// Local minimum of the cost over strokes inside |s_i| <= K_i whose
/// holonomy equals `target`.
OptimizeResult optimize_stroke(const SwimmerSignature& sig, StrokeCost cost, const Vector6d& target,
                               const Eigen::VectorXd& K, const OptimizeOptions& options = {});

namespace detail {

/// Pose coordinates after one stroke from s = 0, without the box check.
Vector6d stroke_endpoint(const SwimmerSignature& sig, const Stroke& stroke, int steps);

/// Newton on the stroke coefficients from `start` so that the endpoint
/// displacement equals `target`. Returns false if it stalls.
bool newton_restore(const std::function<Vector6d(const Stroke&)>& endpoint, Stroke& stroke, const Vector6d& target,
                    const SteerOptions& options, std::vector<double>* history = nullptr);

}  // namespace detail

}  // namespace swimlab
