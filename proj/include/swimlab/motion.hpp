#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swimlab/signature.hpp"

namespace swimlab {

struct RigidState {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // body to fixed frame
  Eigen::Vector3d r = Eigen::Vector3d::Zero();

  void validate(double tol = 1e-9) const;
};

/// Piecewise-continuous shape-rate law t -> lambda(t). Pieces are half-open
/// [t0, t1); lambda is zero outside every piece. Integration steps are
/// aligned to piece boundaries.
class ControlLaw {
 public:
  using Rate = std::function<Eigen::VectorXd(double)>;

  explicit ControlLaw(Eigen::Index modes) : modes_(modes) {}

  static ControlLaw zero(Eigen::Index modes) { return ControlLaw(modes); }

  /// Appends a piece; pieces must not overlap.
  ControlLaw& add(double t0, double t1, Rate rate);
  ControlLaw& add_constant(double t0, double t1, const Eigen::VectorXd& rate);

  Eigen::Index modes() const { return modes_; }
  Eigen::VectorXd operator()(double t) const;

  /// Piece boundaries inside (0, T), sorted.
  std::vector<double> breakpoints(double T) const;

  /// lambda evaluated from the piece containing [a, b] (for RK stages that sit
  /// on the right boundary of a piece).
  Eigen::VectorXd eval_in(double t, double a, double b) const;

 private:
  struct Piece {
    double t0, t1;
    Rate rate;
  };
  Eigen::Index modes_;
  std::vector<Piece> pieces_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RigidState> states;
  std::vector<Eigen::VectorXd> shapes;
  std::vector<Eigen::VectorXd> rates;

  std::size_t size() const { return times.size(); }
  const RigidState& final_state() const { return states.back(); }
};

enum class IntegrationStatus { Completed, LeftShapeBox };

struct IntegrationResult {
  Trajectory trajectory;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::string message;
  double max_orthogonality_defect = 0.0;
};

/// Body twist (Omega, v) as a function of time, shape and shape rate.
using TwistModel = std::function<Vector6d(double t, const Eigen::VectorXd& s, const Eigen::VectorXd& rates)>;

/// Classical RK4 on (R, r, s) followed by polar projection of R each step.
/// `box` may be null; a step that would leave it truncates the trajectory.
/// With keep_path false only the initial and final samples are stored.
IntegrationResult integrate_model(const TwistModel& model, const ControlLaw& law, const RigidState& state0,
                                  const Eigen::VectorXd& s0, double T, double h, const ShapeBox* box = nullptr,
                                  bool keep_path = true);

IntegrationResult integrate(const SwimmerSignature& sig, const ControlLaw& law, const RigidState& state0,
                            const Eigen::VectorXd& s0, double T, double h);

/// int (Omega, v)^T M (Omega, v) dt along the trajectory (trapezoid rule).
double dissipated_energy(const SwimmerSignature& sig, const Trajectory& traj);

/// Rigid displacement of the body frame, Q(0) = I and sbar(0) = 0.
struct RigidPath {
  std::function<Eigen::Matrix3d(double)> Q;
  std::function<Eigen::Vector3d(double)> sbar;
};

/// Integrates the swimmer and its rigidly displaced copy and returns the
/// largest mismatch of the two global boundary positions over time and nodes.
double frame_equivalence_check(const SwimmerSignature& sig, const ControlLaw& law, const RigidState& state0,
                               const RigidPath& path, double T, double h);

/// Boundary map Theta_t sampled on a sphere grid at increasing times.
struct BoundaryPath {
  std::shared_ptr<const SphereQuadrature> quadrature;
  std::vector<double> times;
  std::vector<Eigen::Matrix3Xd> maps;
};

struct AllowableProjection {
  std::vector<Eigen::Matrix3d> Q;
  std::vector<Eigen::Vector3d> sbar;   // (1/4pi) int Theta_t
  std::vector<Eigen::Vector3d> shift;  // -Q sbar
  BoundaryPath corrected;              // Q (Theta - sbar)
  double translation_residual = 0.0;   // max_t |int Theta'|
  double rotation_residual = 0.0;      // max_t |int d_t Theta' x Theta'|
};

/// Largest violation of the two self-propelled constraints along a path;
/// time derivatives by 7-point differences on the time grid (5-point when
/// fewer samples are given).
std::pair<double, double> constraint_residuals(const BoundaryPath& path);

AllowableProjection project_allowable(const BoundaryPath& path);

/// Columns: t, R11..R33 (row major), r1..r3, s1..sn, lambda1..lambdan.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace swimlab
