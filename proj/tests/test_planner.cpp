#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "swimlab/errors.hpp"
#include "swimlab/planner.hpp"
#include "swimlab/so3.hpp"
#include "test_support.hpp"

using namespace swimlab;
using std::numbers::pi;

namespace {

const SwimmerSignature& sig() { return fixtures::reference_signature(); }

Stroke sample_stroke(double scale) {
  Stroke s = Stroke::zero(4, 1.0);
  s.coeffs << 0.05, 0.01, 0.00, 0.02,
              0.00, 0.04, 0.01, 0.00,
              0.02, -0.03, 0.00, 0.01,
              -0.01, 0.02, 0.03, 0.00;
  s.coeffs *= scale;
  return s;
}

Vector6d unit6(int i, double v) { return v * Vector6d::Unit(i); }

}  // namespace

TEST(Stroke, IsClosedAndRateIsDerivative) {
  const Stroke s = sample_stroke(1.0);
  EXPECT_LT(s.shape(0.0).norm(), 1e-15);
  EXPECT_LT(s.shape(1.0).norm(), 1e-15);
  const double h = 1e-6;
  for (double t : {0.1, 0.37, 0.8})
    EXPECT_LT((s.rate(t) - (s.shape(t + h) - s.shape(t - h)) / (2 * h)).norm(), 1e-8);
}

TEST(Stroke, AreasAndEffortMatchQuadrature) {
  const Stroke s = sample_stroke(1.0);
  const int n = 4000;
  Eigen::MatrixXd areas = Eigen::MatrixXd::Zero(4, 4);
  double effort = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    const Eigen::VectorXd x = s.shape(t), v = s.rate(t);
    areas += x * v.transpose() / n;
    effort += v.squaredNorm() / n;
  }
  EXPECT_LT((areas - s.areas()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.areas() + s.areas().transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(effort, s.effort(), 1e-12);
}

TEST(Stroke, FlatRoundTripAndAmplitude) {
  const Stroke s = sample_stroke(1.0);
  const Stroke back = Stroke::from_flat(s.flat(), 4, 1.0);
  EXPECT_EQ(back.coeffs, s.coeffs);
  EXPECT_EQ(s.flat()(1), s.coeffs(0, 1));
  Stroke single = Stroke::zero(1);
  single.coeffs(0, 0) = 0.1;
  EXPECT_NEAR(single.amplitude()(0), 0.1, 1e-4);
}

TEST(Pose, CoordinatesRoundTripAndGroupLaws) {
  Vector6d c;
  c << 0.1, -0.2, 0.3, 1.0, 2.0, -0.5;
  const RigidState g = pose_from_coordinates(c);
  EXPECT_LT((pose_coordinates(g) - c).norm(), 1e-14);
  const RigidState e = compose(g, inverse(g));
  EXPECT_LT((e.R - Eigen::Matrix3d::Identity()).norm(), 1e-14);
  EXPECT_LT(e.r.norm(), 1e-14);
  EXPECT_NEAR(pose_distance(g, g), 0.0, 1e-15);
  EXPECT_NEAR(pose_distance(RigidState{}, pose_from_coordinates(unit6(3, 0.25))), 0.25, 1e-15);
}

TEST(Holonomy, ClosedStrokeMatchesLeadingOrder) {
  // Magnus expansion: the remainder is quadratic relative to the leading term.
  std::vector<double> rel;
  for (double scale : {1.0, 0.5, 0.25}) {
    const HolonomyResult h = stroke_holonomy(sig(), sample_stroke(scale), 400);
    rel.push_back((h.integrated - h.predicted).norm() / h.predicted.norm());
  }
  EXPECT_LT(rel[0], 0.1);
  EXPECT_NEAR(rel[0] / rel[1], 4.0, 2.0);
  EXPECT_NEAR(rel[1] / rel[2], 4.0, 2.0);
}

TEST(Holonomy, BracketMatrixHasFullRank) {
  const auto B = bracket_matrix(sig());
  EXPECT_EQ(B.cols(), 6);
  EXPECT_EQ(numerical_rank(B), 6);
}

TEST(Holonomy, AreaStrokeHitsLeadingOrderTarget) {
  for (int i = 0; i < 6; ++i) {
    const Vector6d target = unit6(i, 1e-4);
    const Stroke s = area_stroke(sig(), target);
    const HolonomyResult h = stroke_holonomy(sig(), s);
    EXPECT_LT((h.predicted - target).norm(), 1e-12) << i;
    EXPECT_LT((h.integrated - target).norm(), 0.1 * 1e-4) << i;
  }
  EXPECT_EQ(area_stroke(sig(), Vector6d::Zero()).coeffs.norm(), 0.0);
}

TEST(Steer, IdentityNeedsNoStrokes) {
  const SteerResult r = steer(sig(), Vector6d::Zero(), 10);
  EXPECT_TRUE(r.strokes.empty());
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Steer, RotationUsesModesOneAndTwo) {
  const SteerResult r = steer(sig(), unit6(2, 1e-3), 10);
  EXPECT_LT(r.residual, 1e-6);
  ASSERT_EQ(r.strokes.size(), 1u);
  const Eigen::MatrixXd A = r.strokes[0].areas();
  EXPECT_NEAR(std::abs(A(0, 1)), A.cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t k = 1; k < r.newton_residuals.size(); ++k)
    EXPECT_LT(r.newton_residuals[k], r.newton_residuals[k - 1]);
}

TEST(Steer, TranslationUsesModeFour) {
  const SteerResult r = steer(sig(), unit6(3, 1e-3), 10);
  EXPECT_LT(r.residual, 1e-6);
  const Eigen::MatrixXd A = r.strokes.at(0).areas();
  const double with_four = A.col(3).cwiseAbs().maxCoeff();
  const double without = A.topLeftCorner(3, 3).cwiseAbs().maxCoeff();
  EXPECT_GT(with_four, without);
  EXPECT_LT(pose_distance(r.achieved, pose_from_coordinates(unit6(3, 1e-3))), 1e-6);
}

TEST(Steer, StrokesStayInsideTheBox) {
  const SteerResult r = steer(sig(), (Vector6d() << 2e-3, -1e-3, 1e-3, 1e-3, 2e-3, -1e-3).finished(), 50);
  EXPECT_LT(r.residual, 1e-6);
  for (const auto& s : r.strokes) EXPECT_LE(s.amplitude().maxCoeff(), 0.2);
}

TEST(Steer, BudgetExceededRaises) {
  try {
    steer(sig(), unit6(2, 0.5), 2);
    FAIL() << "expected SteeringError";
  } catch (const SteeringError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Track, StationaryReferenceNeedsNoMotion) {
  TrackingProblem p;
  p.reference = [](double) { return RigidState{}; };
  const TrackingResult r = track(sig(), p);
  EXPECT_EQ(r.sup_deviation, 0.0);
  EXPECT_TRUE(r.plan.empty());
  for (const auto& s : r.trajectory.shapes) EXPECT_EQ(s.norm(), 0.0);
}

TEST(Track, LineWithinEpsilon) {
  TrackingProblem p;
  p.reference = [](double t) { return pose_from_coordinates(unit6(3, 0.05 * t)); };
  const TrackingResult r = track(sig(), p);
  EXPECT_LT(r.sup_deviation, p.epsilon);
  EXPECT_LT(r.max_waypoint_residual, 1e-6);
  EXPECT_EQ(r.knots.size(), static_cast<std::size_t>(r.intervals + 1));
  EXPECT_LT(pose_distance(r.trajectory.final_state(), p.reference(1.0)), 1e-6);
}

TEST(Track, WithMacroShapePath) {
  TrackingProblem p;
  p.reference = [](double t) { return pose_from_coordinates(unit6(2, 0.05 * t)); };
  p.macro_shape = [](double t) { return Eigen::VectorXd(Eigen::VectorXd::Unit(4, 2) * 0.02 * std::sin(2 * pi * t)); };
  p.macro_rate = [](double t) {
    return Eigen::VectorXd(Eigen::VectorXd::Unit(4, 2) * 0.02 * 2 * pi * std::cos(2 * pi * t));
  };
  const TrackingResult r = track(sig(), p);
  EXPECT_LT(r.sup_deviation, p.epsilon);
  EXPECT_LT(r.max_waypoint_residual, 1e-6);
}

TEST(Track, UnreachableToleranceRaises) {
  TrackingProblem p;
  p.reference = [](double t) { return pose_from_coordinates(unit6(3, 0.5 * t)); };
  p.epsilon = 1e-9;
  p.max_refinements = 1;
  p.budget_per_interval = 5;
  EXPECT_THROW(track(sig(), p), SteeringError);
}

TEST(Optimize, ZeroTargetGivesZeroStroke) {
  const OptimizeResult r = optimize_stroke(sig(), StrokeCost::Effort, Vector6d::Zero(), Eigen::VectorXd::Constant(4, 0.2));
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.stroke.coeffs.norm(), 0.0);
}

TEST(Optimize, CostFunctions) {
  const Stroke s = sample_stroke(1.0);
  EXPECT_DOUBLE_EQ(stroke_cost(sig(), s, StrokeCost::Effort), s.effort());
  EXPECT_GT(stroke_cost(sig(), s, StrokeCost::Dissipation), 0.0);
  EXPECT_EQ(stroke_cost(sig(), Stroke::zero(4), StrokeCost::Dissipation), 0.0);
}
