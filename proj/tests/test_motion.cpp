#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "swimlab/errors.hpp"
#include "swimlab/motion.hpp"
#include "swimlab/so3.hpp"
#include "test_support.hpp"

using namespace swimlab;
using std::numbers::pi;

namespace {

const SwimmerSignature& sig() { return fixtures::reference_signature(); }

Eigen::VectorXd unit4(int i, double v) { return v * Eigen::VectorXd::Unit(4, i); }

// Rectangle of side rho in the (s1, s2) plane traversed counter-clockwise.
ControlLaw square_loop(double rho, double side_time) {
  ControlLaw law(4);
  const double rate = rho / side_time;
  law.add_constant(0 * side_time, 1 * side_time, unit4(0, rate));
  law.add_constant(1 * side_time, 2 * side_time, unit4(1, rate));
  law.add_constant(2 * side_time, 3 * side_time, unit4(0, -rate));
  law.add_constant(3 * side_time, 4 * side_time, unit4(1, -rate));
  return law;
}

ControlLaw smooth_law() {
  ControlLaw law(4);
  law.add(0.0, 1.0, [](double t) {
    Eigen::VectorXd v(4);
    const double w = 2.0 * pi;
    v << 0.1 * w * std::cos(w * t), 0.1 * w * std::sin(w * t), 0.05 * 2 * w * std::cos(2 * w * t),
        0.08 * w * std::sin(w * t);
    return v;
  });
  return law;
}

Vector6d nonlinear_twist(double t, const Eigen::VectorXd& s, const Eigen::VectorXd& lam) {
  Vector6d xi;
  xi << std::sin(t) + s(0), std::cos(2 * t), s(0) * s(0), 0.5, t, lam(0);
  return xi;
}

}  // namespace

TEST(ControlLaw, PiecesAndEvaluation) {
  ControlLaw law(2);
  law.add_constant(0.0, 0.3, Eigen::Vector2d(1.0, 0.0));
  law.add_constant(0.3, 1.0, Eigen::Vector2d(0.0, 2.0));
  EXPECT_EQ(law(0.1), Eigen::Vector2d(1.0, 0.0));
  EXPECT_EQ(law(0.3), Eigen::Vector2d(0.0, 2.0));  // half-open pieces
  EXPECT_EQ(law.eval_in(0.3, 0.0, 0.3), Eigen::Vector2d(1.0, 0.0));
  EXPECT_EQ(law(1.5), Eigen::Vector2d::Zero());
  EXPECT_EQ(law.breakpoints(2.0), (std::vector<double>{0.3, 1.0}));
  EXPECT_THROW(law.add_constant(0.5, 0.7, Eigen::Vector2d::Zero()), DomainError);
  EXPECT_THROW(law.add_constant(2.0, 1.5, Eigen::Vector2d::Zero()), DomainError);
  EXPECT_THROW(law.add_constant(2.0, 3.0, Eigen::Vector3d::Zero()), DomainError);
}

TEST(Integrator, ZeroControlKeepsTheBodyAtRest) {
  RigidState x0;
  x0.R = so3::exp(Eigen::Vector3d(0.1, -0.2, 0.3));
  x0.r = Eigen::Vector3d(1.0, 2.0, 3.0);
  const IntegrationResult res = integrate(sig(), ControlLaw::zero(4), x0, Eigen::VectorXd::Zero(4), 1.0, 1e-2);
  EXPECT_EQ(res.status, IntegrationStatus::Completed);
  for (const auto& x : res.trajectory.states) {
    EXPECT_LT((x.R - x0.R).norm(), 1e-14);
    EXPECT_LT((x.r - x0.r).norm(), 1e-14);
  }
}

TEST(Integrator, ConstantTwistIsExactRotation) {
  const Eigen::Vector3d w(0.3, -0.5, 1.1), v = 0.7 * w;
  const TwistModel model = [&](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Vector6d xi;
    xi << w, v;
    return xi;
  };
  const IntegrationResult res = integrate_model(model, ControlLaw::zero(1), RigidState{}, Eigen::VectorXd::Zero(1), 2.0, 1e-3);
  EXPECT_LT((res.trajectory.final_state().R - so3::exp(2.0 * w)).norm(), 1e-10);
  EXPECT_LT((res.trajectory.final_state().r - 2.0 * v).norm(), 1e-10);
  EXPECT_LT(res.max_orthogonality_defect, 1e-13);
}

TEST(Integrator, FourthOrderConvergence) {
  ControlLaw law(1);
  law.add(0.0, 2.0, [](double t) { return Eigen::VectorXd::Constant(1, std::cos(3.0 * t)); });
  auto run = [&](double h) {
    return integrate_model(nonlinear_twist, law, RigidState{}, Eigen::VectorXd::Zero(1), 2.0, h).trajectory.final_state();
  };
  const RigidState ref = run(1e-3);
  auto err = [&](double h) {
    const RigidState x = run(h);
    return (x.R - ref.R).norm() + (x.r - ref.r).norm();
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_NEAR(ratio, 16.0, 0.3 * 16.0);
}

TEST(Integrator, TimeReparametrizationInvariance) {
  const double c = 2.5;
  ControlLaw slow = smooth_law();
  ControlLaw fast(4);
  fast.add(0.0, 1.0 / c, [&](double t) { return Eigen::VectorXd(c * slow(c * t)); });
  const RigidState a =
      integrate(sig(), slow, RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-3).trajectory.final_state();
  const RigidState b =
      integrate(sig(), fast, RigidState{}, Eigen::VectorXd::Zero(4), 1.0 / c, 1e-3 / c).trajectory.final_state();
  EXPECT_LT((a.R - b.R).norm() + (a.r - b.r).norm(), 1e-8);
  EXPECT_GT(a.r.norm() + so3::log(a.R).norm(), 1e-6);  // the test moves the body
}

TEST(Integrator, StepsAlignWithControlDiscontinuities) {
  const ControlLaw law = square_loop(0.1, 0.3);
  const IntegrationResult res = integrate(sig(), law, RigidState{}, Eigen::VectorXd::Zero(4), 1.2, 0.07);
  const auto& times = res.trajectory.times;
  for (double b : {0.3, 0.6, 0.9})
    EXPECT_TRUE(std::any_of(times.begin(), times.end(), [&](double t) { return std::abs(t - b) < 1e-14; }));
  // Piecewise-constant rates give piecewise-linear shapes, resolved exactly.
  EXPECT_LT((res.trajectory.shapes.back()).norm(), 1e-14);
  for (std::size_t i = 1; i < times.size(); ++i)
    EXPECT_LT((res.trajectory.shapes[i] - res.trajectory.shapes[i - 1]).norm(), 0.1 * 0.07 / 0.3 + 1e-12);
}

TEST(Integrator, SquareLoopRotatesAboutE3) {
  for (double rho : {0.05, 0.1}) {
    const IntegrationResult res = integrate(sig(), square_loop(rho, 0.25), RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-3);
    const Eigen::Vector3d w = so3::log(res.trajectory.final_state().R);
    const double expected = 3.0 * rho * rho / (32.0 * pi);
    EXPECT_NEAR(w.norm(), expected, 1e-10 * expected);
    EXPECT_NEAR(std::abs(w(2)), w.norm(), 1e-15);
  }
}

TEST(Integrator, OrthogonalityDriftStaysSmall) {
  const IntegrationResult res = integrate(sig(), smooth_law(), RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-3);
  EXPECT_LT(res.max_orthogonality_defect, 1e-9);
}

TEST(Integrator, LeavingTheBoxTruncates) {
  ControlLaw law(4);
  law.add_constant(0.0, 1.0, unit4(0, 0.5));
  const IntegrationResult res = integrate(sig(), law, RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-3);
  EXPECT_EQ(res.status, IntegrationStatus::LeftShapeBox);
  EXPECT_FALSE(res.message.empty());
  EXPECT_NEAR(res.trajectory.times.back(), 0.4, 2e-3);
  EXPECT_TRUE(sig().box().contains(res.trajectory.shapes.back()));
}

TEST(Integrator, NonFiniteStateRaises) {
  const TwistModel bad = [](double t, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Vector6d xi = Vector6d::Zero();
    if (t > 0.5) xi(0) = std::nan("");
    return xi;
  };
  EXPECT_THROW(integrate_model(bad, ControlLaw::zero(1), RigidState{}, Eigen::VectorXd::Zero(1), 1.0, 0.1), NumericalError);
}

TEST(Integrator, InputValidation) {
  EXPECT_THROW(integrate(sig(), ControlLaw::zero(4), RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 0.0), DomainError);
  EXPECT_THROW(integrate(sig(), ControlLaw::zero(3), RigidState{}, Eigen::VectorXd::Zero(3), 1.0, 0.1), DomainError);
  RigidState skewed;
  skewed.R(0, 1) = 0.5;
  EXPECT_THROW(integrate(sig(), ControlLaw::zero(4), skewed, Eigen::VectorXd::Zero(4), 1.0, 0.1), DomainError);
  EXPECT_THROW(integrate(sig(), ControlLaw::zero(4), RigidState{}, Eigen::VectorXd::Constant(4, 0.3), 1.0, 0.1),
               DomainError);
}

TEST(Energy, ZeroForZeroControlAndPositiveOtherwise) {
  const IntegrationResult rest = integrate(sig(), ControlLaw::zero(4), RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-2);
  EXPECT_EQ(dissipated_energy(sig(), rest.trajectory), 0.0);
  const IntegrationResult moving = integrate(sig(), smooth_law(), RigidState{}, Eigen::VectorXd::Zero(4), 1.0, 1e-2);
  EXPECT_GT(dissipated_energy(sig(), moving.trajectory), 0.0);
}

TEST(FrameEquivalence, IdentityDisplacement) {
  const RigidPath id{[](double) { return Eigen::Matrix3d::Identity(); }, [](double) { return Eigen::Vector3d::Zero(); }};
  EXPECT_LT(frame_equivalence_check(sig(), smooth_law(), RigidState{}, id, 1.0, 1e-2), 1e-12);
}

TEST(FrameEquivalence, RotationAboutE3AtRest) {
  const RigidPath spin{[](double t) { return so3::exp(Eigen::Vector3d(0.0, 0.0, 0.7 * t)); },
                       [](double) { return Eigen::Vector3d::Zero(); }};
  EXPECT_LT(frame_equivalence_check(sig(), ControlLaw::zero(4), RigidState{}, spin, 1.0, 1e-3), 1e-8);
}

TEST(FrameEquivalence, RandomSmoothDisplacements) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int draw = 0; draw < 5; ++draw) {
    const Eigen::Vector3d w1(g(rng), g(rng), g(rng)), w2(g(rng), g(rng), g(rng));
    const Eigen::Vector3d a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
    const RigidPath path{[=](double t) { return so3::exp(Eigen::Vector3d(t * w1 + t * t * w2)); },
                         [=](double t) { return Eigen::Vector3d(t * a + std::sin(t) * b); }};
    EXPECT_LT(frame_equivalence_check(sig(), smooth_law(), RigidState{}, path, 1.0, 1e-3), 1e-6) << "draw " << draw;
  }
}

TEST(TrajectoryCsv, HeaderAndPrecision) {
  const IntegrationResult res = integrate(sig(), smooth_law(), RigidState{}, Eigen::VectorXd::Zero(4), 0.02, 1e-2);
  std::ostringstream out;
  write_trajectory_csv(out, res.trajectory);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header,
            "t,R11,R12,R13,R21,R22,R23,R31,R32,R33,r1,r2,r3,s1,s2,s3,s4,lambda1,lambda2,lambda3,lambda4");
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 20);
  }
  EXPECT_EQ(rows, 3);
  // Values round-trip exactly.
  std::istringstream last(out.str().substr(out.str().rfind("\n", out.str().size() - 2) + 1));
  std::string first_cell;
  std::getline(last, first_cell, ',');
  EXPECT_EQ(std::stod(first_cell), res.trajectory.times.back());
}
