#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "swimlab/errors.hpp"
#include "swimlab/reference_values.hpp"
#include "swimlab/signature.hpp"
#include "test_support.hpp"

using namespace swimlab;
using std::numbers::pi;

namespace {

const auto& quad() { return fixtures::default_quadrature(); }
const SwimmerSignature& sig() { return fixtures::reference_signature(); }

SwimmerSignature fixture_signature() {
  return SwimmerSignature(reference_modes(), ShapeBox::symmetric(4, 0.2),
                          fixture_resistance_set(load_reference_fixture()), quad());
}

Eigen::VectorXd zero4() { return Eigen::VectorXd::Zero(4); }

}  // namespace

TEST(ShapeBox, ContainsAndValidation) {
  const ShapeBox box = ShapeBox::symmetric(2, 0.2);
  EXPECT_TRUE(box.contains(Eigen::Vector2d(0.2, -0.2)));
  EXPECT_FALSE(box.contains(Eigen::Vector2d(0.21, 0.0)));
  EXPECT_THROW(ShapeBox::symmetric(2, 0.0), DomainError);
}

TEST(Signature, ReferenceSignatureIsValid) {
  EXPECT_EQ(sig().size(), 4);
  EXPECT_LT(sig().constraint_residual(), 1e-12);
  EXPECT_GT(sig().gram_condition(), 0.0);
  EXPECT_LT(sig().gram_condition(), 10.0);
}

TEST(Signature, RejectsInvalidInput) {
  auto modes = reference_modes();
  const ShapeBox box = ShapeBox::symmetric(4, 0.2);
  const ResistanceSet rs = sig().resistance();

  auto dup = modes;
  dup[1] = dup[0];
  EXPECT_THROW(SwimmerSignature::build(dup, box, quad()), SignatureError);

  auto propelled = modes;
  propelled[0] = DeformationMode::decaying({1, 0, HarmonicPart::Real});
  EXPECT_THROW(SwimmerSignature::build(propelled, box, quad()), SignatureError);

  ShapeBox off = box;
  off.lower(2) = 0.05;
  EXPECT_THROW(SwimmerSignature(modes, off, rs, quad()), SignatureError);
  EXPECT_THROW(SwimmerSignature(modes, ShapeBox::symmetric(3, 0.2), rs, quad()), SignatureError);

  ResistanceSet bad = rs;
  bad.M(0, 0) = -1.0;
  EXPECT_THROW(SwimmerSignature(modes, box, bad, quad()), SignatureError);
  bad = rs;
  bad.M(0, 1) = 1.0;
  EXPECT_THROW(SwimmerSignature(modes, box, bad, quad()), SignatureError);
  bad = rs;
  bad.dN.pop_back();
  EXPECT_THROW(SwimmerSignature(modes, box, bad, quad()), SignatureError);
  EXPECT_THROW(SwimmerSignature({}, ShapeBox{}, ResistanceSet{}, quad()), SignatureError);
}

TEST(Signature, TwistIsMinusMobilityTimesCoupling) {
  Eigen::VectorXd s(4), rates(4);
  s << 0.05, -0.1, 0.02, 0.15;
  rates << 1.0, 0.3, -0.7, 0.2;
  const Vector6d expected = -sig().mobility_inverse() * sig().resistance().coupling_at(s) * rates;
  EXPECT_LT((sig().twist(s, rates) - expected).norm(), 1e-15);
  EXPECT_THROW(sig().twist(s, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST(Brackets, FixtureValuesForModesOneAndTwo) {
  const SwimmerSignature fx = fixture_signature();
  const ControlField b = lie_bracket(fx, 0, 1, zero4());
  Vector6d expected = Vector6d::Zero();
  expected(2) = 3.0 / (32.0 * pi);
  EXPECT_LT((b.body_twist - expected).norm(), 1e-14);
  EXPECT_EQ(b.shape_rate.norm(), 0.0);

  const double sigma = 0.1;
  Eigen::VectorXd s = zero4();
  s(0) = sigma;
  const ControlField g = generator(fx, 1, s);
  EXPECT_NEAR(g.body_twist(2), sigma * (3.0 / 8.0) / (8.0 * pi), 1e-15);
  EXPECT_EQ(g.shape_rate, Eigen::VectorXd::Unit(4, 1));
}

TEST(Brackets, ComputedBracketHasPublishedMagnitudeAndOppositeSign) {
  const ControlField b = lie_bracket(sig(), 0, 1, zero4());
  EXPECT_NEAR(b.body_twist(2), -3.0 / (32.0 * pi), 1e-12);
  EXPECT_LT((b.body_twist - b.body_twist(2) * Vector6d::Unit(2)).norm(), 1e-12);
}

TEST(Brackets, AntisymmetricAndZeroOnDiagonal) {
  Eigen::VectorXd s(4);
  s << 0.03, -0.02, 0.1, 0.0;
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT(lie_bracket(sig(), i, i, s).body_twist.norm(), 1e-15);
    for (int j = 0; j < 4; ++j)
      EXPECT_LT((lie_bracket(sig(), i, j, s).body_twist + lie_bracket(sig(), j, i, s).body_twist).norm(), 1e-15);
  }
}

TEST(Brackets, DomainChecks) {
  EXPECT_THROW(generator(sig(), 4, zero4()), DomainError);
  EXPECT_THROW(lie_bracket(sig(), -1, 0, zero4()), DomainError);
  EXPECT_THROW(generator(sig(), 0, Eigen::VectorXd::Constant(4, 0.3)), DomainError);
  EXPECT_THROW(rank_certificate(sig(), Eigen::VectorXd::Constant(4, 0.3)), DomainError);
}

TEST(Brackets, DepthTwoIsFiniteAndTangentToRigidMotions) {
  Eigen::VectorXd s(4);
  s << 0.01, 0.02, -0.03, 0.04;
  const ControlField f = depth_two_bracket(sig(), 2, 0, 1, s);
  EXPECT_TRUE(f.body_twist.allFinite());
  EXPECT_EQ(f.shape_rate.norm(), 0.0);
}

TEST(Certificate, ComputedSignatureIsControllable) {
  const RankCertificate c = rank_certificate(sig(), zero4());
  EXPECT_EQ(c.target, 10);
  EXPECT_EQ(c.rank, 10);
  EXPECT_EQ(c.bracket_span, 6);
  EXPECT_EQ(c.depth, 1);
  EXPECT_TRUE(c.controllable);
  EXPECT_EQ(c.brackets.size(), 6u);
  for (std::size_t i = 1; i < c.singular_values.size(); ++i)
    EXPECT_LE(c.singular_values[i], c.singular_values[i - 1]);
}

TEST(Certificate, FixtureSignatureIsControllable) {
  const RankCertificate c = rank_certificate(fixture_signature(), zero4());
  EXPECT_EQ(c.rank, 10);
  EXPECT_EQ(c.bracket_span, 6);
}

TEST(Certificate, InvariantUnderModeRescaling) {
  auto modes = reference_modes();
  modes[0].amplitude = 2.0;
  modes[3].amplitude = 0.25;
  const SwimmerSignature scaled = SwimmerSignature::build(modes, ShapeBox::symmetric(4, 0.2), quad());
  const RankCertificate c = rank_certificate(scaled, zero4());
  EXPECT_EQ(c.rank, 10);
  EXPECT_EQ(c.bracket_span, 6);
  EXPECT_NEAR(scaled.resistance().dN[0](3, 3), 0.5 * sig().resistance().dN[0](3, 3), 1e-12);
}

TEST(Certificate, InvariantUnderModePermutation) {
  auto modes = reference_modes();
  std::swap(modes[0], modes[3]);
  std::swap(modes[1], modes[2]);
  const SwimmerSignature perm = SwimmerSignature::build(modes, ShapeBox::symmetric(4, 0.2), quad());
  EXPECT_EQ(rank_certificate(perm, zero4()).rank, 10);
  EXPECT_LT((perm.resistance().dN[3].col(0) - sig().resistance().dN[0].col(3)).norm(), 1e-13);
}

TEST(Certificate, ViscosityCancelsExactly) {
  for (double mu : {1e-3, 0.5, 7.0, 1e3}) {
    const SwimmerSignature v = sig().with_viscosity(mu);
    EXPECT_EQ(rank_certificate(v, zero4()).rank, 10);
    Eigen::VectorXd s(4), rates(4);
    s << 0.1, -0.05, 0.02, 0.0;
    rates << 0.3, 1.0, -0.4, 0.8;
    const Vector6d a = sig().twist(s, rates), b = v.twist(s, rates);
    EXPECT_LE((a - b).norm(), 1e-14 * a.norm());
  }
  EXPECT_THROW(sig().with_viscosity(0.0), DomainError);
}

TEST(Certificate, SingleModeIsNotControllable) {
  const SwimmerSignature one =
      SwimmerSignature::build({DeformationMode::decaying({3, 1, HarmonicPart::Real})}, ShapeBox::symmetric(1, 0.2), quad());
  const RankCertificate c = rank_certificate(one, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(c.target, 7);
  EXPECT_EQ(c.rank, 1);
  EXPECT_FALSE(c.controllable);
  try {
    perturb_to_controllable(one, 1e-3, 1, 2);
    FAIL() << "expected NoCertificateError";
  } catch (const NoCertificateError& e) {
    EXPECT_EQ(e.best_rank(), 1);
  }
}

TEST(Certificate, PerturbationIsSmallAndValid) {
  std::mt19937_64 rng(5);
  const double delta = 1e-3;
  const SwimmerSignature p = perturb_signature(sig(), delta, rng);
  for (std::size_t k = 0; k < 4; ++k) {
    DeformationMode bump = p.modes()[k];
    bump.amplitude = 0.0;
    const SurfaceField f = mode_boundary_field(bump, quad());
    EXPECT_LE(std::sqrt(surface_inner(f, f)), delta * (1.0 + 1e-12));
    EXPECT_GT(std::sqrt(surface_inner(f, f)), 0.0);
  }
  EXPECT_LT(p.constraint_residual(), 1e-10);
  const SwimmerSignature same = perturb_to_controllable(sig(), delta, 1);
  EXPECT_EQ(same.resistance().dN[2], sig().resistance().dN[2]);
}

TEST(NumericalRank, ThresholdAndOrdering) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m.diagonal() << 1.0, 1e-6, 1e-10;
  std::vector<double> sv;
  EXPECT_EQ(numerical_rank(m, kRankThreshold, &sv), 2);
  EXPECT_EQ(sv.size(), 3u);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(2, 2)), 0);
}
