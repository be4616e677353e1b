#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "swimlab/errors.hpp"
#include "swimlab/reference_values.hpp"
#include "test_support.hpp"

using namespace swimlab;
using std::numbers::pi;

TEST(Expression, EvaluatesClosedForms) {
  EXPECT_NEAR(evaluate_expression("-3*sqrt(5)/2^(3/2)"), -3.0 * std::sqrt(5.0) / std::pow(2.0, 1.5), 1e-15);
  EXPECT_NEAR(evaluate_expression("sqrt(3)*5^(3/2)/(2^(3/2)*sqrt(7))"),
              std::sqrt(3.0) * std::pow(5.0, 1.5) / (std::pow(2.0, 1.5) * std::sqrt(7.0)), 1e-14);
  EXPECT_NEAR(evaluate_expression("8*pi"), 8.0 * pi, 1e-15);
  EXPECT_DOUBLE_EQ(evaluate_expression("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(evaluate_expression(" 1 + 2 * 3 - 4 / 8 "), 6.5);
  EXPECT_DOUBLE_EQ(evaluate_expression("0"), 0.0);
}

TEST(Expression, RejectsMalformedInput) {
  for (const char* bad : {"", "1 +", "sqrt 4", "(1", "2 ** 3", "foo", "1 2", "sqrt(-1)", "1/0"})
    EXPECT_THROW(evaluate_expression(bad), ConfigError) << bad;
}

TEST(Fixture, LoadsPublishedValues) {
  const ReferenceFixture fx = load_reference_fixture();
  EXPECT_NEAR(fx.angular_diagonal, 8.0 * pi, 1e-14);
  EXPECT_NEAR(fx.linear_diagonal, 4.0 * pi, 1e-14);
  EXPECT_EQ(fx.entries.size(), 12u);
  ASSERT_EQ(fx.dN.size(), 4u);
  EXPECT_DOUBLE_EQ(fx.dN[0](2, 1), -0.375);
  EXPECT_DOUBLE_EQ(fx.dN[1](2, 0), 0.375);
  EXPECT_EQ((fx.dN[0].array() != 0.0).count(), 3);
}

TEST(Fixture, ResistanceSetUsesPublishedMatrices) {
  const ReferenceFixture fx = load_reference_fixture();
  const ResistanceSet set = fixture_resistance_set(fx);
  EXPECT_NEAR(set.M(0, 0), 8.0 * pi, 1e-14);
  EXPECT_NEAR(set.M(3, 3), 4.0 * pi, 1e-14);
  EXPECT_EQ(set.N.cols(), 4);
  EXPECT_EQ(set.N.norm(), 0.0);
  EXPECT_EQ(set.dN[2], fx.dN[2]);
}

TEST(Fixture, ComparisonAgainstItselfMatches) {
  const ReferenceFixture fx = load_reference_fixture();
  const FixtureComparison cmp = compare_with_fixture(fx.dN, fx);
  EXPECT_EQ(cmp.magnitude_mismatches, 0);
  EXPECT_EQ(cmp.sign_mismatches, 0);
  EXPECT_EQ(cmp.entries.size(), 4u * 24u);
}

TEST(Fixture, ComparisonFlagsSignsAndMagnitudes) {
  const ReferenceFixture fx = load_reference_fixture();
  std::vector<Matrix6Xd> altered = fx.dN;
  altered[0](2, 1) *= -1.0;
  altered[3](0, 0) = 1.0;
  const FixtureComparison cmp = compare_with_fixture(altered, fx);
  EXPECT_EQ(cmp.sign_mismatches, 1);
  EXPECT_EQ(cmp.magnitude_mismatches, 1);
  EXPECT_NEAR(cmp.max_magnitude_error, 1.0, 1e-15);
}

TEST(Fixture, MissingFileIsConfigError) {
  EXPECT_THROW(load_reference_fixture("/nonexistent/fixture.json"), ConfigError);
}
