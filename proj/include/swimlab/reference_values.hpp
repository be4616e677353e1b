#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swimlab/mobility.hpp"

namespace swimlab {

/// Evaluates a closed-form constant such as "-3*sqrt(5)/2^(3/2)".
/// Supports + - * / ^, unary minus, parentheses, sqrt(...) and pi.
double evaluate_expression(const std::string& text);

struct FixtureEntry {
  int mode = 0;  // 1-based
  int row = 0;   // 1-based
  int col = 0;   // 1-based
  std::string expression;
  double value = 0.0;
};

struct ReferenceFixture {
  std::string angular_expression;
  std::string linear_expression;
  double angular_diagonal = 0.0;
  double linear_diagonal = 0.0;
  std::vector<FixtureEntry> entries;
  std::vector<Matrix6Xd> dN;
};

std::filesystem::path default_fixture_path();
ReferenceFixture load_reference_fixture(const std::filesystem::path& path = default_fixture_path());

/// Resistance set built from the fixture alone (no solver involved).
ResistanceSet fixture_resistance_set(const ReferenceFixture& fixture);

struct EntryComparison {
  int mode = 0, row = 0, col = 0;  // 1-based
  std::string expression;          // empty for entries published as zero
  double published = 0.0;
  double computed = 0.0;
  bool magnitude_match = false;
  bool sign_match = false;
};

struct FixtureComparison {
  std::vector<EntryComparison> entries;  // every entry of every matrix
  double max_magnitude_error = 0.0;
  int magnitude_mismatches = 0;
  int sign_mismatches = 0;
};

/// Entrywise comparison with |.| tolerance `tol`. Signs are compared only
/// where both values exceed `tol` in magnitude.
FixtureComparison compare_with_fixture(const std::vector<Matrix6Xd>& computed, const ReferenceFixture& fixture,
                                       double tol = 1e-6);

}  // namespace swimlab
