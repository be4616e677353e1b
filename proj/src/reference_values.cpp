#include "swimlab/reference_values.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "swimlab/errors.hpp"

namespace swimlab {

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : text_(text) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    if (!std::isfinite(v)) fail("non-finite value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot evaluate '" + text_ + "': " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(const std::string& w) {
    skip_space();
    if (text_.compare(pos_, w.size(), w) == 0) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) v *= unary();
      else if (accept('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left.
  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (accept_word("sqrt")) {
      if (!accept('(')) fail("sqrt needs '('");
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      if (v < 0.0) fail("sqrt of a negative number");
      return std::sqrt(v);
    }
    if (accept_word("pi")) return std::numbers::pi;
    skip_space();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number at position " + std::to_string(pos_));
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(const std::string& text) { return ExpressionParser(text).parse(); }

std::filesystem::path default_fixture_path() {
  return std::filesystem::path(SWIMLAB_DATA_DIR) / "reference_coupling_derivatives.json";
}

ReferenceFixture load_reference_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture " + path.string());
  ReferenceFixture fx;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    fx.angular_expression = j.at("resistance_diagonal").at("angular").get<std::string>();
    fx.linear_expression = j.at("resistance_diagonal").at("linear").get<std::string>();
    fx.angular_diagonal = evaluate_expression(fx.angular_expression);
    fx.linear_diagonal = evaluate_expression(fx.linear_expression);
    const auto& blocks = j.at("coupling_derivatives");
    const auto n = static_cast<Eigen::Index>(blocks.size());
    fx.dN.assign(blocks.size(), Matrix6Xd::Zero(6, n));
    for (const auto& b : blocks) {
      const int k = b.at("mode").get<int>();
      if (k < 1 || k > n) throw ConfigError("fixture mode index out of range");
      for (const auto& e : b.at("entries")) {
        FixtureEntry fe;
        fe.mode = k;
        fe.row = e.at("row").get<int>();
        fe.col = e.at("col").get<int>();
        if (fe.row < 1 || fe.row > 6 || fe.col < 1 || fe.col > n) throw ConfigError("fixture entry index out of range");
        fe.expression = e.at("value").get<std::string>();
        fe.value = evaluate_expression(fe.expression);
        fx.dN[static_cast<std::size_t>(k - 1)](fe.row - 1, fe.col - 1) = fe.value;
        fx.entries.push_back(fe);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed fixture: ") + e.what());
  }
  return fx;
}

ResistanceSet fixture_resistance_set(const ReferenceFixture& fixture) {
  ResistanceSet rs;
  Vector6d diag;
  diag << Eigen::Vector3d::Constant(fixture.angular_diagonal), Eigen::Vector3d::Constant(fixture.linear_diagonal);
  rs.M = diag.asDiagonal();
  const auto n = static_cast<Eigen::Index>(fixture.dN.size());
  rs.N = Matrix6Xd::Zero(6, n);
  rs.dN = fixture.dN;
  return rs;
}

FixtureComparison compare_with_fixture(const std::vector<Matrix6Xd>& computed, const ReferenceFixture& fixture,
                                       double tol) {
  if (computed.size() != fixture.dN.size()) throw DomainError("mode count differs from the fixture");
  FixtureComparison out;
  for (std::size_t k = 0; k < computed.size(); ++k) {
    if (computed[k].cols() != fixture.dN[k].cols()) throw DomainError("matrix shape differs from the fixture");
    for (Eigen::Index c = 0; c < computed[k].cols(); ++c)
      for (Eigen::Index r = 0; r < 6; ++r) {
        EntryComparison e;
        e.mode = static_cast<int>(k) + 1;
        e.row = static_cast<int>(r) + 1;
        e.col = static_cast<int>(c) + 1;
        for (const auto& fe : fixture.entries)
          if (fe.mode == e.mode && fe.row == e.row && fe.col == e.col) e.expression = fe.expression;
        e.published = fixture.dN[k](r, c);
        e.computed = computed[k](r, c);
        const double err = std::abs(std::abs(e.computed) - std::abs(e.published));
        e.magnitude_match = err <= tol;
        const bool both_nonzero = std::abs(e.computed) > tol && std::abs(e.published) > tol;
        e.sign_match = !both_nonzero || (e.computed > 0) == (e.published > 0);
        out.max_magnitude_error = std::max(out.max_magnitude_error, err);
        if (!e.magnitude_match) ++out.magnitude_mismatches;
        if (!e.sign_match) ++out.sign_mismatches;
        out.entries.push_back(std::move(e));
      }
  }
  return out;
}

}  // namespace swimlab
