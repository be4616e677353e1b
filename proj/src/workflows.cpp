#include "swimlab/workflows.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swimlab/errors.hpp"
#include "swimlab/reference_values.hpp"
#include "swimlab/so3.hpp"

namespace swimlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kBlockTolerance = 1e-8;
constexpr double kProjectionTolerance = 1e-8;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Distance of a 3x3 block from c * Id.
double block_error(const Matrix6d& M, int block, double c) {
  return (M.block<3, 3>(3 * block, 3 * block) - c * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

bool same_modes(const std::vector<DeformationMode>& a, const std::vector<DeformationMode>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto &x = a[i], &y = b[i];
    if (x.harmonic.degree != y.harmonic.degree || x.harmonic.order != y.harmonic.order ||
        x.harmonic.part != y.harmonic.part || x.radial_exponent != y.radial_exponent ||
        std::abs(x.amplitude - y.amplitude) > 1e-15 || !x.extra.empty() || !y.extra.empty())
      return false;
  }
  return true;
}

SwimmerSignature build_signature(const RunConfig& config) {
  const auto quad = build_quadrature(config.quadrature_degree);
  SwimmerSignature sig = SwimmerSignature::build(config.deformation_modes(), config.shape_box(), quad);
  return config.viscosity == 1.0 ? sig : sig.with_viscosity(config.viscosity);
}

json certificate_json(const RankCertificate& cert) {
  json brackets = json::array();
  for (const auto& b : cert.brackets) {
    std::vector<int> word;
    for (int w : b.word) word.push_back(w + 1);
    brackets.push_back({{"modes", word}, {"vector", vector_json(b.field.stacked())}});
  }
  return {{"rank", cert.rank},
          {"target", cert.target},
          {"depth", cert.depth},
          {"bracket_span", cert.bracket_span},
          {"singular_values", cert.singular_values},
          {"brackets", brackets},
          {"verdict", cert.controllable ? "controllable (first-order certificate)" : "not controllable"}};
}

json comparison_json(const SwimmerSignature& sig) {
  const ReferenceFixture fixture = load_reference_fixture();
  const Matrix6d& M = sig.resistance().M;
  const FixtureComparison cmp = compare_with_fixture(sig.resistance().dN, fixture);
  const double six_pi = 6.0 * std::numbers::pi;

  json entries = json::array();
  for (const auto& e : cmp.entries) {
    if (e.expression.empty() && std::abs(e.computed) <= 1e-6) continue;
    entries.push_back({{"mode", e.mode},
                       {"row", e.row},
                       {"col", e.col},
                       {"published_expression", e.expression},
                       {"published", e.published},
                       {"computed", e.computed},
                       {"delta_abs", std::abs(std::abs(e.computed) - std::abs(e.published))},
                       {"magnitude_match", e.magnitude_match},
                       {"sign_match", e.sign_match}});
  }

  // Certificate from the published matrices alone.
  const SwimmerSignature published(sig.modes(), sig.box(), fixture_resistance_set(fixture), sig.quadrature());
  const RankCertificate fixture_cert = rank_certificate(published, Eigen::VectorXd::Zero(sig.size()));

  const double lin_err = block_error(M, 1, fixture.linear_diagonal);
  return {
      {"angular_block",
       {{"published_expression", fixture.angular_expression},
        {"published", fixture.angular_diagonal},
        {"computed", M(0, 0)},
        {"max_deviation", block_error(M, 0, fixture.angular_diagonal)},
        {"match", block_error(M, 0, fixture.angular_diagonal) < kBlockTolerance}}},
      {"linear_block",
       {{"published_expression", fixture.linear_expression},
        {"published", fixture.linear_diagonal},
        {"computed", M(3, 3)},
        {"classical_drag", six_pi},
        {"max_deviation_from_published", lin_err},
        {"max_deviation_from_classical_drag", block_error(M, 1, six_pi)},
        {"matches_published", lin_err < kBlockTolerance},
        {"matches_classical_drag", block_error(M, 1, six_pi) < kBlockTolerance},
        {"flag", lin_err < kBlockTolerance ? ""
                                           : "published linear block 4*pi*Id disagrees with the classical drag 6*pi*Id"}}},
      {"coupling_derivatives",
       {{"entries", entries},
        {"max_magnitude_error", cmp.max_magnitude_error},
        {"magnitude_mismatches", cmp.magnitude_mismatches},
        {"sign_mismatches", cmp.sign_mismatches}}},
      {"published_matrices_certificate", certificate_json(fixture_cert)},
  };
}

RigidState identity_state() { return RigidState{}; }

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.quadrature_degree) {
    if (*o.quadrature_degree < 4 || *o.quadrature_degree > 80)
      throw ConfigError("--quadrature-degree must lie in [4, 80]");
    config.quadrature_degree = *o.quadrature_degree;
  }
  if (o.step) {
    if (!(*o.step > 0.0) || !std::isfinite(*o.step)) throw ConfigError("--step must be positive");
    config.step = *o.step;
  }
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

int cmd_certify(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const SwimmerSignature sig = build_signature(config);
  const RankCertificate cert = rank_certificate(sig, Eigen::VectorXd::Zero(sig.size()));

  json report;
  report["name"] = config.name;
  report["quadrature_degree"] = config.quadrature_degree;
  report["viscosity"] = config.viscosity;
  report["M"] = matrix_json(sig.resistance().M);
  report["N"] = matrix_json(sig.resistance().N);
  json dN = json::array();
  for (const auto& d : sig.resistance().dN) dN.push_back(matrix_json(d));
  report["dN"] = dN;
  report["gram_condition"] = sig.gram_condition();
  report["constraint_residual"] = sig.constraint_residual();
  report["certificate"] = certificate_json(cert);
  const bool reference = same_modes(sig.modes(), reference_modes()) && config.viscosity == 1.0;
  report["reference_comparison"] = reference ? comparison_json(sig) : json{{"applicable", false}};
  if (reference) report["reference_comparison"]["applicable"] = true;

  write_file_atomic(out_dir / "certificate.json", report.dump(2) + "\n");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "rank " << cert.rank << " of " << cert.target << " (depth " << cert.depth << "): "
      << report["certificate"]["verdict"].get<std::string>() << "\n";
  log << format("M angular diagonal %.12f, linear diagonal %.12f\n", sig.resistance().M(0, 0), sig.resistance().M(3, 3));
  if (reference) {
    const json& cmp = report["reference_comparison"];
    if (!cmp["linear_block"]["matches_published"].get<bool>())
      log << "flag: " << cmp["linear_block"]["flag"].get<std::string>() << "\n";
    log << "coupling derivatives: " << cmp["coupling_derivatives"]["magnitude_mismatches"].get<int>()
        << " magnitude mismatches, " << cmp["coupling_derivatives"]["sign_mismatches"].get<int>()
        << " sign mismatches against the published values\n";
  }
  log << format("runtime %.2f s\n", secs);
  return cert.controllable ? kExitSuccess : kExitNegative;
}

int cmd_simulate(const RunConfig& config, const std::string& control_file, const fs::path& out_dir, std::ostream& log) {
  const std::string file = !control_file.empty() ? control_file : (config.simulate ? config.simulate->control_file : "");
  if (file.empty()) throw ConfigError("simulate needs a control file (--control or simulate.control_file)");
  const double horizon = config.simulate ? config.simulate->horizon : 1.0;
  const SwimmerSignature sig = build_signature(config);
  const ControlLaw law = load_control_law(control_file.empty() ? config.resolve(file) : fs::path(file), sig.size());
  const IntegrationResult res =
      integrate(sig, law, identity_state(), Eigen::VectorXd::Zero(sig.size()), horizon, config.step);

  std::ostringstream csv;
  write_trajectory_csv(csv, res.trajectory);
  write_file_atomic(out_dir / "trajectory.csv", csv.str());
  const RigidState& end = res.trajectory.final_state();
  const Eigen::Vector3d rot = so3::log(end.R);
  log << format("energy dissipated %.12e\n", dissipated_energy(sig, res.trajectory));
  log << format("final rotation vector (%.6e, ", rot(0)) << format("%.6e, %.6e)\n", rot(1), rot(2));
  log << format("final position (%.6e, ", end.r(0)) << format("%.6e, %.6e)\n", end.r(1), end.r(2));
  if (res.status != IntegrationStatus::Completed) {
    log << "status: truncated: " << res.message << "\n";
    return kExitNegative;
  }
  log << "status: completed\n";
  return kExitSuccess;
}

int cmd_track(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  if (!config.track) throw ConfigError("track needs a track block");
  const TrackBlock& tb = *config.track;
  const SwimmerSignature sig = build_signature(config);

  TrackingProblem problem;
  problem.epsilon = tb.epsilon;
  problem.horizon = tb.horizon;
  problem.budget_per_interval = tb.budget_per_interval;
  problem.initial_intervals = tb.initial_intervals;
  problem.max_refinements = tb.max_refinements;
  const double T = tb.horizon;
  if (tb.reference == "line") {
    const Eigen::Vector3d d = Eigen::Vector3d(tb.direction[0], tb.direction[1], tb.direction[2]).normalized();
    const double dist = tb.distance;
    problem.reference = [d, dist, T](double t) {
      RigidState g;
      g.r = (dist * t / T) * d;
      return g;
    };
  } else if (tb.reference == "rotation") {
    const Eigen::Vector3d a = Eigen::Vector3d(tb.axis[0], tb.axis[1], tb.axis[2]).normalized();
    const double angle = tb.angle;
    problem.reference = [a, angle, T](double t) {
      RigidState g;
      g.R = so3::exp(Eigen::Vector3d((angle * t / T) * a));
      return g;
    };
  } else {
    problem.reference = load_reference_samples(config.resolve(tb.samples_file));
  }

  SteerOptions options;
  std::optional<TrackingResult> tracked;
  try {
    tracked.emplace(track(sig, problem, options));
  } catch (const SteeringError& e) {
    log << "tracking failed: " << e.what() << format(" (last sup-deviation %.6e)\n", e.residual());
    return kExitNegative;
  }
  const TrackingResult& res = *tracked;

  json plan;
  plan["epsilon"] = tb.epsilon;
  plan["horizon"] = T;
  plan["intervals"] = res.intervals;
  plan["knots"] = res.knots;
  plan["strokes_per_interval"] = res.strokes_per_interval;
  json targets = json::array();
  for (const auto& t : res.targets) targets.push_back(vector_json(t));
  plan["interval_targets"] = targets;
  json strokes = json::array();
  for (const auto& p : res.plan)
    strokes.push_back({{"interval", p.interval}, {"start", p.start}, {"period", p.stroke.period},
                       {"coeffs", matrix_json(p.stroke.coeffs)}});
  plan["strokes"] = strokes;
  plan["waypoint_residuals"] = res.waypoint_residuals;
  plan["max_waypoint_residual"] = res.max_waypoint_residual;
  plan["sup_deviation"] = res.sup_deviation;

  std::ostringstream csv;
  write_trajectory_csv(csv, res.trajectory);
  write_file_atomic(out_dir / "plan.json", plan.dump(2) + "\n");
  write_file_atomic(out_dir / "trajectory.csv", csv.str());
  log << "intervals " << res.intervals << ", strokes " << res.plan.size() << "\n";
  log << format("sup-deviation %.6e < epsilon %.3g\n", res.sup_deviation, tb.epsilon);
  log << format("max waypoint residual %.3e\n", res.max_waypoint_residual);
  return kExitSuccess;
}

int cmd_optimize(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  if (!config.optimize) throw ConfigError("optimize needs an optimize block");
  const OptimizeBlock& ob = *config.optimize;
  const SwimmerSignature sig = build_signature(config);
  Vector6d target;
  for (int i = 0; i < 6; ++i) target(i) = ob.target[static_cast<std::size_t>(i)];
  const Eigen::VectorXd K =
      Eigen::Map<const Eigen::VectorXd>(ob.amplitude_box.data(), static_cast<Eigen::Index>(ob.amplitude_box.size()));
  OptimizeOptions options;
  options.starts = ob.starts;
  options.seed = config.seed;
  options.steer.period = ob.period;
  const StrokeCost cost = ob.cost == "effort" ? StrokeCost::Effort : StrokeCost::Dissipation;

  OptimizeResult res;
  try {
    res = optimize_stroke(sig, cost, target, K, options);
  } catch (const SteeringError& e) {
    log << "optimization failed: " << e.what() << format(" (residual %.3e)\n", e.residual());
    return kExitNegative;
  }
  json out;
  out["cost_functional"] = ob.cost;
  out["cost"] = res.cost;
  out["residual"] = res.residual;
  out["certified_local_minimum"] = res.certified;
  out["seed"] = config.seed;
  out["target"] = vector_json(target);
  out["period"] = res.stroke.period;
  out["coeffs"] = matrix_json(res.stroke.coeffs);
  out["amplitude"] = vector_json(res.stroke.amplitude());
  json starts = json::array();
  for (double c : res.start_costs) starts.push_back(std::isfinite(c) ? json(c) : json(nullptr));
  out["start_costs"] = starts;
  write_file_atomic(out_dir / "stroke.json", out.dump(2) + "\n");
  log << format("cost %.10e, feasibility residual %.3e\n", res.cost, res.residual);
  log << (res.certified ? "certified: no improving feasible coordinate step\n"
                        : "not certified: an improving coordinate step remained\n");
  return res.residual < options.feasibility ? kExitSuccess : kExitNegative;
}

int cmd_project(const RunConfig& config, const std::string& path_file, const fs::path& out_dir, std::ostream& log) {
  const std::string file = !path_file.empty() ? path_file : (config.project ? config.project->path_file : "");
  if (file.empty()) throw ConfigError("project needs a path file (--path or project.path_file)");
  const auto quad = build_quadrature(config.quadrature_degree);
  const BoundaryPath path = load_boundary_path(path_file.empty() ? config.resolve(file) : fs::path(file), quad);
  const auto [lin0, ang0] = constraint_residuals(path);
  const AllowableProjection proj = project_allowable(path);

  json out;
  out["input_residuals"] = {{"translation", lin0}, {"rotation", ang0}};
  out["output_residuals"] = {{"translation", proj.translation_residual}, {"rotation", proj.rotation_residual}};
  json frames = json::array();
  for (std::size_t i = 0; i < path.times.size(); ++i)
    frames.push_back({{"t", path.times[i]},
                      {"rotation_vector", vector_json(so3::log(proj.Q[i]))},
                      {"sbar", vector_json(proj.sbar[i])}});
  out["frames"] = frames;
  std::ostringstream csv;
  write_boundary_path_csv(csv, proj.corrected);
  write_file_atomic(out_dir / "corrected_path.csv", csv.str());
  write_file_atomic(out_dir / "projection.json", out.dump(2) + "\n");
  log << format("input residuals: translation %.3e, rotation %.3e\n", lin0, ang0);
  log << format("output residuals: translation %.3e, rotation %.3e\n", proj.translation_residual,
                proj.rotation_residual);
  if (proj.translation_residual > kProjectionTolerance || proj.rotation_residual > kProjectionTolerance) {
    log << "projection residuals exceed the tolerance\n";
    return kExitNumerical;
  }
  return kExitSuccess;
}

int run_guarded(const std::function<int()>& workflow, std::ostream& err) {
  try {
    return workflow();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SignatureError& e) {
    err << "invalid signature: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoCertificateError& e) {
    err << "no certificate: " << e.what() << " (best rank " << e.best_rank() << ")\n";
    return kExitNegative;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace swimlab
