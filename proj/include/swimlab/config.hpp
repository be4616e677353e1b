#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swimlab/mobility.hpp"
#include "swimlab/planner.hpp"
#include "swimlab/signature.hpp"

namespace swimlab {

struct ModeSpec {
  int degree = 0;
  int order = 0;
  HarmonicPart part = HarmonicPart::Real;
  double amplitude = 1.0;

  bool operator==(const ModeSpec&) const = default;
};

struct SimulateBlock {
  std::string control_file;  // relative to the config file
  double horizon = 1.0;

  bool operator==(const SimulateBlock&) const = default;
};

/// Reference path for tracking: "line" (direction, distance), "rotation"
/// (axis, angle) or "samples" (file of timed poses).
struct TrackBlock {
  std::string reference = "line";
  std::array<double, 3> direction{1.0, 0.0, 0.0};
  double distance = 0.05;
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double angle = 0.1;
  std::string samples_file;
  double epsilon = 0.02;
  double horizon = 1.0;
  int budget_per_interval = 400;
  int initial_intervals = 4;
  int max_refinements = 6;

  bool operator==(const TrackBlock&) const = default;
};

struct OptimizeBlock {
  std::string cost = "effort";              // "effort" or "dissipation"
  std::array<double, 6> target{};           // rotation vector, translation
  std::vector<double> amplitude_box;        // K per mode
  double period = 1.0;
  int starts = 8;

  bool operator==(const OptimizeBlock&) const = default;
};

struct ProjectBlock {
  std::string path_file;

  bool operator==(const ProjectBlock&) const = default;
};

struct RunConfig {
  std::string name;
  std::vector<ModeSpec> modes;
  int quadrature_degree = 24;
  std::vector<double> box_lower;
  std::vector<double> box_upper;
  double step = 1e-3;
  double viscosity = 1.0;
  std::uint64_t seed = 1;
  std::optional<SimulateBlock> simulate;
  std::optional<TrackBlock> track;
  std::optional<OptimizeBlock> optimize;
  std::optional<ProjectBlock> project;

  /// Directory used to resolve relative file names (not serialized).
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& o) const;

  std::vector<DeformationMode> deformation_modes() const;
  ShapeBox shape_box() const;
  std::filesystem::path resolve(const std::string& file) const;
};

/// Throws ConfigError on malformed JSON, unknown fields or values outside
/// the module preconditions.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

/// Piecewise control law from a control file: {"pieces": [{"t0", "t1",
/// "rates": [...]} or {"t0", "stroke": {"period", "coeffs": [[...]]}}]}.
ControlLaw load_control_law(const std::filesystem::path& path, Eigen::Index modes);

/// Timed poses {"samples": [{"t", "rotation_vector", "position"}]},
/// interpolated along geodesics between samples.
std::function<RigidState(double)> load_reference_samples(const std::filesystem::path& path);

/// Boundary path from a JSON generator ({"kind": "translation" | "rotation" |
/// "mode", ...}) or a CSV of t,node,x,y,z rows on the quadrature grid.
BoundaryPath load_boundary_path(const std::filesystem::path& path, std::shared_ptr<const SphereQuadrature> quadrature);

void write_boundary_path_csv(std::ostream& out, const BoundaryPath& path);

}  // namespace swimlab
