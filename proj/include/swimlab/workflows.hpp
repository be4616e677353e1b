#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "swimlab/config.hpp"

namespace swimlab {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitNegative = 1,   // valid run, negative verdict (not controllable, left the box, ...)
  kExitConfig = 2,
  kExitNumerical = 3,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> quadrature_degree;
  std::optional<double> step;
};

/// Applies command-line overrides and re-validates the result.
void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

int cmd_certify(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_simulate(const RunConfig& config, const std::string& control_file, const std::filesystem::path& out_dir,
                 std::ostream& log);
int cmd_track(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_optimize(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_project(const RunConfig& config, const std::string& path_file, const std::filesystem::path& out_dir,
                std::ostream& log);

/// Runs a workflow and maps escaping exceptions onto exit codes, printing
/// the message to `err`.
int run_guarded(const std::function<int()>& workflow, std::ostream& err);

}  // namespace swimlab
