#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/singular.hpp"

namespace pitaron::lab {

/// Malformed JSON, unknown keys, missing or ill-typed parameters. Maps to
/// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct TrajectoryParams {
  explicit TrajectoryParams(HamiltonianSpec h) : hamiltonian(std::move(h)) {}

  HamiltonianSpec hamiltonian;
  double t0 = 0.0;
  double t1 = 1.0;
  int grid_points = 101;
  int steps_per_cell = 20;
  std::optional<Vector> psi0;
};

struct EvolveParams {
  TrajectoryParams run;
};

struct NhseParams {
  int sites = 2;
  double onsite = 0.0;
  std::vector<double> hop;
  std::vector<double> gamma;
  TrajectoryParams run;
};

struct CombParams {
  std::vector<double> strengths;
  std::vector<double> times;
  TrajectoryParams run;
};

struct DysonParams {
  explicit DysonParams(HamiltonianSpec h) : hamiltonian(std::move(h)) {}

  HamiltonianSpec hamiltonian;
  double t0 = 0.0;
  std::vector<double> durations;
  std::vector<int> orders;
  int panels = 200;
  int exact_steps = 2000;
};

struct PicardExpParams {
  double g = 1.0;
  double x1 = 1.0;
  int n_max = 12;
  int grid = 100000;
};

struct PicardDeltaParams {
  double a = 1.0;
  double x1 = 2.0;
  int n_max = 4;
  int grid = 4000;
  std::vector<double> eps_list;
  std::vector<std::pair<double, double>> eps_pairs;
};

struct DominatedParams {
  std::vector<int> n_list;
};

struct SmearingParams {
  SmearingKind kernel = SmearingKind::kGaussian;
  double t1 = 1.0;
  double t = 2.0;
  int panels = 2000;
  std::vector<std::pair<double, double>> pairs;
};

using ExperimentParams = std::variant<EvolveParams, NhseParams, CombParams, DysonParams,
                                      PicardExpParams, PicardDeltaParams, DominatedParams,
                                      SmearingParams>;

struct ExperimentConfig {
  std::string kind;  ///< evolve | nhse | comb | dyson | picard | counterexample
  ExperimentParams params;
  nlohmann::json params_echo;
  std::string output_path;
  std::uint64_t seed = 42;
};

struct ExperimentResult {
  std::string csv;
  nlohmann::ordered_json summary;
};

/// Validates a parsed document against the strict schema.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Runs the experiment in memory. Throws ConfigError for parameter problems
/// only detectable while running and pitaron::NumericalError for numerical
/// failures. The CSV is a pure function of the config.
ExperimentResult execute(const ExperimentConfig& config);

/// Load, execute and write <out_dir>/<output_path>.csv and
/// <out_dir>/<output_path>.summary.json. Nothing is written on failure.
/// Diagnostics go to `err`.
int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        std::ostream& err);

int run_config(const ExperimentConfig& config, const std::filesystem::path& out_dir,
               std::ostream& err);

/// Runs several configs with at most `jobs` in flight; returns the largest
/// exit code.
int run_many(const std::vector<std::filesystem::path>& config_paths,
             const std::filesystem::path& out_dir, int jobs, std::ostream& err);

std::vector<std::string> demo_names();
/// Built-in config document for a demo; throws ConfigError for unknown names.
nlohmann::json demo_config(std::string_view name);

}  // namespace pitaron::lab
