#pragma once

#include <spdiag/comparators.hpp>
#include <spdiag/dataset.hpp>
#include <spdiag/importance.hpp>
#include <spdiag/models.hpp>
#include <spdiag/spatial_loo.hpp>
#include <spdiag/synth.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spdiag::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kPartialFailure = 4,
};

struct ImportanceConfig {
  std::vector<std::string> features;
  std::vector<GroupDefinition> groups;
  /// Leading PCs reported per group.
  int components = 2;
};

struct PlotOptions {
  bool enabled = true;
  /// Square-root transformed distance axis.
  bool sqrt_axis = true;
};

struct ExperimentConfig {
  std::filesystem::path source;
  /// Raw config text; hashed into the manifest.
  std::string text;

  std::filesystem::path dataset_path;
  CsvSchema schema;
  std::optional<FieldSynthConfig> synthetic;

  std::optional<std::filesystem::path> grid_path;
  std::string grid_x = "x";
  std::string grid_y = "y";

  std::uint64_t seed = 1;
  std::vector<ModelSpec> models;
  DiagnosticsConfig diagnostics;
  ImportanceConfig importance;
  std::vector<CvScheme> cv;
  HistogramSpec histogram;
  PlotOptions plots;
  std::filesystem::path output_dir = "spdiag_out";
};

/// YAML-style key-value text, or JSON when the text starts with '{'.
/// Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  /// Spatial-LOO iterations and repeated-CV repetitions.
  std::optional<int> reps;
  std::optional<std::filesystem::path> out;
  bool no_plots = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

Dataset load_dataset(const ExperimentConfig& cfg);

/// Checks model kinds, feature names, importance channels and CV schemes
/// against the dataset before anything is fitted. Throws ConfigError or
/// SchemaError.
void validate_experiment(const ExperimentConfig& cfg, const Dataset& ds);

/// FNV-1a 64-bit, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const DistanceSummary& s);
nlohmann::json to_json(const Profile& p);
nlohmann::json to_json(const CvResult& r);
nlohmann::json to_json(const Svip& s);

std::string profile_csv(const Profile& p);
/// One row per iteration and permutation state; the clean prediction has
/// channel "none" and replicate 0.
std::string records_csv(const LooRun& run);
std::string svip_csv(const Svip& s);
std::string distances_csv(std::span<const double> d);
std::string histogram_csv(const DistanceSummary& s);

/// Writes text to dir/name, creating dir. Throws ConfigError on failure.
void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Commands

/// Runs spep, svip, compare or disthist and returns the exit code.
/// Progress and per-model status go to `log`.
int run_command(const std::string& command, const ExperimentConfig& cfg,
                const Overrides& overrides, std::ostream& log);

/// Full entry point: argument parsing, config loading, error mapping.
int main(int argc, char** argv);

}  // namespace spdiag::cli
