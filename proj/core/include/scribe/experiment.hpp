#pragma once

#include "scribe/backend.hpp"
#include "scribe/dataset_io.hpp"
#include "scribe/similarity.hpp"
#include "scribe/vote.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scribe {

/// Runs that may enter matrices and votes: completed ones, plus excluded
/// ones under the include policy.
bool run_is_eligible(const RunManifest& run, ExclusionPolicy policy) noexcept;

struct ModelAnalysis {
  std::string model_id;
  int n_classes = 0;
  ConfusionMatrix summed{1};
  SimilarityReport report;
  std::filesystem::path matrix_json;
  std::filesystem::path matrix_csv;
  std::filesystem::path report_json;
};

/// Sums per-run confusion matrices by (model, class count) and writes
/// `<model>_<n>class/` folders with the summed matrix and similarity report.
std::vector<ModelAnalysis> analyze_runs(std::span<const RunOutputs> runs, const RelationThresholds& thresholds,
                                        ExclusionPolicy policy, const std::filesystem::path& out_dir);

struct AttributionResult {
  std::string set_id;
  std::string scope; ///< "all" or a scheme id
  VerdictFile verdicts;
  std::filesystem::path verdict_path;
  std::vector<std::filesystem::path> heatmaps; ///< per-run score tables (CSV)
};

/// Scores one external region set with every eligible run that predicted it
/// (restricted to `scheme_id` when given) and performs the two-step vote.
/// `cuts` holds the set cut at one or more tile sizes; each run is matched
/// to the cut its predictions refer to. Writes `verdicts.json` and
/// `scores/<run>.csv` under `out_dir`.
AttributionResult attribute_runs(std::span<const LoadedExternalSet> cuts, std::span<const RunOutputs> runs,
                                 const std::optional<std::string>& scheme_id, TallyMode mode,
                                 ExclusionPolicy policy, const std::filesystem::path& out_dir);

struct BackendEntry {
  std::string model_id;
  BackendSpec backend;
};

struct ExperimentConfig {
  std::filesystem::path annotation_file;
  std::vector<std::string> dataset_types{"v01", "v02", "v03", "v04", "v001", "v002", "v003", "v004"};
  std::vector<std::uint64_t> seeds{1033, 1931, 2201, 4179, 9325};
  std::vector<BackendEntry> backends;
  AugmentationParams augmentation;
  double split_ratio = 0.8;
  RelationThresholds thresholds;
  ConvergenceThresholds convergence;
  ExclusionPolicy exclusion_policy = ExclusionPolicy::Exclude;
  TallyMode tally_mode = TallyMode::PerRun;
  /// Empty means every external set declared in the annotation file.
  std::vector<std::string> external_sets;
  int external_stride = 20;
  int parallelism = 1;
  std::filesystem::path output_root = "experiment";

  void validate() const;
};

/// Relative paths in the JSON resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct DatasetRecord {
  std::string dataset_type;
  std::uint64_t seed = 0;
  std::string scheme_id;
  std::string dir; ///< relative to the output root
  int tile_size = 0;
  std::size_t train_tiles = 0;
  std::size_t test_tiles = 0;
  std::string manifest_digest;
  std::string error;
};

struct RunRecord {
  std::string model_id;
  std::string dataset_type;
  std::uint64_t seed = 0;
  std::string scheme_id;
  RunStatus status = RunStatus::Pending;
  std::string reason;
  std::optional<double> accuracy;
  std::string dir;
  std::string predictions_digest;
  std::string matrix_json; ///< relative path; empty unless completed or excluded

  std::string run_id() const;
};

struct AnalysisRecord {
  std::string model_id;
  int n_classes = 0;
  std::string matrix_json;
  std::string matrix_csv;
  std::string report_json;
  std::string digest;
};

struct AttributionRecord {
  std::string set_id;
  std::string scope;
  std::string verdict_json;
  std::string final_verdict;
  std::vector<std::string> score_tables;
  std::string digest;
};

/// Append-only record of one experiment; every path is relative to `root`.
struct ExperimentLedger {
  std::filesystem::path root;
  std::string config_json;
  std::vector<DatasetRecord> datasets;
  std::vector<RunRecord> runs;
  std::vector<AnalysisRecord> analyses;
  std::vector<AttributionRecord> attributions;

  std::size_t count(RunStatus status) const noexcept;
  /// SHA-256 over every digest in the ledger.
  std::string summary_digest() const;
};

std::string ledger_to_json(const ExperimentLedger& ledger);
ExperimentLedger ledger_from_json(std::string_view text, const std::filesystem::path& root);
ExperimentLedger read_ledger(const std::filesystem::path& root);

/// Builds datasets, executes every (backend x dataset type x seed) run,
/// applies the exclusion policy, analyses and attributes, and writes
/// `ledger.json` under the output root. Per-run failures are recorded and do
/// not stop the experiment.
ExperimentLedger run_experiment(const ExperimentConfig& config);

/// 0 all runs completed or excluded, 2 some failed, 3 all failed.
int experiment_exit_code(const ExperimentLedger& ledger) noexcept;

/// Writes `report/` under the ledger root: markdown summary, CSV tables,
/// confusion heatmaps per (model, scheme), learning curves and score
/// heatmaps. Returns the generated file paths.
std::vector<std::filesystem::path> render_report(const ExperimentLedger& ledger);

} // namespace scribe
