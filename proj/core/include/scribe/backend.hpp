#pragma once

#include "scribe/harness.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace scribe {

/// Files inside a run output directory.
namespace run_files {
inline constexpr const char* kManifest = "run_manifest.json";
inline constexpr const char* kPredictions = "predictions.jsonl";
inline constexpr const char* kLossCurve = "loss_curve.json";
inline constexpr const char* kJob = "job.json";
inline constexpr const char* kLog = "backend.log";
inline constexpr const char* kExternalDir = "external";
} // namespace run_files

/// Handed to external backends as `<exe> train --job <job.json>`.
struct BackendJob {
  std::filesystem::path dataset_dir;
  std::filesystem::path run_manifest;
  std::filesystem::path output_dir;
  /// set_id -> external tile set directory; the backend writes
  /// `external/<set_id>.jsonl` for each.
  std::map<std::string, std::filesystem::path> external_sets;
};

std::string backend_job_to_json(const BackendJob& job);
BackendJob backend_job_from_json(std::string_view text);

/// `baseline` or `exec:<path>`.
struct BackendSpec {
  enum class Kind { Baseline, Exec } kind = Kind::Baseline;
  std::filesystem::path executable;

  static BackendSpec parse(std::string_view text);
  std::string to_string() const;
};

struct RunOutputs {
  RunManifest manifest;
  std::vector<PredictionRecord> predictions;
  LossCurve curve;
  std::map<std::string, std::vector<PredictionRecord>> external;
};

struct RunRequest {
  std::filesystem::path dataset_dir;
  std::filesystem::path run_manifest;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> external_sets;
  ExclusionPolicy policy = ExclusionPolicy::Exclude;
  ConvergenceThresholds convergence;
};

/// Launches the backend, waits, validates the returned files against the
/// dataset and marks the run completed (or excluded when the loss curve is
/// long enough to judge and does not converge). On any failure the manifest
/// is written with status `failed` and BackendError is thrown.
RunOutputs invoke_external_backend(const std::filesystem::path& executable, const RunRequest& request);

/// Same contract as invoke_external_backend, backed by the built-in
/// centroid classifier in-process.
RunOutputs invoke_baseline_backend(const RunRequest& request);

RunOutputs execute_run(const BackendSpec& backend, const RunRequest& request);

/// Reads a finished run directory; prediction files are validated for
/// internal consistency only.
RunOutputs read_run_outputs(const std::filesystem::path& run_dir);

} // namespace scribe
