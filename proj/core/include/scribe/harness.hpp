#pragma once

#include "scribe/dataset.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

struct TrainingConfig {
  int epochs = 50;
  std::string optimizer_name = "Adam";
  double learning_rate = 1e-4;
  int batch_size = 16;
  int train_seed = 1;
  int input_resize = 224;

  /// Fine-tuning preset for the CNN backends; inceptionv3 takes 299 px input.
  static TrainingConfig preset_for(std::string_view model_id);
  void validate() const;
  bool operator==(const TrainingConfig&) const = default;
};

enum class RunStatus { Pending, Completed, Excluded, Failed };

std::string_view to_string(RunStatus s) noexcept;
RunStatus run_status_from_string(std::string_view text);

inline constexpr std::string_view kBaselineModel = "baseline-centroid";

struct RunManifest {
  std::string model_id;
  std::string dataset_type;
  std::uint64_t seed = 0;
  TrainingConfig training_config;
  RunStatus status = RunStatus::Pending;
  std::optional<std::string> exclusion_reason;
  /// Scheme of the dataset the run trained on; filled in when the run completes.
  std::string scheme_id;

  /// "model/dataset_type/seed"
  std::string run_id() const;
  void validate() const;
  bool operator==(const RunManifest&) const = default;
};

std::string run_manifest_to_json(const RunManifest& m);
RunManifest run_manifest_from_json(std::string_view text);
void write_run_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_run_manifest(const std::filesystem::path& path);

struct PredictionRecord {
  std::string sample_id;
  std::optional<int> true_class;
  std::vector<double> raw_scores;
  int predicted_class = 0;
  bool operator==(const PredictionRecord&) const = default;
};

std::string predictions_to_jsonl(std::span<const PredictionRecord> records);
/// Parses JSON Lines and checks score length, finiteness, class range and
/// argmax consistency of every row. A non-positive `n_classes` takes the
/// score length of the first row.
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl, int n_classes);
void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path, int n_classes);

struct LossCurve {
  std::vector<double> losses;
  bool operator==(const LossCurve&) const = default;
};

std::string loss_curve_to_json(const LossCurve& curve);
LossCurve loss_curve_from_json(std::string_view text);

/// Max-subtracted softmax. Throws ValidationError on empty or non-finite input.
std::vector<double> softmax(std::span<const double> raw_scores);

/// 1-indexed argmax, lowest index wins ties.
int argmax_class(std::span<const double> raw_scores);

struct TopClass {
  int cls = 0;
  double score = 0.0;
};

TopClass top_class(std::span<const double> raw_scores);

/// Nearest class centroid over 16x16 box-averaged tiles scaled to [0, 1].
class CentroidClassifier {
public:
  static constexpr int kGrid = 16;
  static constexpr std::size_t kFeatures = kGrid * kGrid;
  using Features = std::array<double, kFeatures>;

  static Features features(const GrayImage& tile);

  /// Throws ValidationError when some class has no training tile.
  void fit(std::span<const TileSample> train, int n_classes);

  /// Negated Euclidean distance to each class centroid.
  std::vector<double> raw_scores(const GrayImage& tile) const;

  int n_classes() const noexcept { return static_cast<int>(centroids_.size()); }

private:
  std::vector<Features> centroids_;
};

struct BaselineResult {
  std::vector<PredictionRecord> predictions;
  LossCurve curve;
  CentroidClassifier model;
};

/// Fits on the train partition, predicts every test tile. The loss curve
/// has a single entry: mean cross-entropy of the fitted model on train.
BaselineResult run_baseline(const TileDataset& dataset, const RunManifest& manifest);

std::vector<PredictionRecord> predict_tiles(const CentroidClassifier& model,
                                            std::span<const TileSample> tiles);

/// Checks that predictions cover exactly the given tiles, once each, with
/// matching labels. Throws BackendError otherwise.
void validate_coverage(std::span<const PredictionRecord> records, std::span<const TileSample> tiles,
                       int n_classes);

enum class Convergence { Converged, NotConverged };

std::string_view to_string(Convergence c) noexcept;

struct ConvergenceThresholds {
  double absolute = 0.05;
  double relative = 0.05;
  std::size_t window = 5;
  std::size_t min_epochs = 10;
};

/// Converged iff mean(last window) <= max(absolute, relative * mean(first window)).
Convergence assess_convergence(const LossCurve& curve, const ConvergenceThresholds& thresholds = {});

enum class ExclusionPolicy { Exclude, Include };

std::string_view to_string(ExclusionPolicy p) noexcept;
ExclusionPolicy exclusion_policy_from_string(std::string_view text);

} // namespace scribe
