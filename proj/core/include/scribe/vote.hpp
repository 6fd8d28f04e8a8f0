#pragma once

#include "scribe/dataset.hpp"
#include "scribe/geometry.hpp"
#include "scribe/harness.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

enum class Verdict { Author1, Author2, Tie };
enum class FinalVerdict { Author1, Author2, Inconclusive };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(FinalVerdict v) noexcept;
Verdict verdict_from_string(std::string_view text);
FinalVerdict final_verdict_from_string(std::string_view text);

/// Simple majority of two counts; equal counts are a Tie.
Verdict majority(std::size_t author1, std::size_t author2) noexcept;

struct TileScore {
  std::string sample_id;
  int cls = 0;
  Author author = Author::Author1;
  double score = 0.0;
  std::vector<double> probabilities;
};

/// Top class per external tile and its author under `scheme`. Exactly one
/// record per tile is required; records are matched by sample id and the
/// output follows tile order.
std::vector<TileScore> score_external(const ExternalTileSet& tiles, std::span<const PredictionRecord> predictions,
                                      const ClassScheme& scheme);

/// Tiles x classes table of softmax scores.
std::string score_heatmap_csv(std::span<const TileScore> scores, int n_classes);

struct RunVerdict {
  std::string model_id;
  std::string dataset_type;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Completed;
  std::size_t author1 = 0;
  std::size_t author2 = 0;
  Verdict verdict = Verdict::Tie;

  std::string run_id() const;
};

RunVerdict run_verdict(const RunManifest& run, std::span<const Author> tile_authors);
RunVerdict run_verdict(const RunManifest& run, std::span<const TileScore> scores);

enum class TallyMode { PerRun, PerTile };

std::string_view to_string(TallyMode m) noexcept;
TallyMode tally_mode_from_string(std::string_view text);

struct ModelTally {
  std::string model_id;
  std::size_t author1 = 0;
  std::size_t author2 = 0;
  std::size_t ties = 0;
  Verdict winner = Verdict::Tie;
};

struct VoteTally {
  TallyMode mode = TallyMode::PerRun;
  std::vector<ModelTally> models; ///< sorted by model_id
  std::size_t models_for_author1 = 0;
  std::size_t models_for_author2 = 0;
  FinalVerdict final_verdict = FinalVerdict::Inconclusive;

  const ModelTally& model(std::string_view model_id) const;
};

/// Two-step vote. Step 1 tallies run verdicts per model (ties abstain) or,
/// in per-tile mode, pools every tile's author; step 2 takes the majority of
/// the decisive step-1 winners. Excluded or failed runs are rejected.
VoteTally majority_vote(std::span<const RunVerdict> verdicts, TallyMode mode = TallyMode::PerRun);

struct VerdictFile {
  std::string set_id;
  std::vector<RunVerdict> runs;
  VoteTally tally;
};

std::string verdict_file_to_json(const VerdictFile& file);
/// Reads runs only; the tally is recomputed so it cannot drift from them.
VerdictFile verdict_file_from_json(std::string_view text, TallyMode mode = TallyMode::PerRun);

} // namespace scribe
