#pragma once

#include "scribe/harness.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace scribe {

/// n x n count matrix, row = true class, column = predicted class, both
/// 1-indexed.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(int n);
  ConfusionMatrix(int n, std::vector<std::int64_t> row_major, std::vector<std::string> provenance = {});

  int n() const noexcept { return n_; }
  std::int64_t at(int true_cls, int predicted_cls) const { return counts_[index(true_cls, predicted_cls)]; }
  std::int64_t& at(int true_cls, int predicted_cls) { return counts_[index(true_cls, predicted_cls)]; }

  std::int64_t total() const noexcept;
  std::int64_t row_sum(int true_cls) const;
  std::int64_t diagonal_mass() const noexcept;
  std::int64_t off_diagonal_mass() const noexcept { return total() - diagonal_mass(); }
  /// Mass outside the 2x2 blocks {i, i+1} for odd i; n must be even.
  std::int64_t off_block_mass() const;
  double accuracy() const;

  const std::vector<std::string>& provenance() const noexcept { return provenance_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  ConfusionMatrix scaled(std::int64_t factor) const;

  bool operator==(const ConfusionMatrix&) const = default;

private:
  friend ConfusionMatrix sum_matrices(std::span<const ConfusionMatrix> matrices);
  std::size_t index(int i, int j) const;

  int n_ = 0;
  std::vector<std::int64_t> counts_;
  std::vector<std::string> provenance_;
};

/// Throws ValidationError on unlabeled records or out-of-range classes.
ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> records, int n, std::string run_id = {});

/// Element-wise sum; provenance lists are concatenated in order.
ConfusionMatrix sum_matrices(std::span<const ConfusionMatrix> matrices);

/// a[i][j] + a[j][i] for i != j.
std::int64_t similarity4(const ConfusionMatrix& m, int i, int j);

/// Off-block mass between class pairs {i, i+1} and {j, j+1}; i and j odd,
/// n = 8. The within-pair 2x2 blocks never contribute.
std::int64_t similarity8(const ConfusionMatrix& m, int i, int j);

struct RelationThresholds {
  double near_zero_fraction = 0.01;
  double much_greater_factor = 5.0;
  double comparable_low = 0.8;
  double comparable_high = 1.25;
  void validate() const;
};

/// s <= fraction * reference mass.
bool near_zero(std::int64_t s, std::int64_t reference_mass, const RelationThresholds& t = {});
/// a > 0 and a >= factor * b.
bool much_greater(std::int64_t a, std::int64_t b, const RelationThresholds& t = {});
/// low <= a / b <= high; two zeros compare equal.
bool comparable(std::int64_t a, std::int64_t b, const RelationThresholds& t = {});

/// Class pair (4-class) or block pair by their odd leading classes (8-class).
struct PairKey {
  int i = 0;
  int j = 0;
  auto operator<=>(const PairKey&) const = default;
};

enum class RelationKind { NearZero, MuchGreater, Comparable, Ordering };

std::string_view to_string(RelationKind k) noexcept;

/// NearZero uses `a`; MuchGreater / Comparable use `a`, `b`; Ordering
/// evaluates "a > b >> c >= 0 or a ~ b >> c >= 0".
struct RelationSpec {
  std::string name;
  RelationKind kind = RelationKind::NearZero;
  PairKey a;
  PairKey b;
  PairKey c;
};

struct RelationResult {
  std::string name;
  RelationKind kind = RelationKind::NearZero;
  bool holds = false;
  /// For Ordering: "greater", "comparable", "both" or "neither".
  std::string branch;
  std::vector<std::int64_t> values;
};

struct SimilarityReport {
  std::string model_id;
  int scheme = 4;
  std::map<PairKey, std::int64_t> pairs;
  /// Off-diagonal (4) or off-block (8) mass; the near-zero reference.
  std::int64_t reference_mass = 0;
  RelationThresholds thresholds;
  std::vector<RelationResult> relations;

  std::int64_t value(PairKey key) const;
  std::string label(PairKey key) const;
};

/// Separation and imitation checks for the 4- and 8-class schemes.
std::vector<RelationSpec> standard_relations(int scheme);

/// Every provenance entry of `m` must be a run of `model_id`
/// ("model/dataset/seed"); similarity orderings are only meaningful within
/// one model.
SimilarityReport similarity_report(const std::string& model_id, const ConfusionMatrix& m,
                                   const RelationThresholds& thresholds = {},
                                   std::span<const RelationSpec> relations = {});

RelationResult relation_check(const SimilarityReport& report, const RelationSpec& spec);

/// Three-way comparison of two pair values; refuses reports of different models.
int compare_pairs(const SimilarityReport& a, PairKey pa, const SimilarityReport& b, PairKey pb);

std::string confusion_to_csv(const ConfusionMatrix& m);
std::string confusion_to_json(const ConfusionMatrix& m);
ConfusionMatrix confusion_from_json(std::string_view text);
std::string report_to_json(const SimilarityReport& report);

} // namespace scribe
