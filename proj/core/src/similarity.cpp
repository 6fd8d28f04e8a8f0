#include "scribe/similarity.hpp"

#include "json_io.hpp"
#include "scribe/errors.hpp"

#include <cmath>
#include <sstream>

namespace scribe {

using detail::get;
using detail::json;

ConfusionMatrix::ConfusionMatrix(int n) : n_(n) {
  if (n < 1) {
    throw ValidationError("confusion matrix needs at least one class");
  }
  counts_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
}

ConfusionMatrix::ConfusionMatrix(int n, std::vector<std::int64_t> row_major, std::vector<std::string> provenance)
    : n_(n), counts_(std::move(row_major)), provenance_(std::move(provenance)) {
  if (n < 1 || counts_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw ValidationError("confusion matrix data does not match n = " + std::to_string(n));
  }
  for (auto c : counts_) {
    if (c < 0) {
      throw ValidationError("confusion matrix entries must be non-negative");
    }
  }
}

std::size_t ConfusionMatrix::index(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) {
    throw ValidationError("class index out of range 1.." + std::to_string(n_));
  }
  return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j - 1);
}

std::int64_t ConfusionMatrix::total() const noexcept {
  std::int64_t t = 0;
  for (auto c : counts_) {
    t += c;
  }
  return t;
}

std::int64_t ConfusionMatrix::row_sum(int true_cls) const {
  std::int64_t t = 0;
  for (int j = 1; j <= n_; ++j) {
    t += at(true_cls, j);
  }
  return t;
}

std::int64_t ConfusionMatrix::diagonal_mass() const noexcept {
  std::int64_t t = 0;
  for (int i = 0; i < n_; ++i) {
    t += counts_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1)];
  }
  return t;
}

std::int64_t ConfusionMatrix::off_block_mass() const {
  if (n_ % 2 != 0) {
    throw ValidationError("block mass needs an even class count");
  }
  std::int64_t inside = 0;
  for (int i = 1; i <= n_; i += 2) {
    inside += at(i, i) + at(i, i + 1) + at(i + 1, i) + at(i + 1, i + 1);
  }
  return total() - inside;
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(diagonal_mass()) / static_cast<double>(t);
}

ConfusionMatrix ConfusionMatrix::scaled(std::int64_t factor) const {
  if (factor < 0) {
    throw ValidationError("scale factor must be non-negative");
  }
  ConfusionMatrix out = *this;
  for (auto& c : out.counts_) {
    c *= factor;
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> records, int n, std::string run_id) {
  ConfusionMatrix m(n);
  for (const auto& r : records) {
    if (!r.true_class) {
      throw ValidationError("record '" + r.sample_id + "' is unlabeled");
    }
    if (*r.true_class < 1 || *r.true_class > n || r.predicted_class < 1 || r.predicted_class > n) {
      throw ValidationError("record '" + r.sample_id + "' has a class outside 1.." + std::to_string(n));
    }
    ++m.at(*r.true_class, r.predicted_class);
  }
  if (!run_id.empty()) {
    m = ConfusionMatrix(n, {m.counts().begin(), m.counts().end()}, {std::move(run_id)});
  }
  return m;
}

ConfusionMatrix sum_matrices(std::span<const ConfusionMatrix> matrices) {
  if (matrices.empty()) {
    throw ValidationError("cannot sum an empty list of matrices");
  }
  ConfusionMatrix out(matrices.front().n());
  for (const auto& m : matrices) {
    if (m.n() != out.n()) {
      throw ValidationError("dimension mismatch: " + std::to_string(m.n()) + " vs " + std::to_string(out.n()));
    }
    for (std::size_t k = 0; k < out.counts_.size(); ++k) {
      out.counts_[k] += m.counts_[k];
    }
    out.provenance_.insert(out.provenance_.end(), m.provenance_.begin(), m.provenance_.end());
  }
  return out;
}

std::int64_t similarity4(const ConfusionMatrix& m, int i, int j) {
  if (i == j) {
    throw ValidationError("similarity needs two distinct classes");
  }
  return m.at(i, j) + m.at(j, i);
}

std::int64_t similarity8(const ConfusionMatrix& m, int i, int j) {
  if (m.n() != 8) {
    throw ValidationError("paired-block similarity needs an 8-class matrix");
  }
  if (i % 2 == 0 || j % 2 == 0) {
    throw ValidationError("paired-block similarity takes the odd leading class of each pair");
  }
  if (i == j) {
    throw ValidationError("paired-block similarity needs two distinct pairs");
  }
  return (m.at(i, j) + m.at(i, j + 1) + m.at(i + 1, j) + m.at(i + 1, j + 1)) +
         (m.at(j, i) + m.at(j + 1, i) + m.at(j, i + 1) + m.at(j + 1, i + 1));
}

void RelationThresholds::validate() const {
  if (!(near_zero_fraction >= 0.0) || !(much_greater_factor >= 1.0) || !(comparable_low > 0.0) ||
      !(comparable_high >= comparable_low)) {
    throw ValidationError("invalid relation thresholds");
  }
}

bool near_zero(std::int64_t s, std::int64_t reference_mass, const RelationThresholds& t) {
  return static_cast<double>(s) <= t.near_zero_fraction * static_cast<double>(reference_mass);
}

bool much_greater(std::int64_t a, std::int64_t b, const RelationThresholds& t) {
  // A positive count dominates zero; no absolute floor, so summing c
  // identical runs never changes the verdict.
  return a > 0 && static_cast<double>(a) >= t.much_greater_factor * static_cast<double>(b);
}

bool comparable(std::int64_t a, std::int64_t b, const RelationThresholds& t) {
  if (b == 0) {
    return a == 0;
  }
  const double r = static_cast<double>(a) / static_cast<double>(b);
  return r >= t.comparable_low && r <= t.comparable_high;
}

std::string_view to_string(RelationKind k) noexcept {
  switch (k) {
  case RelationKind::NearZero:
    return "near_zero";
  case RelationKind::MuchGreater:
    return "much_greater";
  case RelationKind::Comparable:
    return "comparable";
  case RelationKind::Ordering:
    return "ordering";
  }
  return "?";
}

std::int64_t SimilarityReport::value(PairKey key) const {
  if (key.i > key.j) {
    std::swap(key.i, key.j);
  }
  const auto it = pairs.find(key);
  if (it == pairs.end()) {
    throw ValidationError("similarity report for '" + model_id + "' has no pair " + label(key));
  }
  return it->second;
}

std::string SimilarityReport::label(PairKey key) const {
  if (key.i > key.j) {
    std::swap(key.i, key.j);
  }
  std::ostringstream out;
  if (scheme == 8) {
    out << '(' << key.i << '&' << key.i + 1 << ',' << key.j << '&' << key.j + 1 << ')';
  } else {
    out << '(' << key.i << ',' << key.j << ')';
  }
  return out.str();
}

std::vector<RelationSpec> standard_relations(int scheme) {
  if (scheme == 4) {
    return {
        {"separation", RelationKind::NearZero, {2, 3}, {}, {}},
        {"imitation", RelationKind::Ordering, {1, 4}, {3, 4}, {1, 3}},
    };
  }
  if (scheme == 8) {
    return {
        {"separation", RelationKind::NearZero, {3, 5}, {}, {}},
        {"imitation", RelationKind::Ordering, {1, 7}, {5, 7}, {1, 5}},
    };
  }
  return {};
}

SimilarityReport similarity_report(const std::string& model_id, const ConfusionMatrix& m,
                                   const RelationThresholds& thresholds,
                                   std::span<const RelationSpec> relations) {
  if (model_id.empty()) {
    throw ValidationError("similarity reports need a model_id");
  }
  thresholds.validate();
  const std::string prefix = model_id + "/";
  for (const auto& run : m.provenance()) {
    if (!run.starts_with(prefix)) {
      throw ValidationError("run '" + run + "' does not belong to model '" + model_id +
                            "'; similarities are only comparable within one model");
    }
  }

  SimilarityReport r;
  r.model_id = model_id;
  r.thresholds = thresholds;
  if (m.n() == 8) {
    r.scheme = 8;
    for (int i = 1; i <= 8; i += 2) {
      for (int j = i + 2; j <= 8; j += 2) {
        r.pairs[{i, j}] = similarity8(m, i, j);
      }
    }
    r.reference_mass = m.off_block_mass();
  } else {
    r.scheme = m.n();
    for (int i = 1; i <= m.n(); ++i) {
      for (int j = i + 1; j <= m.n(); ++j) {
        r.pairs[{i, j}] = similarity4(m, i, j);
      }
    }
    r.reference_mass = m.off_diagonal_mass();
  }

  const auto defaults = standard_relations(r.scheme);
  for (const auto& spec : relations.empty() ? std::span<const RelationSpec>(defaults) : relations) {
    r.relations.push_back(relation_check(r, spec));
  }
  return r;
}

RelationResult relation_check(const SimilarityReport& report, const RelationSpec& spec) {
  const auto& t = report.thresholds;
  RelationResult res{spec.name, spec.kind, false, {}, {}};
  switch (spec.kind) {
  case RelationKind::NearZero: {
    const auto a = report.value(spec.a);
    res.values = {a, report.reference_mass};
    res.holds = near_zero(a, report.reference_mass, t);
    break;
  }
  case RelationKind::MuchGreater: {
    const auto a = report.value(spec.a);
    const auto b = report.value(spec.b);
    res.values = {a, b};
    res.holds = much_greater(a, b, t);
    break;
  }
  case RelationKind::Comparable: {
    const auto a = report.value(spec.a);
    const auto b = report.value(spec.b);
    res.values = {a, b};
    res.holds = comparable(a, b, t);
    break;
  }
  case RelationKind::Ordering: {
    const auto a = report.value(spec.a);
    const auto b = report.value(spec.b);
    const auto c = report.value(spec.c);
    res.values = {a, b, c};
    const bool tail = much_greater(b, c, t) && c >= 0;
    const bool greater = a > b && tail;
    const bool similar = comparable(a, b, t) && tail;
    res.holds = greater || similar;
    res.branch = greater && similar ? "both" : greater ? "greater" : similar ? "comparable" : "neither";
    break;
  }
  }
  if (res.branch.empty()) {
    res.branch = res.holds ? "holds" : "fails";
  }
  return res;
}

int compare_pairs(const SimilarityReport& a, PairKey pa, const SimilarityReport& b, PairKey pb) {
  if (a.model_id != b.model_id) {
    throw ValidationError("refusing to compare similarities of '" + a.model_id + "' and '" + b.model_id + "'");
  }
  const auto va = a.value(pa);
  const auto vb = b.value(pb);
  return va < vb ? -1 : va > vb ? 1 : 0;
}

std::string confusion_to_csv(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "true\\predicted";
  for (int j = 1; j <= m.n(); ++j) {
    out << ",Class " << j;
  }
  out << '\n';
  for (int i = 1; i <= m.n(); ++i) {
    out << "Class " << i;
    for (int j = 1; j <= m.n(); ++j) {
      out << ',' << m.at(i, j);
    }
    out << '\n';
  }
  return out.str();
}

std::string confusion_to_json(const ConfusionMatrix& m) {
  json rows = json::array();
  for (int i = 1; i <= m.n(); ++i) {
    json row = json::array();
    for (int j = 1; j <= m.n(); ++j) {
      row.push_back(m.at(i, j));
    }
    rows.push_back(row);
  }
  return json{{"n", m.n()}, {"counts", rows}, {"provenance", m.provenance()}}.dump(2) + "\n";
}

ConfusionMatrix confusion_from_json(std::string_view text) {
  const auto doc = detail::parse_json(text, "confusion matrix");
  const int n = get<int>(doc, "n", "confusion matrix");
  const auto rows = get<std::vector<std::vector<std::int64_t>>>(doc, "counts", "confusion matrix");
  if (static_cast<int>(rows.size()) != n) {
    throw ValidationError("confusion matrix: expected " + std::to_string(n) + " rows");
  }
  std::vector<std::int64_t> flat;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) {
      throw ValidationError("confusion matrix: ragged row");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  std::vector<std::string> prov;
  if (doc.contains("provenance")) {
    prov = get<std::vector<std::string>>(doc, "provenance", "confusion matrix");
  }
  return ConfusionMatrix(n, std::move(flat), std::move(prov));
}

std::string report_to_json(const SimilarityReport& r) {
  json pairs = json::object();
  for (const auto& [key, v] : r.pairs) {
    pairs[r.label(key)] = v;
  }
  json rel = json::array();
  for (const auto& x : r.relations) {
    rel.push_back({{"name", x.name},
                   {"kind", std::string(to_string(x.kind))},
                   {"holds", x.holds},
                   {"branch", x.branch},
                   {"values", x.values}});
  }
  json thr = {{"near_zero_fraction", r.thresholds.near_zero_fraction},
              {"much_greater_factor", r.thresholds.much_greater_factor},
              {"comparable_low", r.thresholds.comparable_low},
              {"comparable_high", r.thresholds.comparable_high}};
  return json{{"model_id", r.model_id},
              {"scheme", r.scheme},
              {"reference_mass", r.reference_mass},
              {"thresholds", thr},
              {"pairs", pairs},
              {"relations", rel}}
             .dump(2) +
         "\n";
}

} // namespace scribe
