#include "scribe/harness.hpp"

#include "json_io.hpp"
#include "scribe/errors.hpp"
#include "scribe/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace scribe {

using detail::get;
using detail::json;

TrainingConfig TrainingConfig::preset_for(std::string_view model_id) {
  TrainingConfig c;
  if (model_id == "inceptionv3") {
    c.input_resize = 299;
  }
  if (model_id == kBaselineModel) {
    c.epochs = 1;
    c.optimizer_name = "none";
    c.batch_size = 1;
    c.input_resize = CentroidClassifier::kGrid;
  }
  return c;
}

void TrainingConfig::validate() const {
  if (epochs < 1) {
    throw ValidationError("training_config.epochs must be at least 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("training_config.learning_rate must be positive");
  }
  if (batch_size < 1) {
    throw ValidationError("training_config.batch_size must be at least 1");
  }
  if (input_resize < 1) {
    throw ValidationError("training_config.input_resize must be positive");
  }
}

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
  case RunStatus::Pending:
    return "pending";
  case RunStatus::Completed:
    return "completed";
  case RunStatus::Excluded:
    return "excluded";
  case RunStatus::Failed:
    return "failed";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view text) {
  for (auto s : {RunStatus::Pending, RunStatus::Completed, RunStatus::Excluded, RunStatus::Failed}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  throw ParseError("unknown run status '" + std::string(text) + "'");
}

std::string RunManifest::run_id() const {
  return model_id + "/" + dataset_type + "/" + std::to_string(seed);
}

void RunManifest::validate() const {
  if (model_id.empty() || dataset_type.empty()) {
    throw ValidationError("run manifest needs model_id and dataset_type");
  }
  training_config.validate();
  if (status == RunStatus::Excluded && (!exclusion_reason || exclusion_reason->empty())) {
    throw ValidationError("excluded run " + run_id() + " must carry a reason");
  }
}

std::string run_manifest_to_json(const RunManifest& m) {
  const auto& tc = m.training_config;
  json doc = {{"model_id", m.model_id},
              {"dataset_type", m.dataset_type},
              {"seed", m.seed},
              {"training_config",
               {{"epochs", tc.epochs},
                {"optimizer_name", tc.optimizer_name},
                {"learning_rate", tc.learning_rate},
                {"batch_size", tc.batch_size},
                {"train_seed", tc.train_seed},
                {"input_resize", tc.input_resize}}},
              {"status", std::string(to_string(m.status))}};
  if (m.exclusion_reason) {
    doc["exclusion_reason"] = *m.exclusion_reason;
  }
  if (!m.scheme_id.empty()) {
    doc["scheme_id"] = m.scheme_id;
  }
  return doc.dump(2) + "\n";
}

RunManifest run_manifest_from_json(std::string_view text) {
  const auto doc = detail::parse_json(text, "run manifest");
  RunManifest m;
  m.model_id = get<std::string>(doc, "model_id", "run manifest");
  m.dataset_type = get<std::string>(doc, "dataset_type", "run manifest");
  m.seed = get<std::uint64_t>(doc, "seed", "run manifest");
  const auto tc = get<json>(doc, "training_config", "run manifest");
  m.training_config.epochs = get<int>(tc, "epochs", "training_config");
  m.training_config.optimizer_name = get<std::string>(tc, "optimizer_name", "training_config");
  m.training_config.learning_rate = get<double>(tc, "learning_rate", "training_config");
  m.training_config.batch_size = get<int>(tc, "batch_size", "training_config");
  m.training_config.train_seed = get<int>(tc, "train_seed", "training_config");
  m.training_config.input_resize = get<int>(tc, "input_resize", "training_config");
  m.status = doc.contains("status") ? run_status_from_string(get<std::string>(doc, "status", "run manifest"))
                                    : RunStatus::Pending;
  if (doc.contains("exclusion_reason") && !doc.at("exclusion_reason").is_null()) {
    m.exclusion_reason = get<std::string>(doc, "exclusion_reason", "run manifest");
  }
  if (doc.contains("scheme_id")) {
    m.scheme_id = get<std::string>(doc, "scheme_id", "run manifest");
  }
  m.validate();
  return m;
}

void write_run_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_text_file(path, run_manifest_to_json(m));
}

RunManifest read_run_manifest(const std::filesystem::path& path) {
  return run_manifest_from_json(read_text_file(path));
}

std::string predictions_to_jsonl(std::span<const PredictionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json row = {{"sample_id", r.sample_id},
                {"true_class", r.true_class ? json(*r.true_class) : json(nullptr)},
                {"raw_scores", r.raw_scores},
                {"predicted_class", r.predicted_class}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl, int n_classes) {
  std::vector<PredictionRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) {
      end = jsonl.size();
    }
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    const std::string where = "predictions line " + std::to_string(line_no);
    const auto row = detail::parse_json(line, where);
    PredictionRecord r;
    r.sample_id = get<std::string>(row, "sample_id", where);
    const auto& tc = get<json>(row, "true_class", where);
    if (!tc.is_null()) {
      if (!tc.is_number_integer()) {
        throw ParseError(where + ": true_class must be an integer or null");
      }
      r.true_class = tc.get<int>();
    }
    r.raw_scores = get<std::vector<double>>(row, "raw_scores", where);
    r.predicted_class = get<int>(row, "predicted_class", where);
    if (n_classes <= 0) {
      n_classes = static_cast<int>(r.raw_scores.size());
      if (n_classes == 0) {
        throw ValidationError(where + ": raw_scores must not be empty");
      }
    }
    if (static_cast<int>(r.raw_scores.size()) != n_classes) {
      throw ValidationError(where + ": raw_scores has " + std::to_string(r.raw_scores.size()) +
                            " entries, expected " + std::to_string(n_classes));
    }
    if (r.true_class && (*r.true_class < 1 || *r.true_class > n_classes)) {
      throw ValidationError(where + ": true_class out of range");
    }
    if (r.predicted_class != argmax_class(r.raw_scores)) {
      throw ValidationError(where + ": predicted_class is not the argmax of raw_scores");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path) {
  write_text_file(path, predictions_to_jsonl(records));
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path, int n_classes) {
  return parse_predictions(read_text_file(path), n_classes);
}

std::string loss_curve_to_json(const LossCurve& curve) {
  return json(curve.losses).dump() + "\n";
}

LossCurve loss_curve_from_json(std::string_view text) {
  const auto doc = detail::parse_json(text, "loss curve");
  if (!doc.is_array()) {
    throw ParseError("loss curve must be a JSON array");
  }
  LossCurve c;
  for (const auto& v : doc) {
    if (!v.is_number()) {
      throw ParseError("loss curve entries must be numbers");
    }
    const double x = v.get<double>();
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ValidationError("loss values must be finite and non-negative");
    }
    c.losses.push_back(x);
  }
  return c;
}

std::vector<double> softmax(std::span<const double> raw) {
  if (raw.empty()) {
    throw ValidationError("softmax of an empty vector");
  }
  double max = raw.front();
  for (double r : raw) {
    if (!std::isfinite(r)) {
      throw ValidationError("softmax input must be finite");
    }
    max = std::max(max, r);
  }
  std::vector<double> out(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - max);
    sum += out[i];
  }
  for (auto& v : out) {
    v /= sum;
  }
  return out;
}

int argmax_class(std::span<const double> raw) {
  if (raw.empty()) {
    throw ValidationError("argmax of an empty vector");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i] > raw[best]) {
      best = i;
    }
  }
  return static_cast<int>(best) + 1;
}

TopClass top_class(std::span<const double> raw) {
  const auto probs = softmax(raw);
  const int cls = argmax_class(raw);
  return TopClass{cls, probs[static_cast<std::size_t>(cls - 1)]};
}

CentroidClassifier::Features CentroidClassifier::features(const GrayImage& tile) {
  Features f{};
  const int w = tile.width();
  const int h = tile.height();
  auto bounds = [](int i, int size) {
    int lo = i * size / kGrid;
    int hi = (i + 1) * size / kGrid;
    if (hi <= lo) {
      hi = std::min(lo + 1, size);
      lo = hi - 1;
    }
    return std::pair{lo, hi};
  };
  for (int gy = 0; gy < kGrid; ++gy) {
    const auto [y0, y1] = bounds(gy, h);
    for (int gx = 0; gx < kGrid; ++gx) {
      const auto [x0, x1] = bounds(gx, w);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          sum += tile.at(x, y);
        }
      }
      f[static_cast<std::size_t>(gy * kGrid + gx)] = sum / ((x1 - x0) * (y1 - y0) * 255.0);
    }
  }
  return f;
}

void CentroidClassifier::fit(std::span<const TileSample> train, int n_classes) {
  std::vector<Features> sums(static_cast<std::size_t>(n_classes), Features{});
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (const auto& s : train) {
    if (!s.true_class || *s.true_class < 1 || *s.true_class > n_classes) {
      throw ValidationError("training tile " + s.sample_id + " lacks a valid class");
    }
    const auto idx = static_cast<std::size_t>(*s.true_class - 1);
    const auto f = features(s.pixels);
    for (std::size_t k = 0; k < kFeatures; ++k) {
      sums[idx][k] += f[k];
    }
    ++counts[idx];
  }
  for (std::size_t c = 0; c < sums.size(); ++c) {
    if (counts[c] == 0) {
      throw ValidationError("class " + std::to_string(c + 1) + " has no training tiles");
    }
    for (auto& v : sums[c]) {
      v /= static_cast<double>(counts[c]);
    }
  }
  centroids_ = std::move(sums);
}

std::vector<double> CentroidClassifier::raw_scores(const GrayImage& tile) const {
  const auto f = features(tile);
  std::vector<double> out;
  out.reserve(centroids_.size());
  for (const auto& c : centroids_) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < kFeatures; ++k) {
      const double d = f[k] - c[k];
      d2 += d * d;
    }
    out.push_back(-std::sqrt(d2));
  }
  return out;
}

std::vector<PredictionRecord> predict_tiles(const CentroidClassifier& model,
                                            std::span<const TileSample> tiles) {
  std::vector<PredictionRecord> out;
  out.reserve(tiles.size());
  for (const auto& t : tiles) {
    PredictionRecord r;
    r.sample_id = t.sample_id;
    r.true_class = t.true_class;
    r.raw_scores = model.raw_scores(t.pixels);
    r.predicted_class = argmax_class(r.raw_scores);
    out.push_back(std::move(r));
  }
  return out;
}

BaselineResult run_baseline(const TileDataset& dataset, const RunManifest& manifest) {
  if (manifest.model_id != kBaselineModel) {
    throw ValidationError("run_baseline needs model_id '" + std::string(kBaselineModel) + "', got '" +
                          manifest.model_id + "'");
  }
  if (manifest.dataset_type != dataset.spec.dataset_type) {
    throw ValidationError("run manifest targets '" + manifest.dataset_type + "' but the dataset is '" +
                          dataset.spec.dataset_type + "'");
  }
  BaselineResult res;
  res.model.fit(dataset.train, dataset.scheme.n_classes());
  res.predictions = predict_tiles(res.model, dataset.test);

  double loss = 0.0;
  for (const auto& s : dataset.train) {
    const auto p = softmax(res.model.raw_scores(s.pixels));
    loss -= std::log(std::max(p[static_cast<std::size_t>(*s.true_class - 1)], 1e-300));
  }
  res.curve.losses.push_back(loss / static_cast<double>(dataset.train.size()));
  return res;
}

void validate_coverage(std::span<const PredictionRecord> records, std::span<const TileSample> tiles,
                       int n_classes) {
  std::unordered_map<std::string_view, const TileSample*> expected;
  expected.reserve(tiles.size());
  for (const auto& t : tiles) {
    expected.emplace(t.sample_id, &t);
  }
  std::set<std::string_view> seen;
  for (const auto& r : records) {
    const auto it = expected.find(r.sample_id);
    if (it == expected.end()) {
      throw BackendError("prediction for unknown sample '" + r.sample_id + "'");
    }
    if (!seen.insert(r.sample_id).second) {
      throw BackendError("duplicate prediction for sample '" + r.sample_id + "'");
    }
    if (static_cast<int>(r.raw_scores.size()) != n_classes) {
      throw BackendError("sample '" + r.sample_id + "': raw_scores length mismatch");
    }
    if (r.true_class != it->second->true_class) {
      throw BackendError("sample '" + r.sample_id + "': true_class disagrees with the dataset");
    }
  }
  if (seen.size() != expected.size()) {
    for (const auto& t : tiles) {
      if (!seen.contains(t.sample_id)) {
        throw BackendError("missing prediction for sample '" + t.sample_id + "'");
      }
    }
  }
}

std::string_view to_string(Convergence c) noexcept {
  return c == Convergence::Converged ? "converged" : "not_converged";
}

Convergence assess_convergence(const LossCurve& curve, const ConvergenceThresholds& t) {
  const auto& l = curve.losses;
  if (l.size() < t.min_epochs || l.size() < t.window) {
    throw ValidationError("loss curve too short to assess convergence (" + std::to_string(l.size()) +
                          " epochs)");
  }
  const auto w = static_cast<std::ptrdiff_t>(t.window);
  const double head = std::accumulate(l.begin(), l.begin() + w, 0.0) / static_cast<double>(w);
  const double tail = std::accumulate(l.end() - w, l.end(), 0.0) / static_cast<double>(w);
  return tail <= std::max(t.absolute, t.relative * head) ? Convergence::Converged
                                                          : Convergence::NotConverged;
}

std::string_view to_string(ExclusionPolicy p) noexcept {
  return p == ExclusionPolicy::Exclude ? "exclude" : "include";
}

ExclusionPolicy exclusion_policy_from_string(std::string_view text) {
  if (text == "exclude") {
    return ExclusionPolicy::Exclude;
  }
  if (text == "include") {
    return ExclusionPolicy::Include;
  }
  throw ValidationError("exclusion policy must be 'exclude' or 'include'");
}

} // namespace scribe
