#include "scribe/experiment.hpp"

#include "json_io.hpp"
#include "scribe/annotations.hpp"
#include "scribe/errors.hpp"
#include "scribe/util.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace scribe {

namespace fs = std::filesystem;
using detail::get;
using detail::json;

namespace {

std::string file_safe(std::string text) {
  std::replace(text.begin(), text.end(), '/', '_');
  return text;
}

std::string relative_to(const fs::path& p, const fs::path& root) {
  return fs::relative(p, root).generic_string();
}

int class_count(const RunOutputs& run) {
  return run.predictions.empty() ? 0 : static_cast<int>(run.predictions.front().raw_scores.size());
}

} // namespace

bool run_is_eligible(const RunManifest& run, ExclusionPolicy policy) noexcept {
  return run.status == RunStatus::Completed ||
         (run.status == RunStatus::Excluded && policy == ExclusionPolicy::Include);
}

std::vector<ModelAnalysis> analyze_runs(std::span<const RunOutputs> runs, const RelationThresholds& thresholds,
                                        ExclusionPolicy policy, const fs::path& out_dir) {
  std::map<std::pair<std::string, int>, std::vector<ConfusionMatrix>> groups;
  std::vector<const RunOutputs*> ordered;
  for (const auto& r : runs) {
    if (run_is_eligible(r.manifest, policy) && class_count(r) > 0) {
      ordered.push_back(&r);
    }
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const RunOutputs* a, const RunOutputs* b) { return a->manifest.run_id() < b->manifest.run_id(); });
  for (const auto* r : ordered) {
    const int n = class_count(*r);
    groups[{r->manifest.model_id, n}].push_back(confusion_matrix(r->predictions, n, r->manifest.run_id()));
  }

  std::vector<ModelAnalysis> out;
  for (const auto& [key, matrices] : groups) {
    ModelAnalysis a;
    a.model_id = key.first;
    a.n_classes = key.second;
    a.summed = sum_matrices(matrices);
    a.report = similarity_report(a.model_id, a.summed, thresholds);
    const auto dir = out_dir / (file_safe(a.model_id) + "_" + std::to_string(a.n_classes) + "class");
    a.matrix_json = dir / "confusion_sum.json";
    a.matrix_csv = dir / "confusion_sum.csv";
    a.report_json = dir / "similarity.json";
    write_text_file(a.matrix_json, confusion_to_json(a.summed));
    write_text_file(a.matrix_csv, confusion_to_csv(a.summed));
    write_text_file(a.report_json, report_to_json(a.report));
    out.push_back(std::move(a));
  }
  return out;
}

AttributionResult attribute_runs(std::span<const LoadedExternalSet> cuts, std::span<const RunOutputs> runs,
                                 const std::optional<std::string>& scheme_id, TallyMode mode,
                                 ExclusionPolicy policy, const fs::path& out_dir) {
  if (cuts.empty()) {
    throw ValidationError("attribution needs at least one external tile set");
  }
  AttributionResult res;
  res.set_id = cuts.front().set.set_id;
  res.scope = scheme_id ? *scheme_id : "all";
  for (const auto& c : cuts) {
    if (c.set.set_id != res.set_id) {
      throw ValidationError("external tile sets '" + res.set_id + "' and '" + c.set.set_id + "' mixed");
    }
  }

  std::vector<const RunOutputs*> ordered;
  for (const auto& r : runs) {
    if (!run_is_eligible(r.manifest, policy) || !r.external.contains(res.set_id)) {
      continue;
    }
    if (scheme_id && r.manifest.scheme_id != *scheme_id) {
      continue;
    }
    ordered.push_back(&r);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const RunOutputs* a, const RunOutputs* b) { return a->manifest.run_id() < b->manifest.run_id(); });

  res.verdicts.set_id = res.set_id;
  for (const auto* r : ordered) {
    const auto& preds = r->external.at(res.set_id);
    const LoadedExternalSet* cut = nullptr;
    for (const auto& c : cuts) {
      if (!preds.empty() && !c.set.tiles.empty() &&
          std::any_of(c.set.tiles.begin(), c.set.tiles.end(),
                      [&](const TileSample& t) { return t.sample_id == preds.front().sample_id; })) {
        cut = &c;
        break;
      }
    }
    if (!cut) {
      throw ValidationError("run " + r->manifest.run_id() + " predicted tiles of '" + res.set_id +
                            "' that match none of the given tile sets");
    }
    if (r->manifest.scheme_id.empty()) {
      throw ValidationError("run " + r->manifest.run_id() + " does not record its class scheme");
    }
    const auto& scheme = cut->scheme(r->manifest.scheme_id);
    const auto scores = score_external(cut->set, preds, scheme);
    const auto csv = out_dir / "scores" / (file_safe(r->manifest.run_id()) + ".csv");
    write_text_file(csv, score_heatmap_csv(scores, scheme.n_classes()));
    res.heatmaps.push_back(csv);
    auto v = run_verdict(r->manifest, scores);
    v.status = RunStatus::Completed;
    res.verdicts.runs.push_back(std::move(v));
  }
  res.verdicts.tally = majority_vote(res.verdicts.runs, mode);
  res.verdict_path = out_dir / "verdicts.json";
  write_text_file(res.verdict_path, verdict_file_to_json(res.verdicts));
  return res;
}

void ExperimentConfig::validate() const {
  if (annotation_file.empty()) {
    throw ValidationError("experiment config needs an annotation file");
  }
  if (dataset_types.empty()) {
    throw ValidationError("experiment config needs at least one dataset type");
  }
  for (const auto& t : dataset_types) {
    dataset_type_info(t);
  }
  if (seeds.empty()) {
    throw ValidationError("experiment config needs at least one seed");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ValidationError("experiment seeds must be distinct");
  }
  if (backends.empty()) {
    throw ValidationError("experiment config needs at least one backend");
  }
  std::set<std::string> models;
  for (const auto& b : backends) {
    if (b.model_id.empty() || !models.insert(b.model_id).second) {
      throw ValidationError("backend model ids must be non-empty and distinct");
    }
    if (b.backend.kind == BackendSpec::Kind::Baseline && b.model_id != kBaselineModel) {
      throw ValidationError("the baseline backend serves model '" + std::string(kBaselineModel) + "' only");
    }
  }
  augmentation.validate();
  thresholds.validate();
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ValidationError("split ratio must lie strictly between 0 and 1");
  }
  if (external_stride < 1) {
    throw ValidationError("external stride must be positive");
  }
  if (parallelism < 1) {
    throw ValidationError("parallelism must be at least 1");
  }
}

ExperimentConfig experiment_config_from_json(std::string_view text, const fs::path& base_dir) {
  const auto doc = detail::parse_json(text, "experiment config");
  if (!doc.is_object()) {
    throw ParseError("experiment config must be a JSON object");
  }
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };
  ExperimentConfig c;
  c.annotation_file = resolve(get<std::string>(doc, "annotations", "experiment config"));
  if (doc.contains("dataset_types")) {
    c.dataset_types = get<std::vector<std::string>>(doc, "dataset_types", "experiment config");
  }
  if (doc.contains("seeds")) {
    c.seeds = get<std::vector<std::uint64_t>>(doc, "seeds", "experiment config");
  }
  if (doc.contains("backends")) {
    for (const auto& b : doc.at("backends")) {
      BackendEntry e;
      e.model_id = get<std::string>(b, "model_id", "backend");
      auto spec = BackendSpec::parse(get<std::string>(b, "backend", "backend"));
      if (spec.kind == BackendSpec::Kind::Exec) {
        spec.executable = resolve(spec.executable.string());
      }
      e.backend = std::move(spec);
      c.backends.push_back(std::move(e));
    }
  }
  if (doc.contains("augmentation")) {
    const auto& a = doc.at("augmentation");
    if (a.contains("shine_factors")) c.augmentation.shine_factors = get<std::vector<double>>(a, "shine_factors", "augmentation");
    if (a.contains("shift_offsets_h")) c.augmentation.shift_offsets_h = get<std::vector<int>>(a, "shift_offsets_h", "augmentation");
    if (a.contains("shift_offsets_v")) c.augmentation.shift_offsets_v = get<std::vector<int>>(a, "shift_offsets_v", "augmentation");
    if (a.contains("zoom_factors")) c.augmentation.zoom_factors = get<std::vector<double>>(a, "zoom_factors", "augmentation");
  }
  if (doc.contains("split_ratio")) {
    c.split_ratio = get<double>(doc, "split_ratio", "experiment config");
  }
  if (doc.contains("thresholds")) {
    const auto& t = doc.at("thresholds");
    if (t.contains("near_zero_fraction")) c.thresholds.near_zero_fraction = get<double>(t, "near_zero_fraction", "thresholds");
    if (t.contains("much_greater_factor")) c.thresholds.much_greater_factor = get<double>(t, "much_greater_factor", "thresholds");
    if (t.contains("comparable_low")) c.thresholds.comparable_low = get<double>(t, "comparable_low", "thresholds");
    if (t.contains("comparable_high")) c.thresholds.comparable_high = get<double>(t, "comparable_high", "thresholds");
  }
  if (doc.contains("convergence")) {
    const auto& t = doc.at("convergence");
    if (t.contains("absolute")) c.convergence.absolute = get<double>(t, "absolute", "convergence");
    if (t.contains("relative")) c.convergence.relative = get<double>(t, "relative", "convergence");
    if (t.contains("window")) c.convergence.window = get<std::size_t>(t, "window", "convergence");
    if (t.contains("min_epochs")) c.convergence.min_epochs = get<std::size_t>(t, "min_epochs", "convergence");
  }
  if (doc.contains("exclusion_policy")) {
    c.exclusion_policy = exclusion_policy_from_string(get<std::string>(doc, "exclusion_policy", "experiment config"));
  }
  if (doc.contains("tally_mode")) {
    c.tally_mode = tally_mode_from_string(get<std::string>(doc, "tally_mode", "experiment config"));
  }
  if (doc.contains("external_sets")) {
    c.external_sets = get<std::vector<std::string>>(doc, "external_sets", "experiment config");
  }
  if (doc.contains("external_stride")) {
    c.external_stride = get<int>(doc, "external_stride", "experiment config");
  }
  if (doc.contains("parallelism")) {
    c.parallelism = get<int>(doc, "parallelism", "experiment config");
  }
  c.output_root = resolve(doc.contains("output_root") ? get<std::string>(doc, "output_root", "experiment config")
                                                     : c.output_root.string());
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json backends = json::array();
  for (const auto& b : c.backends) {
    backends.push_back({{"model_id", b.model_id}, {"backend", b.backend.to_string()}});
  }
  json doc = {{"annotations", c.annotation_file.generic_string()},
              {"dataset_types", c.dataset_types},
              {"seeds", c.seeds},
              {"backends", backends},
              {"augmentation",
               {{"shine_factors", c.augmentation.shine_factors},
                {"shift_offsets_h", c.augmentation.shift_offsets_h},
                {"shift_offsets_v", c.augmentation.shift_offsets_v},
                {"zoom_factors", c.augmentation.zoom_factors}}},
              {"split_ratio", c.split_ratio},
              {"thresholds",
               {{"near_zero_fraction", c.thresholds.near_zero_fraction},
                {"much_greater_factor", c.thresholds.much_greater_factor},
                {"comparable_low", c.thresholds.comparable_low},
                {"comparable_high", c.thresholds.comparable_high}}},
              {"convergence",
               {{"absolute", c.convergence.absolute},
                {"relative", c.convergence.relative},
                {"window", c.convergence.window},
                {"min_epochs", c.convergence.min_epochs}}},
              {"exclusion_policy", std::string(to_string(c.exclusion_policy))},
              {"tally_mode", std::string(to_string(c.tally_mode))},
              {"external_sets", c.external_sets},
              {"external_stride", c.external_stride},
              {"parallelism", c.parallelism},
              {"output_root", c.output_root.generic_string()}};
  return doc.dump(2) + "\n";
}

std::string RunRecord::run_id() const {
  return model_id + "/" + dataset_type + "/" + std::to_string(seed);
}

std::size_t ExperimentLedger::count(RunStatus status) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [&](const RunRecord& r) { return r.status == status; }));
}

std::string ExperimentLedger::summary_digest() const {
  std::string all = sha256_hex(config_json);
  for (const auto& d : datasets) {
    all += d.manifest_digest;
  }
  for (const auto& r : runs) {
    all += r.run_id() + std::string(to_string(r.status)) + r.predictions_digest;
  }
  for (const auto& a : analyses) {
    all += a.digest;
  }
  for (const auto& a : attributions) {
    all += a.digest;
  }
  return sha256_hex(all);
}

std::string ledger_to_json(const ExperimentLedger& l) {
  json datasets = json::array();
  for (const auto& d : l.datasets) {
    json row = {{"dataset_type", d.dataset_type}, {"seed", d.seed},
                {"scheme_id", d.scheme_id},       {"dir", d.dir},
                {"tile_size", d.tile_size},       {"train_tiles", d.train_tiles},
                {"test_tiles", d.test_tiles},     {"manifest_digest", d.manifest_digest}};
    if (!d.error.empty()) {
      row["error"] = d.error;
    }
    datasets.push_back(row);
  }
  json runs = json::array();
  for (const auto& r : l.runs) {
    json row = {{"run_id", r.run_id()},
                {"model_id", r.model_id},
                {"dataset_type", r.dataset_type},
                {"seed", r.seed},
                {"scheme_id", r.scheme_id},
                {"status", std::string(to_string(r.status))},
                {"dir", r.dir},
                {"predictions_digest", r.predictions_digest},
                {"confusion_matrix", r.matrix_json}};
    row["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
    if (!r.reason.empty()) {
      row["reason"] = r.reason;
    }
    runs.push_back(row);
  }
  json analyses = json::array();
  for (const auto& a : l.analyses) {
    analyses.push_back({{"model_id", a.model_id},
                        {"n_classes", a.n_classes},
                        {"confusion_json", a.matrix_json},
                        {"confusion_csv", a.matrix_csv},
                        {"similarity_report", a.report_json},
                        {"digest", a.digest}});
  }
  json attributions = json::array();
  for (const auto& a : l.attributions) {
    attributions.push_back({{"set_id", a.set_id},
                            {"scope", a.scope},
                            {"verdicts", a.verdict_json},
                            {"final", a.final_verdict},
                            {"score_tables", a.score_tables},
                            {"digest", a.digest}});
  }
  json doc = {{"format", "scribe-ledger/1"},
              {"config", detail::parse_json(l.config_json, "config snapshot")},
              {"datasets", datasets},
              {"runs", runs},
              {"analyses", analyses},
              {"attributions", attributions},
              {"summary",
               {{"completed", l.count(RunStatus::Completed)},
                {"excluded", l.count(RunStatus::Excluded)},
                {"failed", l.count(RunStatus::Failed)},
                {"digest", l.summary_digest()}}}};
  return doc.dump(2) + "\n";
}

ExperimentLedger ledger_from_json(std::string_view text, const fs::path& root) {
  const auto doc = detail::parse_json(text, "ledger");
  ExperimentLedger l;
  l.root = root;
  l.config_json = get<json>(doc, "config", "ledger").dump(2) + "\n";
  for (const auto& d : get<json>(doc, "datasets", "ledger")) {
    DatasetRecord r;
    r.dataset_type = get<std::string>(d, "dataset_type", "ledger dataset");
    r.seed = get<std::uint64_t>(d, "seed", "ledger dataset");
    r.scheme_id = get<std::string>(d, "scheme_id", "ledger dataset");
    r.dir = get<std::string>(d, "dir", "ledger dataset");
    r.tile_size = get<int>(d, "tile_size", "ledger dataset");
    r.train_tiles = get<std::size_t>(d, "train_tiles", "ledger dataset");
    r.test_tiles = get<std::size_t>(d, "test_tiles", "ledger dataset");
    r.manifest_digest = get<std::string>(d, "manifest_digest", "ledger dataset");
    if (d.contains("error")) {
      r.error = get<std::string>(d, "error", "ledger dataset");
    }
    l.datasets.push_back(std::move(r));
  }
  for (const auto& j : get<json>(doc, "runs", "ledger")) {
    RunRecord r;
    r.model_id = get<std::string>(j, "model_id", "ledger run");
    r.dataset_type = get<std::string>(j, "dataset_type", "ledger run");
    r.seed = get<std::uint64_t>(j, "seed", "ledger run");
    r.scheme_id = get<std::string>(j, "scheme_id", "ledger run");
    r.status = run_status_from_string(get<std::string>(j, "status", "ledger run"));
    r.dir = get<std::string>(j, "dir", "ledger run");
    r.predictions_digest = get<std::string>(j, "predictions_digest", "ledger run");
    r.matrix_json = get<std::string>(j, "confusion_matrix", "ledger run");
    if (j.contains("accuracy") && !j.at("accuracy").is_null()) {
      r.accuracy = get<double>(j, "accuracy", "ledger run");
    }
    if (j.contains("reason")) {
      r.reason = get<std::string>(j, "reason", "ledger run");
    }
    l.runs.push_back(std::move(r));
  }
  for (const auto& j : get<json>(doc, "analyses", "ledger")) {
    l.analyses.push_back(AnalysisRecord{get<std::string>(j, "model_id", "ledger analysis"),
                                        get<int>(j, "n_classes", "ledger analysis"),
                                        get<std::string>(j, "confusion_json", "ledger analysis"),
                                        get<std::string>(j, "confusion_csv", "ledger analysis"),
                                        get<std::string>(j, "similarity_report", "ledger analysis"),
                                        get<std::string>(j, "digest", "ledger analysis")});
  }
  for (const auto& j : get<json>(doc, "attributions", "ledger")) {
    l.attributions.push_back(AttributionRecord{get<std::string>(j, "set_id", "ledger attribution"),
                                               get<std::string>(j, "scope", "ledger attribution"),
                                               get<std::string>(j, "verdicts", "ledger attribution"),
                                               get<std::string>(j, "final", "ledger attribution"),
                                               get<std::vector<std::string>>(j, "score_tables", "ledger attribution"),
                                               get<std::string>(j, "digest", "ledger attribution")});
  }
  return l;
}

ExperimentLedger read_ledger(const fs::path& root) {
  return ledger_from_json(read_text_file(root / "ledger.json"), root);
}

namespace {

/// Serialises progress events to `events.jsonl`; the only writer touched by
/// worker threads.
class EventLog {
public:
  explicit EventLog(fs::path path) : path_(std::move(path)) { write_text_file(path_, ""); }

  void append(const json& event) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    out << event.dump() << '\n';
  }

private:
  std::mutex mutex_;
  fs::path path_;
};

struct RunJob {
  RunRecord record;
  BackendSpec backend;
  RunRequest request;
  bool runnable = false;
  std::optional<RunOutputs> outputs;
};

} // namespace

ExperimentLedger run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto ann = load_annotations(config.annotation_file);
  const fs::path root = config.output_root;
  fs::create_directories(root);
  EventLog events(root / "events.jsonl");

  ExperimentLedger ledger;
  ledger.root = root;
  ledger.config_json = experiment_config_to_json(config);

  // Datasets.
  std::map<std::string, std::vector<PieceImage>> pieces_by_scheme;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> dataset_index;
  for (const auto& type : config.dataset_types) {
    const auto& info = dataset_type_info(type);
    const auto& scheme = ann.set.scheme_with_classes(info.n_classes);
    if (!pieces_by_scheme.contains(scheme.id())) {
      pieces_by_scheme[scheme.id()] = ann.extract_pieces(scheme.id());
    }
    for (auto seed : config.seeds) {
      DatasetRecord rec;
      rec.dataset_type = type;
      rec.seed = seed;
      rec.scheme_id = scheme.id();
      const auto dir = root / "datasets" / (type + "_" + std::to_string(seed));
      rec.dir = relative_to(dir, root);
      try {
        auto spec = DatasetSpec::for_type(type, scheme, seed, config.augmentation);
        spec.split_ratio = config.split_ratio;
        const auto ds = build_dataset(pieces_by_scheme[scheme.id()], spec, scheme);
        write_dataset(ds, dir);
        rec.tile_size = ds.tile_size;
        rec.train_tiles = ds.train.size();
        rec.test_tiles = ds.test.size();
        rec.manifest_digest = sha256_file(dir / "manifest.json");
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      events.append({{"event", "dataset"}, {"dataset", rec.dir}, {"ok", rec.error.empty()}});
      dataset_index[{type, seed}] = ledger.datasets.size();
      ledger.datasets.push_back(std::move(rec));
    }
  }

  // External tile sets, one cut per distinct training tile size.
  std::vector<std::string> set_ids = config.external_sets;
  if (set_ids.empty()) {
    for (const auto& s : ann.set.external_sets) {
      set_ids.push_back(s.set_id);
    }
  }
  std::set<int> tile_sizes;
  for (const auto& d : ledger.datasets) {
    if (d.error.empty()) {
      tile_sizes.insert(d.tile_size);
    }
  }
  std::map<std::string, std::vector<LoadedExternalSet>> cuts;
  std::map<int, std::vector<fs::path>> external_dirs;
  for (const auto& id : set_ids) {
    const auto pieces = ann.extract_external(id);
    for (int size : tile_sizes) {
      const auto dir = root / "external" / (id + "_s" + std::to_string(size));
      auto tiles = build_external_tiles(id, pieces, size, config.external_stride);
      write_external_set(tiles, ann.set.schemes, dir);
      cuts[id].push_back(LoadedExternalSet{std::move(tiles), ann.set.schemes});
      external_dirs[size].push_back(dir);
    }
  }

  // Runs.
  std::vector<RunJob> jobs;
  for (const auto& b : config.backends) {
    for (const auto& type : config.dataset_types) {
      for (auto seed : config.seeds) {
        RunJob job;
        job.backend = b.backend;
        const auto& ds = ledger.datasets[dataset_index.at({type, seed})];
        auto& rec = job.record;
        rec.model_id = b.model_id;
        rec.dataset_type = type;
        rec.seed = seed;
        rec.scheme_id = ds.scheme_id;
        const auto dir = root / "runs" / file_safe(b.model_id) / (type + "_" + std::to_string(seed));
        rec.dir = relative_to(dir, root);
        if (!ds.error.empty()) {
          rec.status = RunStatus::Failed;
          rec.reason = "dataset build failed: " + ds.error;
        } else {
          RunManifest m;
          m.model_id = b.model_id;
          m.dataset_type = type;
          m.seed = seed;
          m.training_config = TrainingConfig::preset_for(b.model_id);
          write_run_manifest(m, dir / run_files::kManifest);
          job.request = RunRequest{root / ds.dir, dir / run_files::kManifest, dir, external_dirs[ds.tile_size],
                                   config.exclusion_policy, config.convergence};
          job.runnable = true;
        }
        jobs.push_back(std::move(job));
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      auto& job = jobs[i];
      if (!job.runnable) {
        continue;
      }
      try {
        job.outputs = execute_run(job.backend, job.request);
        job.record.status = job.outputs->manifest.status;
        if (job.outputs->manifest.exclusion_reason) {
          job.record.reason = *job.outputs->manifest.exclusion_reason;
        }
      } catch (const std::exception& e) {
        job.record.status = RunStatus::Failed;
        job.record.reason = e.what();
      }
      events.append({{"event", "run"}, {"run_id", job.record.run_id()},
                     {"status", std::string(to_string(job.record.status))}});
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), std::max<std::size_t>(jobs.size(), 1));
    for (std::size_t t = 1; t < n; ++t) {
      pool.emplace_back(worker);
    }
    worker();
  }

  std::vector<RunOutputs> finished;
  for (auto& job : jobs) {
    auto& rec = job.record;
    if (job.outputs) {
      const auto dir = root / rec.dir;
      const int n = ann.set.scheme(rec.scheme_id).n_classes();
      const auto m = confusion_matrix(job.outputs->predictions, n, rec.run_id());
      write_text_file(dir / "confusion.json", confusion_to_json(m));
      write_text_file(dir / "confusion.csv", confusion_to_csv(m));
      rec.matrix_json = relative_to(dir / "confusion.json", root);
      rec.accuracy = m.accuracy();
      rec.predictions_digest = sha256_file(dir / run_files::kPredictions);
      finished.push_back(std::move(*job.outputs));
    }
    ledger.runs.push_back(std::move(rec));
  }

  for (const auto& a : analyze_runs(finished, config.thresholds, config.exclusion_policy, root / "analysis")) {
    ledger.analyses.push_back(AnalysisRecord{a.model_id, a.n_classes, relative_to(a.matrix_json, root),
                                             relative_to(a.matrix_csv, root), relative_to(a.report_json, root),
                                             sha256_hex(read_text_file(a.matrix_json) + read_text_file(a.report_json))});
  }

  for (const auto& id : set_ids) {
    std::vector<std::optional<std::string>> scopes{std::nullopt};
    std::set<std::string> schemes;
    for (const auto& r : finished) {
      schemes.insert(r.manifest.scheme_id);
    }
    for (const auto& s : schemes) {
      scopes.emplace_back(s);
    }
    for (const auto& scope : scopes) {
      const auto dir = root / "attribution" / id / (scope ? *scope : std::string("all"));
      const auto res = attribute_runs(cuts[id], finished, scope, config.tally_mode, config.exclusion_policy, dir);
      AttributionRecord rec{id, res.scope, relative_to(res.verdict_path, root),
                            std::string(to_string(res.verdicts.tally.final_verdict)), {},
                            sha256_file(res.verdict_path)};
      for (const auto& h : res.heatmaps) {
        rec.score_tables.push_back(relative_to(h, root));
      }
      ledger.attributions.push_back(std::move(rec));
    }
  }

  write_text_file(root / "ledger.json", ledger_to_json(ledger));
  return ledger;
}

int experiment_exit_code(const ExperimentLedger& ledger) noexcept {
  const auto failed = ledger.count(RunStatus::Failed);
  if (failed == 0) {
    return 0;
  }
  return failed == ledger.runs.size() ? 3 : 2;
}

} // namespace scribe
