#include "scribe/vote.hpp"

#include "json_io.hpp"
#include "scribe/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace scribe {

using detail::get;
using detail::json;

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
  case Verdict::Author1:
    return "Author1";
  case Verdict::Author2:
    return "Author2";
  case Verdict::Tie:
    return "Tie";
  }
  return "?";
}

std::string_view to_string(FinalVerdict v) noexcept {
  switch (v) {
  case FinalVerdict::Author1:
    return "Author1";
  case FinalVerdict::Author2:
    return "Author2";
  case FinalVerdict::Inconclusive:
    return "Inconclusive";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view text) {
  for (auto v : {Verdict::Author1, Verdict::Author2, Verdict::Tie}) {
    if (to_string(v) == text) {
      return v;
    }
  }
  throw ParseError("unknown verdict '" + std::string(text) + "'");
}

FinalVerdict final_verdict_from_string(std::string_view text) {
  for (auto v : {FinalVerdict::Author1, FinalVerdict::Author2, FinalVerdict::Inconclusive}) {
    if (to_string(v) == text) {
      return v;
    }
  }
  throw ParseError("unknown final verdict '" + std::string(text) + "'");
}

Verdict majority(std::size_t author1, std::size_t author2) noexcept {
  if (author1 > author2) {
    return Verdict::Author1;
  }
  if (author2 > author1) {
    return Verdict::Author2;
  }
  return Verdict::Tie;
}

std::vector<TileScore> score_external(const ExternalTileSet& tiles, std::span<const PredictionRecord> predictions,
                                      const ClassScheme& scheme) {
  std::unordered_map<std::string_view, const PredictionRecord*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.sample_id, &p).second) {
      throw ValidationError("duplicate record for tile '" + p.sample_id + "'");
    }
  }
  std::vector<TileScore> out;
  out.reserve(tiles.tiles.size());
  for (const auto& t : tiles.tiles) {
    const auto it = by_id.find(t.sample_id);
    if (it == by_id.end()) {
      throw ValidationError("missing record for tile '" + t.sample_id + "' of set '" + tiles.set_id + "'");
    }
    const auto& raw = it->second->raw_scores;
    if (static_cast<int>(raw.size()) != scheme.n_classes()) {
      throw ValidationError("tile '" + t.sample_id + "': score vector does not match scheme '" + scheme.id() + "'");
    }
    const auto top = top_class(raw);
    out.push_back(TileScore{t.sample_id, top.cls, scheme.author_of(top.cls), top.score, softmax(raw)});
  }
  if (by_id.size() != out.size()) {
    throw ValidationError("records for tiles outside set '" + tiles.set_id + "'");
  }
  return out;
}

std::string score_heatmap_csv(std::span<const TileScore> scores, int n_classes) {
  std::ostringstream out;
  out.precision(6);
  out << "sample_id";
  for (int c = 1; c <= n_classes; ++c) {
    out << ",Class " << c;
  }
  out << ",top_class,author\n";
  for (const auto& s : scores) {
    out << s.sample_id;
    for (double p : s.probabilities) {
      out << ',' << std::fixed << p;
    }
    out << ',' << s.cls << ',' << to_string(s.author) << '\n';
  }
  return out.str();
}

std::string RunVerdict::run_id() const {
  return model_id + "/" + dataset_type + "/" + std::to_string(seed);
}

RunVerdict run_verdict(const RunManifest& run, std::span<const Author> tile_authors) {
  if (tile_authors.empty()) {
    throw ValidationError("run " + run.run_id() + " scored no tiles");
  }
  RunVerdict v{run.model_id, run.dataset_type, run.seed, run.status, 0, 0, Verdict::Tie};
  for (auto a : tile_authors) {
    ++(a == Author::Author1 ? v.author1 : v.author2);
  }
  v.verdict = majority(v.author1, v.author2);
  return v;
}

RunVerdict run_verdict(const RunManifest& run, std::span<const TileScore> scores) {
  std::vector<Author> authors;
  authors.reserve(scores.size());
  for (const auto& s : scores) {
    authors.push_back(s.author);
  }
  return run_verdict(run, authors);
}

std::string_view to_string(TallyMode m) noexcept {
  return m == TallyMode::PerRun ? "per-run" : "per-tile";
}

TallyMode tally_mode_from_string(std::string_view text) {
  if (text == "per-run") {
    return TallyMode::PerRun;
  }
  if (text == "per-tile") {
    return TallyMode::PerTile;
  }
  throw ValidationError("tally mode must be 'per-run' or 'per-tile'");
}

const ModelTally& VoteTally::model(std::string_view model_id) const {
  for (const auto& m : models) {
    if (m.model_id == model_id) {
      return m;
    }
  }
  throw ValidationError("no tally for model '" + std::string(model_id) + "'");
}

VoteTally majority_vote(std::span<const RunVerdict> verdicts, TallyMode mode) {
  std::map<std::string, ModelTally> per_model;
  for (const auto& v : verdicts) {
    if (v.status == RunStatus::Excluded || v.status == RunStatus::Failed) {
      throw ValidationError("run " + v.run_id() + " is " + std::string(to_string(v.status)) +
                            " and cannot vote");
    }
    auto& t = per_model[v.model_id];
    t.model_id = v.model_id;
    if (mode == TallyMode::PerTile) {
      t.author1 += v.author1;
      t.author2 += v.author2;
      continue;
    }
    switch (v.verdict) {
    case Verdict::Author1:
      ++t.author1;
      break;
    case Verdict::Author2:
      ++t.author2;
      break;
    case Verdict::Tie:
      ++t.ties;
      break;
    }
  }

  VoteTally out;
  out.mode = mode;
  for (auto& [id, t] : per_model) {
    t.winner = majority(t.author1, t.author2);
    if (t.winner == Verdict::Author1) {
      ++out.models_for_author1;
    } else if (t.winner == Verdict::Author2) {
      ++out.models_for_author2;
    }
    out.models.push_back(t);
  }
  switch (majority(out.models_for_author1, out.models_for_author2)) {
  case Verdict::Author1:
    out.final_verdict = FinalVerdict::Author1;
    break;
  case Verdict::Author2:
    out.final_verdict = FinalVerdict::Author2;
    break;
  case Verdict::Tie:
    out.final_verdict = FinalVerdict::Inconclusive;
    break;
  }
  return out;
}

std::string verdict_file_to_json(const VerdictFile& file) {
  json runs = json::array();
  for (const auto& r : file.runs) {
    runs.push_back({{"model_id", r.model_id},
                    {"dataset_type", r.dataset_type},
                    {"seed", r.seed},
                    {"counts", {{"Author1", r.author1}, {"Author2", r.author2}}},
                    {"verdict", std::string(to_string(r.verdict))}});
  }
  json step1 = json::object();
  for (const auto& m : file.tally.models) {
    step1[m.model_id] = {{"Author1", m.author1},
                         {"Author2", m.author2},
                         {"Tie", m.ties},
                         {"winner", std::string(to_string(m.winner))}};
  }
  return json{{"set_id", file.set_id},
              {"tally_mode", std::string(to_string(file.tally.mode))},
              {"runs", runs},
              {"step1", step1},
              {"final", std::string(to_string(file.tally.final_verdict))}}
             .dump(2) +
         "\n";
}

VerdictFile verdict_file_from_json(std::string_view text, TallyMode mode) {
  const auto doc = detail::parse_json(text, "verdict file");
  VerdictFile f;
  f.set_id = get<std::string>(doc, "set_id", "verdict file");
  for (const auto& r : get<json>(doc, "runs", "verdict file")) {
    RunVerdict v;
    v.model_id = get<std::string>(r, "model_id", "verdict run");
    v.dataset_type = get<std::string>(r, "dataset_type", "verdict run");
    v.seed = get<std::uint64_t>(r, "seed", "verdict run");
    const auto counts = get<json>(r, "counts", "verdict run");
    v.author1 = get<std::size_t>(counts, "Author1", "verdict counts");
    v.author2 = get<std::size_t>(counts, "Author2", "verdict counts");
    v.verdict = verdict_from_string(get<std::string>(r, "verdict", "verdict run"));
    if (v.verdict != majority(v.author1, v.author2)) {
      throw ValidationError("verdict of run " + v.run_id() + " contradicts its counts");
    }
    f.runs.push_back(std::move(v));
  }
  f.tally = majority_vote(f.runs, mode);
  return f;
}

} // namespace scribe
