#include "scribe/experiment.hpp"

#include "json_io.hpp"
#include "scribe/errors.hpp"
#include "scribe/svg.hpp"
#include "scribe/util.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

namespace scribe {

namespace fs = std::filesystem;

namespace {

fs::path existing(const fs::path& root, const std::string& rel, std::string_view what) {
  if (rel.empty()) {
    throw ValidationError(std::string(what) + " is not recorded in the ledger");
  }
  auto p = root / rel;
  if (!fs::exists(p)) {
    throw ValidationError(std::string(what) + " missing: " + p.string());
  }
  return p;
}

std::string file_safe(std::string text) {
  std::replace(text.begin(), text.end(), '/', '_');
  return text;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

std::vector<std::string> class_labels(int n) {
  std::vector<std::string> labels;
  for (int c = 1; c <= n; ++c) {
    labels.push_back("Class " + std::to_string(c));
  }
  return labels;
}

/// Score table CSV back into a tiles x classes grid.
svg::Grid score_grid(const std::string& csv, const std::string& title) {
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  if (header.size() < 4) {
    throw ValidationError("score table '" + title + "' has no class columns");
  }
  const auto n = header.size() - 3;
  svg::Grid g;
  g.title = title;
  g.integer_cells = false;
  g.col_labels.assign(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("score table '" + title + "' has a ragged row");
    }
    g.row_labels.push_back(cells[0]);
    for (std::size_t c = 0; c < n; ++c) {
      g.values.push_back(std::stod(cells[1 + c]));
    }
  }
  return g;
}

std::string fmt(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

} // namespace

std::vector<fs::path> render_report(const ExperimentLedger& ledger) {
  const fs::path& root = ledger.root;
  const fs::path out = root / "report";
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p, const std::string& text) {
    write_text_file(p, text);
    written.push_back(p);
  };

  const auto config = detail::parse_json(ledger.config_json, "config snapshot");
  const auto mode = tally_mode_from_string(config.value("tally_mode", std::string("per-run")));

  std::ostringstream runs_csv;
  runs_csv << "run_id,model_id,dataset_type,seed,scheme_id,status,accuracy,reason\n";
  for (const auto& r : ledger.runs) {
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    runs_csv << r.run_id() << ',' << r.model_id << ',' << r.dataset_type << ',' << r.seed << ',' << r.scheme_id
             << ',' << to_string(r.status) << ',' << (r.accuracy ? fmt(*r.accuracy, 4) : "") << ',' << reason
             << '\n';
  }
  emit(out / "runs.csv", runs_csv.str());

  // Confusion heatmaps.
  std::vector<std::pair<const AnalysisRecord*, SimilarityReport>> analyses;
  for (const auto& a : ledger.analyses) {
    const auto m = confusion_from_json(read_text_file(existing(root, a.matrix_json, "summed confusion matrix")));
    existing(root, a.report_json, "similarity report");
    svg::Grid g;
    g.title = a.model_id + ", " + std::to_string(a.n_classes) + " classes, summed over runs";
    g.row_labels = class_labels(m.n());
    g.col_labels = g.row_labels;
    for (auto v : m.counts()) {
      g.values.push_back(static_cast<double>(v));
    }
    emit(out / "confusion" / (file_safe(a.model_id) + "_" + std::to_string(a.n_classes) + "class.svg"),
         svg::heatmap(g));
    RelationThresholds t;
    if (config.contains("thresholds")) {
      const auto& tj = config.at("thresholds");
      t.near_zero_fraction = tj.value("near_zero_fraction", t.near_zero_fraction);
      t.much_greater_factor = tj.value("much_greater_factor", t.much_greater_factor);
      t.comparable_low = tj.value("comparable_low", t.comparable_low);
      t.comparable_high = tj.value("comparable_high", t.comparable_high);
    }
    analyses.emplace_back(&a, similarity_report(a.model_id, m, t));
  }

  // Learning curves, one plot per model.
  std::map<std::string, std::vector<svg::Series>> curves;
  for (const auto& r : ledger.runs) {
    if (r.status != RunStatus::Completed && r.status != RunStatus::Excluded) {
      continue;
    }
    const auto path = existing(root, r.dir, "run directory") / "loss_curve.json";
    if (!fs::exists(path)) {
      throw ValidationError("loss curve missing: " + path.string());
    }
    curves[r.model_id].push_back(
        svg::Series{r.dataset_type + "/" + std::to_string(r.seed), loss_curve_from_json(read_text_file(path)).losses});
  }
  for (const auto& [model, series] : curves) {
    emit(out / "curves" / (file_safe(model) + ".svg"), svg::line_plot(model + " training loss", series, "epoch", "loss"));
  }

  // Score heatmaps and tallies.
  std::ostringstream tallies;
  tallies << "set_id,scope,model_id,author1,author2,ties,winner,final\n";
  std::vector<std::pair<const AttributionRecord*, VerdictFile>> verdicts;
  for (const auto& a : ledger.attributions) {
    auto vf = verdict_file_from_json(read_text_file(existing(root, a.verdict_json, "verdict file")), mode);
    for (const auto& table : a.score_tables) {
      const auto csv = read_text_file(existing(root, table, "score table"));
      const auto stem = fs::path(table).stem().string();
      emit(out / "scores" / a.set_id / a.scope / (stem + ".svg"), svg::heatmap(score_grid(csv, stem)));
    }
    for (const auto& m : vf.tally.models) {
      tallies << a.set_id << ',' << a.scope << ',' << m.model_id << ',' << m.author1 << ',' << m.author2 << ','
              << m.ties << ',' << to_string(m.winner) << ',' << to_string(vf.tally.final_verdict) << '\n';
    }
    verdicts.emplace_back(&a, std::move(vf));
  }
  emit(out / "tallies.csv", tallies.str());

  std::ostringstream md;
  md << "# Attribution experiment report\n\n";
  md << "Runs: " << ledger.runs.size() << " (completed " << ledger.count(RunStatus::Completed) << ", excluded "
     << ledger.count(RunStatus::Excluded) << ", failed " << ledger.count(RunStatus::Failed) << ")\n\n";
  md << "Ledger digest: `" << ledger.summary_digest() << "`\n\n";

  md << "## Runs\n\n| run | scheme | status | accuracy |\n|---|---|---|---|\n";
  for (const auto& r : ledger.runs) {
    md << "| " << r.run_id() << " | " << r.scheme_id << " | " << to_string(r.status) << " | "
       << (r.accuracy ? fmt(*r.accuracy, 4) : "-") << " |\n";
  }
  md << '\n';

  md << "## Excluded runs\n\n";
  bool any = false;
  for (const auto& r : ledger.runs) {
    if (r.status == RunStatus::Excluded || r.status == RunStatus::Failed) {
      md << "- " << r.run_id() << " (" << to_string(r.status) << "): " << r.reason << '\n';
      any = true;
    }
  }
  md << (any ? "\n" : "None.\n\n");

  if (!analyses.empty()) {
    md << "## Similarity\n\n";
    for (const auto& [a, rep] : analyses) {
      md << "### " << a->model_id << ", " << a->n_classes << " classes\n\n";
      md << "![confusion](confusion/" << file_safe(a->model_id) << "_" << a->n_classes << "class.svg)\n\n";
      md << "| pair | similarity |\n|---|---|\n";
      for (const auto& [key, v] : rep.pairs) {
        md << "| " << rep.label(key) << " | " << v << " |\n";
      }
      md << "\nReference mass: " << rep.reference_mass << "\n\n| relation | holds | detail |\n|---|---|---|\n";
      for (const auto& rel : rep.relations) {
        md << "| " << rel.name << " | " << (rel.holds ? "yes" : "no") << " | " << rel.branch << " |\n";
      }
      md << '\n';
    }
  }

  if (!verdicts.empty()) {
    md << "## Attribution\n\nTally mode: " << to_string(mode) << "\n\n";
    md << "| set | scope | model | Author1 | Author2 | ties | model verdict |\n|---|---|---|---|---|---|---|\n";
    for (const auto& [a, vf] : verdicts) {
      for (const auto& m : vf.tally.models) {
        md << "| " << a->set_id << " | " << a->scope << " | " << m.model_id << " | " << m.author1 << " | "
           << m.author2 << " | " << m.ties << " | " << to_string(m.winner) << " |\n";
      }
    }
    md << '\n';
    for (const auto& [a, vf] : verdicts) {
      md << "- " << a->set_id << " (" << a->scope << "): **" << to_string(vf.tally.final_verdict) << "**\n";
    }
    md << '\n';
  }

  if (!curves.empty()) {
    md << "## Learning curves\n\n";
    for (const auto& [model, series] : curves) {
      md << "![" << model << "](curves/" << file_safe(model) << ".svg)\n";
    }
    md << '\n';
  }
  emit(out / "report.md", md.str());
  return written;
}

} // namespace scribe
