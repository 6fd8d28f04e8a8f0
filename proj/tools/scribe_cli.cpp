// scribe: command-line front end for the writer-attribution toolkit.

#include <scribe/annotations.hpp>
#include <scribe/backend.hpp>
#include <scribe/dataset_io.hpp>
#include <scribe/errors.hpp>
#include <scribe/experiment.hpp>
#include <scribe/synthetic.hpp>
#include <scribe/util.hpp>
#include <scribe/vote.hpp>

#include <CLI11.hpp>

#include <glob.h>

#include <algorithm>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace scribe;

namespace {

enum Exit { kOk = 0, kValidation = 1, kPartial = 2, kTotal = 3 };

/// Expands shell-style patterns, then collects every directory holding a
/// run manifest at or below each match.
std::vector<fs::path> find_run_dirs(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& pattern : patterns) {
    std::vector<fs::path> matches;
    glob_t g{};
    if (::glob(pattern.c_str(), GLOB_NOCHECK, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) {
        matches.emplace_back(g.gl_pathv[i]);
      }
    }
    globfree(&g);
    for (const auto& m : matches) {
      if (fs::is_regular_file(m) && m.filename() == run_files::kManifest) {
        found.insert(m.parent_path());
      } else if (fs::is_directory(m)) {
        if (fs::exists(m / run_files::kManifest)) {
          found.insert(m);
        }
        for (const auto& e : fs::recursive_directory_iterator(m)) {
          if (e.is_regular_file() && e.path().filename() == run_files::kManifest) {
            found.insert(e.path().parent_path());
          }
        }
      } else {
        throw ValidationError("no run directory matches '" + pattern + "'");
      }
    }
  }
  return {found.begin(), found.end()};
}

std::vector<RunOutputs> load_runs(const std::vector<std::string>& patterns) {
  std::vector<RunOutputs> runs;
  for (const auto& dir : find_run_dirs(patterns)) {
    runs.push_back(read_run_outputs(dir));
  }
  if (runs.empty()) {
    throw ValidationError("no runs found");
  }
  return runs;
}

ExperimentConfig load_config(const std::string& path) {
  const fs::path p(path);
  return experiment_config_from_json(read_text_file(p), p.parent_path());
}

void print_tally(const VoteTally& t) {
  for (const auto& m : t.models) {
    std::cout << m.model_id << ": Author1 " << m.author1 << ", Author2 " << m.author2 << ", ties " << m.ties
              << " -> " << to_string(m.winner) << '\n';
  }
  std::cout << "final: " << to_string(t.final_verdict) << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Writer attribution from confusion patterns of tile classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scribe 0.3.0");

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Cut, split, augment and tile annotated pieces");
  std::string b_ann, b_type, b_out, b_scheme, b_config;
  std::uint64_t b_seed = 0;
  build->add_option("--annotations", b_ann, "Annotation JSON")->required()->check(CLI::ExistingFile);
  build->add_option("--type", b_type, "Dataset type, e.g. v01 or v004")->required();
  build->add_option("--seed", b_seed, "Split seed")->required();
  build->add_option("--out", b_out, "Output directory")->required();
  build->add_option("--scheme", b_scheme, "Class scheme id (default: the scheme matching the type's class count)");
  build->add_option("--config", b_config, "Experiment config JSON supplying augmentation and split ratio")
      ->check(CLI::ExistingFile);

  // build-external
  auto* ext = app.add_subcommand("build-external", "Tile an unlabeled region set for attribution");
  std::string e_ann, e_set, e_out;
  int e_size = 0, e_stride = 20;
  ext->add_option("--annotations", e_ann, "Annotation JSON")->required()->check(CLI::ExistingFile);
  ext->add_option("--set", e_set, "External set id")->required();
  ext->add_option("--tile-size", e_size, "Tile size; use the training dataset's tile size")->required();
  ext->add_option("--stride", e_stride, "Tile stride in pixels")->check(CLI::PositiveNumber);
  ext->add_option("--out", e_out, "Output directory")->required();

  // run
  auto* run = app.add_subcommand("run", "Train and evaluate one run through a backend");
  std::string r_backend = "baseline", r_dataset, r_manifest, r_out, r_policy = "exclude";
  std::vector<std::string> r_external;
  run->add_option("--backend", r_backend, "baseline or exec:<path>");
  run->add_option("--dataset", r_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--manifest", r_manifest, "Run manifest JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", r_out, "Run output directory")->required();
  run->add_option("--external", r_external, "External tile set directories to predict")
      ->check(CLI::ExistingDirectory);
  run->add_option("--policy", r_policy, "Non-converged runs: exclude or include");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Sum confusion matrices per model and check relations");
  std::vector<std::string> a_runs;
  std::string a_out, a_policy = "exclude", a_config;
  analyze->add_option("--runs", a_runs, "Run directories or glob patterns")->required();
  analyze->add_option("--out", a_out, "Output directory")->required();
  analyze->add_option("--policy", a_policy, "exclude or include non-converged runs");
  analyze->add_option("--config", a_config, "Experiment config JSON supplying thresholds")->check(CLI::ExistingFile);

  // attribute
  auto* attribute = app.add_subcommand("attribute", "Score external tiles with trained runs and vote");
  std::vector<std::string> t_tiles, t_runs;
  std::string t_scheme, t_out, t_tally = "per-run", t_policy = "exclude";
  attribute->add_option("--tiles", t_tiles, "External tile set directories (one set, any tile sizes)")
      ->required()
      ->check(CLI::ExistingDirectory);
  attribute->add_option("--runs", t_runs, "Run directories or glob patterns")->required();
  attribute->add_option("--scheme", t_scheme, "Restrict to runs trained on this scheme");
  attribute->add_option("--out", t_out, "Output directory")->required();
  attribute->add_option("--tally", t_tally, "per-run or per-tile");
  attribute->add_option("--policy", t_policy, "exclude or include non-converged runs");

  // vote
  auto* vote = app.add_subcommand("vote", "Recompute the two-step vote of a verdict file");
  std::string v_file, v_tally = "per-run", v_out;
  vote->add_option("--verdicts", v_file, "verdicts.json")->required()->check(CLI::ExistingFile);
  vote->add_option("--tally", v_tally, "per-run or per-tile");
  vote->add_option("--out", v_out, "Write the recomputed verdict file here");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the full pipeline from a config");
  std::string x_config, x_out;
  int x_parallel = 0;
  bool x_report = false;
  experiment->add_option("--config", x_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", x_out, "Override the output root");
  experiment->add_option("--parallelism", x_parallel, "Override the number of concurrent runs");
  experiment->add_flag("--report", x_report, "Render the report when done");

  // report
  auto* report = app.add_subcommand("report", "Render the report bundle of a finished experiment");
  std::string p_root;
  report->add_option("--ledger", p_root, "Experiment output root holding ledger.json")
      ->required()
      ->check(CLI::ExistingDirectory);

  // synth
  auto* synth = app.add_subcommand("synth", "Write the two-hand synthetic fixture");
  std::string s_out;
  SyntheticConfig s_cfg;
  synth->add_option("--out", s_out, "Output directory")->required();
  synth->add_option("--seed", s_cfg.seed, "Rendering seed");
  synth->add_option("--pieces", s_cfg.pieces_per_class, "Pieces per class")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*build) {
      const auto ann = load_annotations(b_ann);
      const auto& info = dataset_type_info(b_type);
      const auto& scheme = b_scheme.empty() ? ann.set.scheme_with_classes(info.n_classes) : ann.set.scheme(b_scheme);
      AugmentationParams aug;
      double ratio = 0.8;
      if (!b_config.empty()) {
        const auto cfg = load_config(b_config);
        aug = cfg.augmentation;
        ratio = cfg.split_ratio;
      }
      auto spec = DatasetSpec::for_type(b_type, scheme, b_seed, aug);
      spec.split_ratio = ratio;
      const auto ds = build_dataset(ann.extract_pieces(scheme.id()), spec, scheme);
      write_dataset(ds, b_out);
      std::cout << "tile size " << ds.tile_size << ", train " << ds.train.size() << ", test " << ds.test.size()
                << '\n';
      return kOk;
    }
    if (*ext) {
      const auto ann = load_annotations(e_ann);
      const auto tiles = build_external_tiles(e_set, ann.extract_external(e_set), e_size, e_stride);
      write_external_set(tiles, ann.set.schemes, e_out);
      std::cout << tiles.tiles.size() << " tiles\n";
      return kOk;
    }
    if (*run) {
      RunRequest req;
      req.dataset_dir = r_dataset;
      req.run_manifest = r_manifest;
      req.output_dir = r_out;
      req.external_sets.assign(r_external.begin(), r_external.end());
      req.policy = exclusion_policy_from_string(r_policy);
      const auto spec = BackendSpec::parse(r_backend);
      fs::create_directories(r_out);
      // The manifest travels with the run so later stages can find it.
      const auto dest = fs::path(r_out) / run_files::kManifest;
      if (!fs::exists(dest) || !fs::equivalent(dest, r_manifest)) {
        write_run_manifest(read_run_manifest(r_manifest), dest);
      }
      req.run_manifest = dest;
      try {
        const auto outs = execute_run(spec, req);
        std::cout << outs.manifest.run_id() << ": " << to_string(outs.manifest.status) << '\n';
      } catch (const BackendError& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kTotal;
      }
      return kOk;
    }
    if (*analyze) {
      RelationThresholds thresholds;
      if (!a_config.empty()) {
        thresholds = load_config(a_config).thresholds;
      }
      const auto runs = load_runs(a_runs);
      const auto res = analyze_runs(runs, thresholds, exclusion_policy_from_string(a_policy), a_out);
      if (res.empty()) {
        throw ValidationError("no eligible runs to analyze");
      }
      for (const auto& a : res) {
        std::cout << a.model_id << " (" << a.n_classes << " classes)\n";
        for (const auto& r : a.report.relations) {
          std::cout << "  " << r.name << ": " << (r.holds ? "holds" : "fails");
          if (!r.branch.empty()) {
            std::cout << " [" << r.branch << "]";
          }
          std::cout << '\n';
        }
      }
      return kOk;
    }
    if (*attribute) {
      std::vector<LoadedExternalSet> cuts;
      for (const auto& d : t_tiles) {
        cuts.push_back(read_external_set(d, false));
      }
      const auto runs = load_runs(t_runs);
      std::optional<std::string> scope;
      if (!t_scheme.empty()) {
        scope = t_scheme;
      }
      const auto res = attribute_runs(cuts, runs, scope, tally_mode_from_string(t_tally),
                                      exclusion_policy_from_string(t_policy), t_out);
      print_tally(res.verdicts.tally);
      return kOk;
    }
    if (*vote) {
      const auto mode = tally_mode_from_string(v_tally);
      auto vf = verdict_file_from_json(read_text_file(v_file), mode);
      print_tally(vf.tally);
      if (!v_out.empty()) {
        write_text_file(v_out, verdict_file_to_json(vf));
      }
      return kOk;
    }
    if (*experiment) {
      auto cfg = load_config(x_config);
      if (!x_out.empty()) {
        cfg.output_root = x_out;
      }
      if (x_parallel > 0) {
        cfg.parallelism = x_parallel;
      }
      const auto ledger = run_experiment(cfg);
      std::cout << "runs: " << ledger.count(RunStatus::Completed) << " completed, "
                << ledger.count(RunStatus::Excluded) << " excluded, " << ledger.count(RunStatus::Failed)
                << " failed\n";
      for (const auto& a : ledger.attributions) {
        std::cout << a.set_id << " (" << a.scope << "): " << a.final_verdict << '\n';
      }
      if (x_report) {
        render_report(ledger);
      }
      std::cout << "ledger digest " << ledger.summary_digest() << '\n';
      return experiment_exit_code(ledger);
    }
    if (*report) {
      const auto files = render_report(read_ledger(p_root));
      std::cout << files.size() << " files written to " << (fs::path(p_root) / "report").string() << '\n';
      return kOk;
    }
    if (*synth) {
      const auto fx = write_synthetic_fixture(s_cfg, s_out);
      std::cout << fx.annotation_path.string() << '\n';
      return kOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kValidation;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kTotal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTotal;
  }
  return kOk;
}
