#include <doctest.h>

#include "fixtures.hpp"
#include "temp_dir.hpp"

#include <scribe/errors.hpp>
#include <scribe/experiment.hpp>
#include <scribe/util.hpp>

#include <cstdlib>

using namespace scribe;
using scribe::testing::TempDir;

namespace {

ExperimentConfig small_config(const TempDir& tmp, const std::string& root = "out") {
  const auto fx = scribe::testing::small_fixture(tmp / "fx");
  ExperimentConfig c;
  c.annotation_file = fx.annotation_path;
  c.dataset_types = {"v01", "v001"};
  c.seeds = {1033, 1931};
  c.backends = {BackendEntry{std::string(kBaselineModel), BackendSpec{}}};
  c.augmentation = AugmentationParams::identity();
  c.output_root = tmp / root;
  return c;
}

BackendEntry stub(const std::string& model) {
  return BackendEntry{model, BackendSpec::parse(std::string("exec:") + SCRIBE_STUB_BACKEND)};
}

std::size_t count_files(const std::filesystem::path& dir, const std::string& ext) {
  std::size_t n = 0;
  if (!std::filesystem::exists(dir)) return 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    n += e.path().extension() == ext ? 1 : 0;
  }
  return n;
}

} // namespace

TEST_CASE("config validation") {
  TempDir tmp;
  auto c = small_config(tmp);
  CHECK_NOTHROW(c.validate());
  c.backends.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config(tmp);
  c.seeds = {1, 1};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config(tmp);
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config(tmp);
  c.dataset_types = {"v9"};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config(tmp);
  c.backends.push_back(c.backends.front());
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config(tmp);
  c.backends = {BackendEntry{"vgg19", BackendSpec{}}};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(run_experiment(ExperimentConfig{}), ValidationError);
}

TEST_CASE("config JSON defaults and round trip") {
  TempDir tmp;
  write_text_file(tmp / "cfg" / "c.json",
                  R"({"annotations": "ann.json", "backends": [{"model_id": "vgg19", "backend": "exec:bin/train"}]})");
  const auto c = experiment_config_from_json(read_text_file(tmp / "cfg" / "c.json"), tmp / "cfg");
  CHECK(c.annotation_file == tmp / "cfg" / "ann.json");
  CHECK(c.seeds == std::vector<std::uint64_t>{1033, 1931, 2201, 4179, 9325});
  CHECK(c.dataset_types.size() == 8);
  CHECK(c.backends.at(0).backend.executable == tmp / "cfg" / "bin" / "train");
  CHECK(c.exclusion_policy == ExclusionPolicy::Exclude);
  CHECK(c.tally_mode == TallyMode::PerRun);

  const auto again = experiment_config_from_json(experiment_config_to_json(c), "/elsewhere");
  CHECK(experiment_config_to_json(again) == experiment_config_to_json(c));
  CHECK_THROWS_AS(experiment_config_from_json("{}", tmp.path()), ParseError);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"annotations": "a", "tally_mode": "x"})", tmp.path()),
                  ValidationError);
}

TEST_CASE("baseline experiment over two types and two seeds") {
  TempDir tmp;
  const auto c = small_config(tmp);
  const auto ledger = run_experiment(c);

  CHECK(ledger.datasets.size() == 4);
  REQUIRE(ledger.runs.size() == 4);
  CHECK(ledger.count(RunStatus::Completed) == 4);
  CHECK(experiment_exit_code(ledger) == 0);

  for (const auto& r : ledger.runs) {
    CAPTURE(r.run_id());
    CHECK(std::filesystem::exists(c.output_root / r.dir / "predictions.jsonl"));
    REQUIRE(std::filesystem::exists(c.output_root / r.matrix_json));
    // Matrix total equals the number of test tiles of the dataset it came from.
    const auto m = confusion_from_json(read_text_file(c.output_root / r.matrix_json));
    const auto& ds = *std::find_if(ledger.datasets.begin(), ledger.datasets.end(), [&](const DatasetRecord& d) {
      return d.dataset_type == r.dataset_type && d.seed == r.seed;
    });
    CHECK(static_cast<std::size_t>(m.total()) == ds.test_tiles);
    CHECK(r.accuracy.value() == doctest::Approx(static_cast<double>(m.diagonal_mass()) / m.total()));
  }

  // One summed matrix per (model, scheme).
  REQUIRE(ledger.analyses.size() == 2);
  CHECK(ledger.analyses[0].n_classes == 4);
  CHECK(ledger.analyses[1].n_classes == 8);

  // Attribution: all, plus each scheme.
  REQUIRE(ledger.attributions.size() == 3);
  CHECK(ledger.attributions[0].scope == "all");
  CHECK(ledger.attributions[0].score_tables.size() == 4);
  CHECK(ledger.attributions[0].final_verdict == "Author2");

  // The ledger on disk reads back to the same document.
  const auto back = read_ledger(c.output_root);
  CHECK(ledger_to_json(back) == ledger_to_json(ledger));
  CHECK(back.summary_digest() == ledger.summary_digest());
}

TEST_CASE("rerunning an identical config reproduces every digest") {
  TempDir tmp;
  const auto c = small_config(tmp);
  const auto first = run_experiment(c);
  const auto text = read_text_file(c.output_root / "ledger.json");
  const auto second = run_experiment(c);
  CHECK(read_text_file(c.output_root / "ledger.json") == text);
  CHECK(first.summary_digest() == second.summary_digest());
}

TEST_CASE("parallel scheduling gives the same ledger") {
  TempDir tmp;
  auto c = small_config(tmp, "serial");
  const auto serial = run_experiment(c);
  c.output_root = tmp / "parallel";
  c.parallelism = 3;
  const auto parallel = run_experiment(c);
  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].predictions_digest == parallel.runs[i].predictions_digest);
  }
  for (std::size_t i = 0; i < serial.attributions.size(); ++i) {
    CHECK(serial.attributions[i].digest == parallel.attributions[i].digest);
  }
}

TEST_CASE("failures are isolated per run") {
  TempDir tmp;
  ::setenv("SCRIBE_STUB_MODE", "fail", 1);
  auto c = small_config(tmp);
  c.backends.push_back(stub("vgg19"));
  const auto ledger = run_experiment(c);
  CHECK(ledger.count(RunStatus::Completed) == 4);
  CHECK(ledger.count(RunStatus::Failed) == 4);
  CHECK(experiment_exit_code(ledger) == 2);
  for (const auto& r : ledger.runs) {
    if (r.status == RunStatus::Failed) {
      CHECK(r.reason.find("status 3") != std::string::npos);
      CHECK(r.matrix_json.empty());
    }
  }

  c.backends = {stub("vgg19")};
  c.output_root = tmp / "all-failed";
  const auto dead = run_experiment(c);
  CHECK(experiment_exit_code(dead) == 3);
  CHECK(dead.analyses.empty());
}

TEST_CASE("report bundle") {
  TempDir tmp;
  auto c = small_config(tmp);
  ::setenv("SCRIBE_STUB_MODE", "diverge", 1);
  c.backends.push_back(stub("vgg19"));
  const auto ledger = run_experiment(c);
  CHECK(ledger.count(RunStatus::Excluded) == 4);
  const auto files = render_report(ledger);

  const auto report = c.output_root / "report";
  // Excluded runs never enter the summed matrices: only the baseline has
  // heatmaps, one per scheme.
  CHECK(count_files(report / "confusion", ".svg") == 2);
  CHECK(count_files(report / "curves", ".svg") == 2);
  CHECK(count_files(report / "scores", ".svg") == 8);
  const auto md = read_text_file(report / "report.md");
  CHECK(md.find("## Excluded runs") != std::string::npos);
  CHECK(md.find("- vgg19/v01/1033 (excluded): ") != std::string::npos);
  CHECK(md.find("## Similarity") != std::string::npos);
  for (const auto& f : files) {
    CHECK(std::filesystem::exists(f));
  }

  // Tallies in the report equal the verdict files.
  const auto tallies = read_text_file(report / "tallies.csv");
  const auto vf = verdict_file_from_json(read_text_file(c.output_root / ledger.attributions[0].verdict_json));
  const auto& m = vf.tally.model(std::string(kBaselineModel));
  CHECK(tallies.find("held-out,all,baseline-centroid," + std::to_string(m.author1) + "," +
                     std::to_string(m.author2)) != std::string::npos);
}

TEST_CASE("report omits the similarity block when nothing was analysed") {
  TempDir tmp;
  auto c = small_config(tmp);
  ::setenv("SCRIBE_STUB_MODE", "diverge", 1);
  c.backends = {stub("vgg19")};
  const auto ledger = run_experiment(c);
  CHECK(ledger.analyses.empty());
  render_report(ledger);
  const auto md = read_text_file(c.output_root / "report" / "report.md");
  CHECK(md.find("## Similarity") == std::string::npos);
  CHECK(md.find("## Excluded runs") != std::string::npos);
}

TEST_CASE("report refuses a ledger whose artifacts are gone") {
  TempDir tmp;
  const auto c = small_config(tmp);
  const auto ledger = run_experiment(c);
  std::filesystem::remove(c.output_root / ledger.analyses[0].matrix_json);
  CHECK_THROWS_AS(render_report(ledger), ValidationError);
}

TEST_CASE("attribution picks the tile cut each run predicted") {
  TempDir tmp;
  const auto c = small_config(tmp);
  run_experiment(c);
  std::vector<RunOutputs> runs;
  for (const auto& e : std::filesystem::recursive_directory_iterator(c.output_root / "runs")) {
    if (e.path().filename() == "run_manifest.json") {
      runs.push_back(read_run_outputs(e.path().parent_path()));
    }
  }
  std::vector<LoadedExternalSet> cuts;
  for (const auto& e : std::filesystem::directory_iterator(c.output_root / "external")) {
    cuts.push_back(read_external_set(e.path(), false));
  }
  const auto res = attribute_runs(cuts, runs, std::string("classes8"), TallyMode::PerRun, ExclusionPolicy::Exclude,
                                  tmp / "attr");
  CHECK(res.verdicts.runs.size() == 2);
  CHECK(res.scope == "classes8");
  CHECK_THROWS_AS(attribute_runs({}, runs, std::nullopt, TallyMode::PerRun, ExclusionPolicy::Exclude, tmp / "x"),
                  ValidationError);
}
