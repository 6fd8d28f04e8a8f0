#include <doctest.h>

#include "temp_dir.hpp"

#include <scribe/dataset_io.hpp>
#include <scribe/experiment.hpp>
#include <scribe/util.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

using namespace scribe;
using scribe::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(SCRIBE_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_config(const fs::path& path, const std::string& backends) {
  write_text_file(path, R"({"annotations": "fx/annotations.json", "dataset_types": ["v01"], "seeds": [1033, 1931],
    "augmentation": {"shine_factors": [1.0], "shift_offsets_h": [0], "shift_offsets_v": [0]},
    "backends": )" + backends + R"(, "output_root": "exp"})");
}

} // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("") == 1);
  CHECK(cli("nonsense") == 1);
  CHECK(cli("build-dataset --type v01") == 1);
  CHECK(cli("--help") == 0);
}

TEST_CASE("step-by-step pipeline") {
  TempDir tmp;
  REQUIRE(cli("synth --pieces 4 --out " + q(tmp / "fx")) == 0);
  write_config(tmp / "cfg.json", "[]");
  const auto ann = tmp / "fx" / "annotations.json";
  REQUIRE(cli("build-dataset --annotations " + q(ann) + " --type v01 --seed 1033 --config " + q(tmp / "cfg.json") +
              " --out " + q(tmp / "ds")) == 0);
  CHECK(cli("build-dataset --annotations " + q(ann) + " --type v7 --seed 1 --out " + q(tmp / "bad")) == 1);

  const int size = read_dataset(tmp / "ds", false).tile_size;
  REQUIRE(cli("build-external --annotations " + q(ann) + " --set held-out --tile-size " + std::to_string(size) +
              " --out " + q(tmp / "ext")) == 0);
  CHECK(cli("build-external --annotations " + q(ann) + " --set nope --tile-size 48 --out " + q(tmp / "x")) == 1);

  RunManifest m;
  m.model_id = std::string(kBaselineModel);
  m.dataset_type = "v01";
  m.seed = 1033;
  write_run_manifest(m, tmp / "manifest.json");
  REQUIRE(cli("run --backend baseline --dataset " + q(tmp / "ds") + " --manifest " + q(tmp / "manifest.json") +
              " --external " + q(tmp / "ext") + " --out " + q(tmp / "runs" / "r1")) == 0);
  CHECK(read_run_manifest(tmp / "runs" / "r1" / "run_manifest.json").status == RunStatus::Completed);

  // A failing external backend is a total failure of the single run.
  RunManifest m2 = m;
  m2.model_id = "vgg19";
  m2.training_config = TrainingConfig::preset_for("vgg19");
  write_run_manifest(m2, tmp / "m2.json");
  CHECK(cli("run --backend exec:" + std::string(SCRIBE_STUB_BACKEND) + " --dataset " + q(tmp / "ds") +
                " --manifest " + q(tmp / "m2.json") + " --out " + q(tmp / "runs" / "r2"),
            "SCRIBE_STUB_MODE=fail") == 3);

  REQUIRE(cli("analyze --runs " + q(tmp / "runs") + " --out " + q(tmp / "analysis")) == 0);
  CHECK(fs::exists(tmp / "analysis" / "baseline-centroid_4class" / "similarity.json"));
  CHECK(cli("analyze --runs " + q(tmp / "nothing-here") + " --out " + q(tmp / "a2")) == 1);

  REQUIRE(cli("attribute --tiles " + q(tmp / "ext") + " --runs '" + (tmp / "runs").string() +
              "/r*' --scheme classes4 --out " + q(tmp / "attr")) == 0);
  const auto verdicts = tmp / "attr" / "verdicts.json";
  REQUIRE(fs::exists(verdicts));
  CHECK(read_text_file(verdicts).find("\"final\": \"Author2\"") != std::string::npos);

  REQUIRE(cli("vote --verdicts " + q(verdicts) + " --tally per-tile --out " + q(tmp / "v2.json")) == 0);
  CHECK(fs::exists(tmp / "v2.json"));
  CHECK(cli("vote --verdicts " + q(verdicts) + " --tally sideways") == 1);
}

TEST_CASE("experiment exit codes and report") {
  TempDir tmp;
  REQUIRE(cli("synth --pieces 4 --out " + q(tmp / "fx")) == 0);

  write_config(tmp / "none.json", "[]");
  CHECK(cli("experiment --config " + q(tmp / "none.json")) == 1);

  write_config(tmp / "ok.json", R"([{"model_id": "baseline-centroid", "backend": "baseline"}])");
  CHECK(cli("experiment --report --config " + q(tmp / "ok.json")) == 0);
  CHECK(fs::exists(tmp / "exp" / "report" / "report.md"));
  CHECK(cli("report --ledger " + q(tmp / "exp")) == 0);

  const std::string stub = std::string("\"exec:") + SCRIBE_STUB_BACKEND + "\"";
  write_config(tmp / "mixed.json",
               R"([{"model_id": "baseline-centroid", "backend": "baseline"}, {"model_id": "vgg19", "backend": )" +
                   stub + "}]");
  CHECK(cli("experiment --config " + q(tmp / "mixed.json") + " --out " + q(tmp / "mixed"), "SCRIBE_STUB_MODE=fail") ==
        2);
  write_config(tmp / "dead.json", R"([{"model_id": "vgg19", "backend": )" + stub + "}]");
  CHECK(cli("experiment --config " + q(tmp / "dead.json") + " --out " + q(tmp / "dead"), "SCRIBE_STUB_MODE=fail") ==
        3);

  fs::remove_all(tmp / "exp" / "analysis");
  CHECK(cli("report --ledger " + q(tmp / "exp")) == 1);
}
