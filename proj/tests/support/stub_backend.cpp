// Stand-in training backend speaking the job-file protocol.
//
//   scribe_stub_backend train --job <job.json>
//
// Behaviour is chosen by SCRIBE_STUB_MODE:
//   echo          predict every test tile correctly (default)
//   omit-one      drop the last test prediction
//   wrong-length  emit one score too many per row
//   fail          exit with status 3 before writing anything
//   diverge       flat loss curve that never converges
//   short-curve   one loss entry fewer than the configured epochs
// External tiles are all predicted as SCRIBE_STUB_EXTERNAL_CLASS (default 1).

#include <scribe/backend.hpp>
#include <scribe/dataset_io.hpp>
#include <scribe/harness.hpp>
#include <scribe/util.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace scribe;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

PredictionRecord predict_as(const TileSample& tile, int cls, int n) {
  PredictionRecord r;
  r.sample_id = tile.sample_id;
  r.true_class = tile.true_class;
  r.raw_scores.assign(static_cast<std::size_t>(n), 0.0);
  r.raw_scores[static_cast<std::size_t>(cls - 1)] = 4.0;
  r.predicted_class = cls;
  return r;
}

} // namespace

int main(int argc, char** argv) {
  if (argc != 4 || std::string(argv[1]) != "train" || std::string(argv[2]) != "--job") {
    std::cerr << "usage: " << argv[0] << " train --job <file>\n";
    return 64;
  }
  const std::string mode = env_or("SCRIBE_STUB_MODE", "echo");
  const int ext_class = std::stoi(env_or("SCRIBE_STUB_EXTERNAL_CLASS", "1"));
  try {
    const auto job = backend_job_from_json(read_text_file(argv[3]));
    std::cout << "stub backend, mode " << mode << '\n';
    if (mode == "fail") {
      std::cerr << "simulated failure\n";
      return 3;
    }
    const auto manifest = read_run_manifest(job.run_manifest);
    const auto ds = read_dataset(job.dataset_dir, false);
    const int n = ds.scheme.n_classes();

    std::vector<PredictionRecord> preds;
    for (const auto& t : ds.test) {
      auto r = predict_as(t, *t.true_class, n);
      if (mode == "wrong-length") {
        r.raw_scores.push_back(0.0);
      }
      preds.push_back(std::move(r));
    }
    if (mode == "omit-one" && !preds.empty()) {
      preds.pop_back();
    }
    write_text_file(job.output_dir / run_files::kPredictions, predictions_to_jsonl(preds));

    LossCurve curve;
    const int epochs = manifest.training_config.epochs - (mode == "short-curve" ? 1 : 0);
    double loss = 2.0;
    for (int e = 0; e < epochs; ++e) {
      curve.losses.push_back(loss);
      if (mode != "diverge") {
        loss *= 0.5;
      }
    }
    write_text_file(job.output_dir / run_files::kLossCurve, loss_curve_to_json(curve));

    for (const auto& [set_id, dir] : job.external_sets) {
      const auto ext = read_external_set(dir, false);
      std::vector<PredictionRecord> ep;
      for (const auto& t : ext.set.tiles) {
        ep.push_back(predict_as(t, ext_class, n));
      }
      write_text_file(job.output_dir / run_files::kExternalDir / (set_id + ".jsonl"), predictions_to_jsonl(ep));
    }
  } catch (const std::exception& e) {
    std::cerr << "stub backend: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
