#include "scribe/backend.hpp"

#include "json_io.hpp"
#include "scribe/dataset_io.hpp"
#include "scribe/errors.hpp"
#include "scribe/util.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

extern char** environ;

namespace scribe {

using detail::get;
using detail::json;

namespace fs = std::filesystem;

std::string backend_job_to_json(const BackendJob& job) {
  json ext = json::array();
  for (const auto& [id, dir] : job.external_sets) {
    ext.push_back({{"set_id", id}, {"manifest", (dir / "manifest.json").string()}, {"dir", dir.string()}});
  }
  json doc = {{"dataset_manifest", (job.dataset_dir / "manifest.json").string()},
              {"dataset_dir", job.dataset_dir.string()},
              {"run_manifest", job.run_manifest.string()},
              {"output_dir", job.output_dir.string()},
              {"external_sets", ext}};
  return doc.dump(2) + "\n";
}

BackendJob backend_job_from_json(std::string_view text) {
  const auto doc = detail::parse_json(text, "backend job");
  BackendJob job;
  job.dataset_dir = get<std::string>(doc, "dataset_dir", "backend job");
  job.run_manifest = get<std::string>(doc, "run_manifest", "backend job");
  job.output_dir = get<std::string>(doc, "output_dir", "backend job");
  if (doc.contains("external_sets")) {
    for (const auto& e : doc.at("external_sets")) {
      job.external_sets[get<std::string>(e, "set_id", "external set")] = get<std::string>(e, "dir", "external set");
    }
  }
  return job;
}

BackendSpec BackendSpec::parse(std::string_view text) {
  if (text == "baseline") {
    return BackendSpec{};
  }
  if (text.starts_with("exec:") && text.size() > 5) {
    return BackendSpec{Kind::Exec, fs::path(std::string(text.substr(5)))};
  }
  throw ValidationError("backend must be 'baseline' or 'exec:<path>', got '" + std::string(text) + "'");
}

std::string BackendSpec::to_string() const {
  return kind == Kind::Baseline ? "baseline" : "exec:" + executable.string();
}

namespace {

struct PreparedRun {
  TileDataset dataset;
  std::vector<LoadedExternalSet> external;
  RunManifest manifest;
};

PreparedRun prepare(const RunRequest& req, bool load_pixels) {
  PreparedRun p;
  p.manifest = read_run_manifest(req.run_manifest);
  p.dataset = read_dataset(req.dataset_dir, load_pixels);
  if (p.manifest.dataset_type != p.dataset.spec.dataset_type) {
    throw ValidationError("run manifest targets '" + p.manifest.dataset_type + "' but dataset is '" +
                          p.dataset.spec.dataset_type + "'");
  }
  if (p.manifest.seed != p.dataset.spec.seed) {
    throw ValidationError("run manifest seed " + std::to_string(p.manifest.seed) +
                          " differs from dataset seed " + std::to_string(p.dataset.spec.seed));
  }
  for (const auto& dir : req.external_sets) {
    auto ext = read_external_set(dir, load_pixels);
    if (ext.set.tile_size != p.dataset.tile_size) {
      throw ValidationError("external set '" + ext.set.set_id + "' uses " + std::to_string(ext.set.tile_size) +
                            " px tiles, the dataset uses " + std::to_string(p.dataset.tile_size));
    }
    p.external.push_back(std::move(ext));
  }
  fs::create_directories(req.output_dir);
  return p;
}

void mark_failed(RunManifest m, const RunRequest& req, const std::string& reason) {
  m.status = RunStatus::Failed;
  m.exclusion_reason = reason;
  try {
    write_run_manifest(m, req.output_dir / run_files::kManifest);
  } catch (const std::exception&) {
    // Best effort; the original failure is what the caller needs.
  }
}

void finalize(RunOutputs& out, const TileDataset& dataset, const RunRequest& req) {
  out.manifest.scheme_id = dataset.scheme.id();
  out.manifest.status = RunStatus::Completed;
  out.manifest.exclusion_reason.reset();
  if (out.curve.losses.size() >= req.convergence.min_epochs &&
      assess_convergence(out.curve, req.convergence) == Convergence::NotConverged &&
      req.policy == ExclusionPolicy::Exclude) {
    out.manifest.status = RunStatus::Excluded;
    out.manifest.exclusion_reason = "loss curve did not converge";
  }
  write_run_manifest(out.manifest, req.output_dir / run_files::kManifest);
}

int spawn_and_wait(const fs::path& exe, const fs::path& job_path, const fs::path& log_path) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);

  std::string exe_s = exe.string();
  std::string job_s = job_path.string();
  std::string train = "train";
  std::string flag = "--job";
  char* argv[] = {exe_s.data(), train.data(), flag.data(), job_s.data(), nullptr};

  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe_s.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw BackendError("cannot launch backend " + exe_s + ": " + std::strerror(rc));
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw BackendError("waitpid failed: " + std::string(std::strerror(errno)));
    }
  }
  if (WIFEXITED(status)) {
    return WEXITSTATUS(status);
  }
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

} // namespace

RunOutputs invoke_external_backend(const fs::path& executable, const RunRequest& req) {
  auto prep = prepare(req, false);
  RunOutputs out;
  out.manifest = prep.manifest;
  try {
    BackendJob job{req.dataset_dir, req.run_manifest, req.output_dir, {}};
    for (std::size_t i = 0; i < prep.external.size(); ++i) {
      job.external_sets[prep.external[i].set.set_id] = req.external_sets[i];
    }
    const auto job_path = req.output_dir / run_files::kJob;
    write_text_file(job_path, backend_job_to_json(job));

    const int code = spawn_and_wait(executable, job_path, req.output_dir / run_files::kLog);
    if (code != 0) {
      throw BackendError("backend exited with status " + std::to_string(code));
    }
    const int n = prep.dataset.scheme.n_classes();
    try {
      out.predictions = read_predictions(req.output_dir / run_files::kPredictions, n);
      out.curve = loss_curve_from_json(read_text_file(req.output_dir / run_files::kLossCurve));
      for (const auto& ext : prep.external) {
        out.external[ext.set.set_id] =
            read_predictions(req.output_dir / run_files::kExternalDir / (ext.set.set_id + ".jsonl"), n);
      }
    } catch (const ParseError& e) {
      throw BackendError(std::string("schema violation: ") + e.what());
    } catch (const ValidationError& e) {
      throw BackendError(std::string("schema violation: ") + e.what());
    }
    validate_coverage(out.predictions, prep.dataset.test, n);
    for (const auto& ext : prep.external) {
      validate_coverage(out.external.at(ext.set.set_id), ext.set.tiles, n);
    }
    if (static_cast<int>(out.curve.losses.size()) != out.manifest.training_config.epochs) {
      throw BackendError("loss curve has " + std::to_string(out.curve.losses.size()) + " entries for " +
                         std::to_string(out.manifest.training_config.epochs) + " epochs");
    }
  } catch (const BackendError& e) {
    mark_failed(out.manifest, req, e.what());
    throw;
  }
  finalize(out, prep.dataset, req);
  return out;
}

RunOutputs invoke_baseline_backend(const RunRequest& req) {
  auto prep = prepare(req, true);
  RunOutputs out;
  out.manifest = prep.manifest;
  try {
    auto res = run_baseline(prep.dataset, prep.manifest);
    out.predictions = std::move(res.predictions);
    out.curve = std::move(res.curve);
    // Centroid fitting is one pass; the completed manifest records that.
    out.manifest.training_config = TrainingConfig::preset_for(kBaselineModel);
    write_predictions(out.predictions, req.output_dir / run_files::kPredictions);
    write_text_file(req.output_dir / run_files::kLossCurve, loss_curve_to_json(out.curve));
    for (const auto& ext : prep.external) {
      auto preds = predict_tiles(res.model, ext.set.tiles);
      write_predictions(preds, req.output_dir / run_files::kExternalDir / (ext.set.set_id + ".jsonl"));
      out.external[ext.set.set_id] = std::move(preds);
    }
  } catch (const ValidationError& e) {
    mark_failed(out.manifest, req, e.what());
    throw BackendError(e.what());
  }
  finalize(out, prep.dataset, req);
  return out;
}

RunOutputs execute_run(const BackendSpec& backend, const RunRequest& request) {
  if (backend.kind == BackendSpec::Kind::Baseline) {
    return invoke_baseline_backend(request);
  }
  return invoke_external_backend(backend.executable, request);
}

RunOutputs read_run_outputs(const fs::path& run_dir) {
  RunOutputs out;
  out.manifest = read_run_manifest(run_dir / run_files::kManifest);
  if (out.manifest.status == RunStatus::Failed || out.manifest.status == RunStatus::Pending) {
    return out;
  }
  out.predictions = read_predictions(run_dir / run_files::kPredictions, 0);
  const int n_classes = out.predictions.empty() ? 0 : static_cast<int>(out.predictions.front().raw_scores.size());
  out.curve = loss_curve_from_json(read_text_file(run_dir / run_files::kLossCurve));
  const auto ext_dir = run_dir / run_files::kExternalDir;
  if (fs::is_directory(ext_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(ext_dir)) {
      if (e.path().extension() == ".jsonl") {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      out.external[f.stem().string()] = read_predictions(f, n_classes);
    }
  }
  return out;
}

} // namespace scribe
