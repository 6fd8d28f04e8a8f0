#include <doctest.h>

#include "temp_dir.hpp"

#include <scribe/errors.hpp>
#include <scribe/harness.hpp>
#include <scribe/util.hpp>

#include <cmath>

using namespace scribe;
using scribe::testing::TempDir;

TEST_CASE("softmax normalises and survives large inputs") {
  const std::vector<double> v{1000.0, 1001.0, 999.0};
  const auto p = softmax(v);
  double s = 0;
  for (double x : p) s += x;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[1] > p[0]);
  CHECK(p[0] > p[2]);
  CHECK_THROWS_AS(softmax(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(softmax(std::vector<double>{1.0, NAN}), ValidationError);
}

TEST_CASE("argmax is 1-indexed and the lowest index wins ties") {
  CHECK(argmax_class(std::vector<double>{0.1, 0.7, 0.2}) == 2);
  CHECK(argmax_class(std::vector<double>{0.5, 0.5, 0.1}) == 1);
  CHECK(argmax_class(std::vector<double>{-3, -1, -1}) == 2);
  const auto t = top_class(std::vector<double>{0.0, 0.0});
  CHECK(t.cls == 1);
  CHECK(t.score == doctest::Approx(0.5));
}

TEST_CASE("training presets") {
  CHECK(TrainingConfig::preset_for("vgg19").input_resize == 224);
  CHECK(TrainingConfig::preset_for("inceptionv3").input_resize == 299);
  const auto vgg = TrainingConfig::preset_for("resnet50");
  CHECK(vgg.epochs == 50);
  CHECK(vgg.optimizer_name == "Adam");
  CHECK(vgg.learning_rate == doctest::Approx(1e-4));
  CHECK(vgg.batch_size == 16);
  CHECK(TrainingConfig::preset_for(kBaselineModel).epochs == 1);
}

TEST_CASE("run manifest JSON round trip and validation") {
  RunManifest m;
  m.model_id = "vgg19";
  m.dataset_type = "v04";
  m.seed = 4179;
  m.training_config = TrainingConfig::preset_for("vgg19");
  m.status = RunStatus::Excluded;
  m.exclusion_reason = "did not converge";
  m.scheme_id = "c4";
  CHECK(run_manifest_from_json(run_manifest_to_json(m)) == m);
  CHECK(m.run_id() == "vgg19/v04/4179");

  m.model_id = "";
  CHECK_THROWS_AS(m.validate(), ValidationError);
  CHECK_THROWS_AS(run_manifest_from_json("{\"model_id\": 3}"), ParseError);
  CHECK_THROWS_AS(run_status_from_string("done"), ParseError);
}

TEST_CASE("predictions JSONL round trip") {
  std::vector<PredictionRecord> recs{{"a/a000/0_0", 1, {2.0, 1.0, 0.0, -1.0}, 1},
                                     {"b/a000/0_0", std::nullopt, {0.0, 3.0, 0.0, 0.0}, 2}};
  const auto text = predictions_to_jsonl(recs);
  CHECK(parse_predictions(text, 4) == recs);
  CHECK(parse_predictions(text, 0) == recs);
  CHECK(text.find("\"true_class\":null") != std::string::npos);
}

TEST_CASE("prediction rows are checked") {
  CHECK_THROWS_AS(parse_predictions(R"({"sample_id":"a","true_class":1,"raw_scores":[1,0],"predicted_class":2})", 2),
                  ValidationError);
  CHECK_THROWS_AS(parse_predictions(R"({"sample_id":"a","true_class":1,"raw_scores":[1,0,0],"predicted_class":1})", 2),
                  ValidationError);
  CHECK_THROWS_AS(parse_predictions(R"({"sample_id":"a","true_class":3,"raw_scores":[1,0],"predicted_class":1})", 2),
                  ValidationError);
  CHECK_THROWS_AS(parse_predictions("{\"sample_id\":", 2), ParseError);
  CHECK_THROWS_AS(parse_predictions(R"({"sample_id":"a","raw_scores":[1,0],"predicted_class":1})", 2), ParseError);
}

TEST_CASE("coverage detects missing, extra and mislabeled rows") {
  std::vector<TileSample> tiles(2);
  tiles[0].sample_id = "a";
  tiles[0].true_class = 1;
  tiles[1].sample_id = "b";
  tiles[1].true_class = 2;
  std::vector<PredictionRecord> ok{{"a", 1, {1, 0}, 1}, {"b", 2, {0, 1}, 2}};
  CHECK_NOTHROW(validate_coverage(ok, tiles, 2));
  auto missing = ok;
  missing.pop_back();
  CHECK_THROWS_AS(validate_coverage(missing, tiles, 2), BackendError);
  auto dup = ok;
  dup[1].sample_id = "a";
  CHECK_THROWS_AS(validate_coverage(dup, tiles, 2), BackendError);
  auto extra = ok;
  extra.push_back({"c", 1, {1, 0}, 1});
  CHECK_THROWS_AS(validate_coverage(extra, tiles, 2), BackendError);
  auto wrong = ok;
  wrong[0].true_class = 2;
  CHECK_THROWS_AS(validate_coverage(wrong, tiles, 2), BackendError);
}

TEST_CASE("convergence rule") {
  LossCurve down;
  for (int e = 0; e < 50; ++e) down.losses.push_back(2.0 * std::pow(0.8, e));
  CHECK(assess_convergence(down) == Convergence::Converged);

  LossCurve flat{std::vector<double>(50, 1.5)};
  CHECK(assess_convergence(flat) == Convergence::NotConverged);

  // mean(last 5) = 0.08 against max(0.05, 0.05 * 2.0) = 0.1
  LossCurve edge{std::vector<double>(20, 2.0)};
  for (int e = 15; e < 20; ++e) edge.losses[static_cast<std::size_t>(e)] = 0.08;
  CHECK(assess_convergence(edge) == Convergence::Converged);
  edge.losses[19] = 0.2;
  CHECK(assess_convergence(edge) == Convergence::NotConverged);

  CHECK_THROWS_AS(assess_convergence(LossCurve{{1, 0.5, 0.2}}), ValidationError);
  CHECK(loss_curve_from_json(loss_curve_to_json(down)) == down);
  CHECK_THROWS_AS(loss_curve_from_json("{\"a\":1}"), ParseError);
}

TEST_CASE("centroid classifier separates flat tiles") {
  std::vector<TileSample> train;
  for (int c = 1; c <= 3; ++c) {
    for (int k = 0; k < 3; ++k) {
      TileSample s;
      s.sample_id = std::to_string(c) + "-" + std::to_string(k);
      s.pixels = GrayImage(32, 32, static_cast<std::uint8_t>(c * 60 + k));
      s.true_class = c;
      train.push_back(std::move(s));
    }
  }
  CentroidClassifier model;
  model.fit(train, 3);
  CHECK(model.n_classes() == 3);
  const auto scores = model.raw_scores(GrayImage(32, 32, 121));
  CHECK(argmax_class(scores) == 2);
  CHECK(scores[1] <= 0.0);

  const auto f = CentroidClassifier::features(GrayImage(48, 48, 255));
  CHECK(f[0] == doctest::Approx(1.0));

  CentroidClassifier missing;
  CHECK_THROWS_AS(missing.fit(train, 4), ValidationError);
}

TEST_CASE("exclusion policy strings") {
  CHECK(exclusion_policy_from_string("include") == ExclusionPolicy::Include);
  CHECK(to_string(ExclusionPolicy::Exclude) == "exclude");
  CHECK_THROWS_AS(exclusion_policy_from_string("drop"), ValidationError);
}
