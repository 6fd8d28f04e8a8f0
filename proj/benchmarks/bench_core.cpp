#include <scribe/augment.hpp>
#include <scribe/dataset.hpp>
#include <scribe/harness.hpp>
#include <scribe/rng.hpp>
#include <scribe/similarity.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace scribe;

namespace {

GrayImage noise_image(int w, int h, std::uint64_t seed) {
  SplitMix64 rng(seed);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.next());
  return img;
}

void BM_TileOffsets(benchmark::State& state) {
  const int stride = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tile_offsets(1200, 480, 48, stride));
  }
}
BENCHMARK(BM_TileOffsets)->Arg(10)->Arg(20);

void BM_TilePiece(benchmark::State& state) {
  const PieceImage piece{"p", noise_image(240, 96, 1), 1, "c4"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tile(piece, 48, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_TilePiece)->Arg(10)->Arg(20);

void BM_AugmentPiece(benchmark::State& state) {
  const PieceImage piece{"p", noise_image(120, 48, 2), 1, "c4"};
  const bool zoom = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(augment(piece, AugmentationParams{}, zoom));
  }
}
BENCHMARK(BM_AugmentPiece)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

ConfusionMatrix random_matrix(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::int64_t> v(static_cast<std::size_t>(n * n));
  for (auto& x : v) x = static_cast<std::int64_t>(rng.below(200));
  return ConfusionMatrix(n, v);
}

void BM_SimilarityReport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto m = random_matrix(n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(similarity_report("m", m));
  }
}
BENCHMARK(BM_SimilarityReport)->Arg(4)->Arg(8);

void BM_Softmax(benchmark::State& state) {
  SplitMix64 rng(4);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = static_cast<double>(rng.below(1000)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(softmax(v));
  }
}
BENCHMARK(BM_Softmax)->Arg(4)->Arg(8);

void BM_BaselineFitPredict(benchmark::State& state) {
  std::vector<TileSample> train;
  for (int c = 1; c <= 4; ++c) {
    for (int k = 0; k < 64; ++k) {
      TileSample t;
      t.sample_id = std::to_string(c) + "/" + std::to_string(k);
      t.pixels = noise_image(48, 48, static_cast<std::uint64_t>(c * 1000 + k));
      t.true_class = c;
      train.push_back(std::move(t));
    }
  }
  for (auto _ : state) {
    CentroidClassifier model;
    model.fit(train, 4);
    for (const auto& t : train) {
      benchmark::DoNotOptimize(model.raw_scores(t.pixels));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(train.size()));
}
BENCHMARK(BM_BaselineFitPredict)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
