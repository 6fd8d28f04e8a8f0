#include "scribe/dataset.hpp"

#include "scribe/errors.hpp"
#include "scribe/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>

namespace scribe {

namespace {

constexpr std::array<DatasetTypeInfo, 8> kDatasetTypes{{
    {"v01", false, 20, 4},
    {"v02", true, 20, 4},
    {"v03", false, 10, 4},
    {"v04", true, 10, 4},
    {"v001", false, 20, 8},
    {"v002", true, 20, 8},
    {"v003", false, 10, 8},
    {"v004", true, 10, 8},
}};

const DatasetTypeInfo* find_type(std::string_view name) noexcept {
  for (const auto& t : kDatasetTypes) {
    if (t.name == name) {
      return &t;
    }
  }
  return nullptr;
}

std::size_t test_share(std::size_t k, double ratio) {
  // The epsilon absorbs representation error, e.g. (1 - 0.8) * 10 = 2.0000000000000004.
  auto n = static_cast<std::size_t>(std::ceil((1.0 - ratio) * static_cast<double>(k) - 1e-9));
  return std::clamp<std::size_t>(n, 1, k - 1);
}

} // namespace

std::span<const DatasetTypeInfo> dataset_types() noexcept { return kDatasetTypes; }

const DatasetTypeInfo& dataset_type_info(std::string_view name) {
  if (const auto* t = find_type(name)) {
    return *t;
  }
  throw ValidationError("unknown dataset type '" + std::string(name) + "'");
}

DatasetSpec DatasetSpec::for_type(std::string_view type, const ClassScheme& scheme, std::uint64_t seed,
                                  AugmentationParams augmentation) {
  const auto& info = dataset_type_info(type);
  if (info.n_classes != scheme.n_classes()) {
    throw ValidationError("dataset type '" + std::string(type) + "' needs a " +
                          std::to_string(info.n_classes) + "-class scheme");
  }
  DatasetSpec spec;
  spec.dataset_type = std::string(type);
  spec.zoom_enabled = info.zoom_enabled;
  spec.stride_px = info.stride_px;
  spec.scheme_id = scheme.id();
  spec.n_classes = scheme.n_classes();
  spec.seed = seed;
  spec.augmentation = std::move(augmentation);
  return spec;
}

void DatasetSpec::validate() const {
  if (dataset_type.empty()) {
    throw ValidationError("dataset_type must not be empty");
  }
  if (const auto* t = find_type(dataset_type)) {
    if (t->zoom_enabled != zoom_enabled || t->stride_px != stride_px || t->n_classes != n_classes) {
      throw ValidationError("dataset '" + dataset_type +
                            "' is inconsistent with its naming convention (zoom, stride, classes)");
    }
  }
  if (stride_px < 1) {
    throw ValidationError("stride must be positive");
  }
  if (n_classes != 4 && n_classes != 8) {
    throw ValidationError("n_classes must be 4 or 8");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ValidationError("split ratio must lie strictly between 0 and 1");
  }
  augmentation.validate();
}

std::string_view to_string(Partition p) noexcept {
  switch (p) {
  case Partition::Train:
    return "train";
  case Partition::Test:
    return "test";
  case Partition::External:
    return "external";
  }
  return "?";
}

Partition partition_from_string(std::string_view text) {
  if (text == "train") {
    return Partition::Train;
  }
  if (text == "test") {
    return Partition::Test;
  }
  if (text == "external") {
    return Partition::External;
  }
  throw ParseError("unknown partition '" + std::string(text) + "'");
}

PieceSplit split_pieces(std::vector<PieceImage> pieces, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie strictly between 0 and 1");
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const PieceImage& a, const PieceImage& b) { return a.piece_id < b.piece_id; });
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i].piece_id == pieces[i - 1].piece_id) {
      throw ValidationError("duplicate piece id '" + pieces[i].piece_id + "'");
    }
  }

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    by_class[pieces[i].class_label].push_back(i);
  }

  SplitMix64 rng(seed);
  std::vector<bool> is_test(pieces.size(), false);
  for (auto& [cls, idx] : by_class) {
    if (idx.size() < 2) {
      throw ValidationError("class " + std::to_string(cls) + " has fewer than 2 pieces");
    }
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.below(i + 1)]);
    }
    const auto n_test = test_share(idx.size(), ratio);
    for (std::size_t i = 0; i < n_test; ++i) {
      is_test[idx[i]] = true;
    }
  }

  PieceSplit out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    (is_test[i] ? out.test : out.train).push_back(std::move(pieces[i]));
  }
  return out;
}

int compute_tile_size(std::span<const PieceImage> pieces) {
  if (pieces.empty()) {
    throw ValidationError("cannot compute a tile size from no pieces");
  }
  int size = std::min(pieces.front().width(), pieces.front().height());
  for (const auto& p : pieces) {
    size = std::min({size, p.width(), p.height()});
  }
  return size;
}

std::size_t tile_count(int width, int height, int size, int stride) {
  if (size < 1 || stride < 1) {
    throw ValidationError("tile size and stride must be positive");
  }
  if (size > width || size > height) {
    throw ValidationError("tile size exceeds piece dimensions");
  }
  return static_cast<std::size_t>((width - size) / stride + 1) *
         static_cast<std::size_t>((height - size) / stride + 1);
}

std::vector<TileOffset> tile_offsets(int width, int height, int size, int stride) {
  std::vector<TileOffset> out;
  out.reserve(tile_count(width, height, size, stride));
  for (int y = 0; y + size <= height; y += stride) {
    for (int x = 0; x + size <= width; x += stride) {
      out.push_back({x, y});
    }
  }
  return out;
}

std::vector<Tile> tile(const PieceImage& piece, int size, int stride) {
  std::vector<Tile> out;
  for (const auto& off : tile_offsets(piece.width(), piece.height(), size, stride)) {
    out.push_back(Tile{off, piece.pixels.crop(off.x, off.y, size, size)});
  }
  return out;
}

std::string make_sample_id(std::string_view piece_id, std::size_t chain_index, TileOffset offset) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "/a%03zu/%d_%d", chain_index, offset.x, offset.y);
  return std::string(piece_id) + buf;
}

TileDataset build_dataset(std::vector<PieceImage> pieces, const DatasetSpec& spec,
                          const ClassScheme& scheme) {
  spec.validate();
  if (spec.scheme_id != scheme.id() || spec.n_classes != scheme.n_classes()) {
    throw ValidationError("dataset spec does not match scheme '" + scheme.id() + "'");
  }
  std::map<int, std::size_t> per_class;
  for (const auto& p : pieces) {
    if (p.scheme_id != scheme.id()) {
      throw ValidationError("piece '" + p.piece_id + "' belongs to scheme '" + p.scheme_id + "'");
    }
    if (!scheme.valid_class(p.class_label)) {
      throw ValidationError("piece '" + p.piece_id + "' has an invalid class");
    }
    ++per_class[p.class_label];
  }
  for (int c = 1; c <= scheme.n_classes(); ++c) {
    if (!per_class.contains(c)) {
      throw ValidationError("no pieces for class " + std::to_string(c));
    }
  }

  auto split = split_pieces(std::move(pieces), spec.split_ratio, spec.seed);

  std::vector<AugmentedPiece> train_aug;
  std::vector<AugmentedPiece> test_aug;
  for (const auto& p : split.train) {
    auto a = augment(p, spec.augmentation, spec.zoom_enabled);
    std::move(a.begin(), a.end(), std::back_inserter(train_aug));
  }
  for (const auto& p : split.test) {
    auto a = augment(p, spec.augmentation, spec.zoom_enabled);
    std::move(a.begin(), a.end(), std::back_inserter(test_aug));
  }

  TileDataset ds;
  ds.spec = spec;
  ds.scheme = scheme;
  ds.tile_size = std::numeric_limits<int>::max();
  for (const auto* group : {&train_aug, &test_aug}) {
    for (const auto& a : *group) {
      ds.tile_size = std::min({ds.tile_size, a.piece.width(), a.piece.height()});
    }
  }

  for (int c = 1; c <= scheme.n_classes(); ++c) {
    ds.counts[c] = ClassCounts{};
  }
  auto emit = [&](const std::vector<AugmentedPiece>& group, Partition part, std::vector<TileSample>& dst) {
    for (const auto& a : group) {
      const auto desc = a.chain.descriptor();
      for (auto& t : tile(a.piece, ds.tile_size, spec.stride_px)) {
        TileSample s;
        s.sample_id = make_sample_id(a.piece.piece_id, a.chain_index, t.offset);
        s.pixels = std::move(t.pixels);
        s.true_class = a.piece.class_label;
        s.provenance = Provenance{a.piece.piece_id, desc, t.offset.x, t.offset.y};
        s.partition = part;
        auto& cc = ds.counts[a.piece.class_label];
        ++(part == Partition::Train ? cc.train : cc.test);
        dst.push_back(std::move(s));
      }
    }
  };
  emit(train_aug, Partition::Train, ds.train);
  emit(test_aug, Partition::Test, ds.test);
  return ds;
}

ExternalTileSet build_external_tiles(std::string set_id, std::span<const PieceImage> pieces,
                                     int tile_size, int stride) {
  if (pieces.empty()) {
    throw ValidationError("external set '" + set_id + "' has no pieces");
  }
  ExternalTileSet out{std::move(set_id), tile_size, stride, {}};
  const auto desc = AugmentationChain{}.descriptor();
  for (const auto& p : pieces) {
    if (p.width() < tile_size || p.height() < tile_size) {
      throw ValidationError("external piece '" + p.piece_id + "' is smaller than the tile size " +
                            std::to_string(tile_size));
    }
    for (auto& t : tile(p, tile_size, stride)) {
      TileSample s;
      s.sample_id = p.piece_id + "/s" + std::to_string(tile_size) + "/" + std::to_string(t.offset.x) + "_" +
                    std::to_string(t.offset.y);
      s.pixels = std::move(t.pixels);
      s.provenance = Provenance{p.piece_id, desc, t.offset.x, t.offset.y};
      s.partition = Partition::External;
      out.tiles.push_back(std::move(s));
    }
  }
  return out;
}

} // namespace scribe
