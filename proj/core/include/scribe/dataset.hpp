#pragma once

#include "scribe/augment.hpp"
#include "scribe/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

/// Naming convention for dataset families: zoom option, stride and class
/// count are implied by the type name.
struct DatasetTypeInfo {
  std::string_view name;
  bool zoom_enabled;
  int stride_px;
  int n_classes;
};

std::span<const DatasetTypeInfo> dataset_types() noexcept;
const DatasetTypeInfo& dataset_type_info(std::string_view name);

struct DatasetSpec {
  std::string dataset_type;
  bool zoom_enabled = false;
  int stride_px = 20;
  std::string scheme_id;
  int n_classes = 4;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  AugmentationParams augmentation;

  static DatasetSpec for_type(std::string_view type, const ClassScheme& scheme, std::uint64_t seed,
                              AugmentationParams augmentation = {});
  /// Checks the (type, zoom, stride, classes) tuple against the naming
  /// convention; unknown type names are accepted as custom families.
  void validate() const;
  bool operator==(const DatasetSpec&) const = default;
};

enum class Partition { Train, Test, External };

std::string_view to_string(Partition p) noexcept;
Partition partition_from_string(std::string_view text);

struct Provenance {
  std::string piece_id;
  std::string chain;
  int offset_x = 0;
  int offset_y = 0;
  bool operator==(const Provenance&) const = default;
};

struct TileSample {
  std::string sample_id;
  GrayImage pixels;
  std::optional<int> true_class;
  Provenance provenance;
  Partition partition = Partition::Train;
};

struct ClassCounts {
  std::size_t train = 0;
  std::size_t test = 0;
  bool operator==(const ClassCounts&) const = default;
};

struct TileDataset {
  DatasetSpec spec;
  ClassScheme scheme{"scheme", 4};
  int tile_size = 0;
  std::vector<TileSample> train;
  std::vector<TileSample> test;
  std::map<int, ClassCounts> counts;
};

struct PieceSplit {
  std::vector<PieceImage> train;
  std::vector<PieceImage> test;
};

/// Stratified split at piece level: each class with k pieces sends
/// ceil((1 - ratio) * k) pieces to test (clamped to [1, k - 1]). Pieces are
/// ordered by id before shuffling, so the result depends only on the set of
/// pieces and the seed.
PieceSplit split_pieces(std::vector<PieceImage> pieces, double ratio, std::uint64_t seed);

/// Smallest side over all pieces.
int compute_tile_size(std::span<const PieceImage> pieces);

struct TileOffset {
  int x = 0;
  int y = 0;
  bool operator==(const TileOffset&) const = default;
};

/// (floor((w - s) / stride) + 1) * (floor((h - s) / stride) + 1).
std::size_t tile_count(int width, int height, int size, int stride);
/// Row-major grid of top-left offsets for every window that fits.
std::vector<TileOffset> tile_offsets(int width, int height, int size, int stride);

struct Tile {
  TileOffset offset;
  GrayImage pixels;
};

std::vector<Tile> tile(const PieceImage& piece, int size, int stride);

/// split -> augment -> tile size over all augmented pieces -> tile.
TileDataset build_dataset(std::vector<PieceImage> pieces, const DatasetSpec& spec,
                          const ClassScheme& scheme);

std::string make_sample_id(std::string_view piece_id, std::size_t chain_index, TileOffset offset);

/// Unlabeled tiles cut straight from pieces, no augmentation. Sample ids
/// embed the tile size, so sets cut for different datasets never collide.
struct ExternalTileSet {
  std::string set_id;
  int tile_size = 0;
  int stride_px = 0;
  std::vector<TileSample> tiles;
};

ExternalTileSet build_external_tiles(std::string set_id, std::span<const PieceImage> pieces,
                                     int tile_size, int stride);

} // namespace scribe
