#pragma once

#include "scribe/dataset.hpp"

#include <filesystem>
#include <vector>

namespace scribe {

/// Writes `manifest.json` plus PNG tiles under `tiles/`, named by the
/// SHA-256 of their encoded bytes so identical tiles share one file.
void write_dataset(const TileDataset& dataset, const std::filesystem::path& dir);

/// Reads a dataset directory. With `load_pixels` false only the manifest is
/// parsed and tile rasters stay empty.
TileDataset read_dataset(const std::filesystem::path& dir, bool load_pixels = true);

/// External tile sets carry every scheme of their annotation file so that
/// attribution can map classes to authors without the training data.
void write_external_set(const ExternalTileSet& set, const std::vector<ClassScheme>& schemes,
                        const std::filesystem::path& dir);

struct LoadedExternalSet {
  ExternalTileSet set;
  std::vector<ClassScheme> schemes;

  const ClassScheme& scheme(std::string_view id) const;
};

LoadedExternalSet read_external_set(const std::filesystem::path& dir, bool load_pixels = true);

} // namespace scribe
