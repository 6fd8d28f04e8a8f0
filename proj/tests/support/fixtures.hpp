#pragma once

#include <scribe/annotations.hpp>
#include <scribe/dataset.hpp>
#include <scribe/dataset_io.hpp>
#include <scribe/harness.hpp>
#include <scribe/synthetic.hpp>

#include <filesystem>
#include <string>

namespace scribe::testing {

/// Small synthetic fixture: 4 pieces per class keeps datasets tiny.
inline SyntheticFixture small_fixture(const std::filesystem::path& dir, int pieces = 4) {
  SyntheticConfig cfg;
  cfg.pieces_per_class = pieces;
  return write_synthetic_fixture(cfg, dir);
}

/// Builds one dataset of `type` without augmentation into `dir`.
inline TileDataset small_dataset(const LoadedAnnotations& ann, const std::string& type, std::uint64_t seed,
                                 const std::filesystem::path& dir) {
  const auto& scheme = ann.set.scheme_with_classes(dataset_type_info(type).n_classes);
  const auto spec = DatasetSpec::for_type(type, scheme, seed, AugmentationParams::identity());
  auto ds = build_dataset(ann.extract_pieces(scheme.id()), spec, scheme);
  write_dataset(ds, dir);
  return ds;
}

inline RunManifest pending_manifest(const std::string& model, const std::string& type, std::uint64_t seed,
                                    int epochs = 12) {
  RunManifest m;
  m.model_id = model;
  m.dataset_type = type;
  m.seed = seed;
  m.training_config = TrainingConfig::preset_for(model);
  m.training_config.epochs = epochs;
  return m;
}

} // namespace scribe::testing
