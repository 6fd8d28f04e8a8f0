#pragma once

#include "scribe/geometry.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

struct SourceRef {
  std::string id;
  std::string path; ///< as written in the file; relative paths resolve against the file's directory
  bool operator==(const SourceRef&) const = default;
};

/// Region whose writer is unknown; scored by trained models, never trained on.
struct ExternalRegion {
  std::string piece_id;
  std::string source_id;
  Quad quad{};
  int line_pair_index = 0;
  bool operator==(const ExternalRegion&) const = default;
};

struct ExternalRegionSet {
  std::string set_id;
  std::vector<ExternalRegion> regions;
  bool operator==(const ExternalRegionSet&) const = default;
};

struct AnnotationSet {
  std::vector<ClassScheme> schemes;
  std::vector<SourceRef> sources;
  std::vector<RegionAnnotation> regions;
  std::vector<ExternalRegionSet> external_sets;

  const ClassScheme& scheme(std::string_view id) const;
  /// The unique scheme with the given class count.
  const ClassScheme& scheme_with_classes(int n_classes) const;
  const ExternalRegionSet& external_set(std::string_view set_id) const;

  bool operator==(const AnnotationSet&) const = default;
};

struct LoadedAnnotations {
  AnnotationSet set;
  std::map<std::string, SourceImage, std::less<>> images;

  std::vector<PieceImage> extract_pieces(std::string_view scheme_id) const;
  std::vector<PieceImage> extract_external(std::string_view set_id) const;
};

/// Parses and checks everything that does not need pixel data.
AnnotationSet parse_annotations(std::string_view json_text);
std::string annotations_to_json(const AnnotationSet& set);

/// Bounds-checks every quad against the referenced image.
void validate_bounds(const AnnotationSet& set,
                     const std::map<std::string, SourceImage, std::less<>>& images);

/// Parses the file, loads every declared source image and validates bounds.
LoadedAnnotations load_annotations(const std::filesystem::path& path);

} // namespace scribe
