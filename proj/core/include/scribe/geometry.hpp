#pragma once

#include "scribe/image.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace scribe {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Corners in clockwise order as seen on screen (y grows downwards):
/// top-left, top-right, bottom-right, bottom-left of the writing line.
using Quad = std::array<Point, 4>;

double quad_area(const Quad& quad) noexcept;
bool quad_is_convex_clockwise(const Quad& quad) noexcept;
bool quad_inside(const Quad& quad, int width, int height) noexcept;

/// Piece dimensions: rounded means of the two horizontal and the two
/// vertical edges.
std::pair<int, int> piece_dimensions(const Quad& quad);

enum class Author { Author1 = 1, Author2 = 2 };

std::string_view to_string(Author author) noexcept;
Author author_from_string(std::string_view text);

/// Partition of regions into 4 or 8 classes with the fixed class-to-author
/// mapping: the lower half of the classes belongs to Author1.
class ClassScheme {
public:
  ClassScheme(std::string id, int n_classes);
  /// Validates that `author_of_class` is exactly the canonical mapping.
  ClassScheme(std::string id, int n_classes, const std::map<int, Author>& author_of_class);

  const std::string& id() const noexcept { return id_; }
  int n_classes() const noexcept { return n_classes_; }
  bool valid_class(int cls) const noexcept { return cls >= 1 && cls <= n_classes_; }
  Author author_of(int cls) const;
  std::map<int, Author> mapping() const;

  bool operator==(const ClassScheme&) const = default;

private:
  std::string id_;
  int n_classes_ = 0;
};

struct SourceImage {
  std::string id;
  GrayImage pixels;
};

struct RegionAnnotation {
  std::string piece_id;
  std::string source_id;
  Quad quad{};
  int class_label = 0;
  std::string scheme_id;
  int line_pair_index = 0;

  bool operator==(const RegionAnnotation&) const = default;
};

struct PieceImage {
  std::string piece_id;
  GrayImage pixels;
  int class_label = 0;
  std::string scheme_id;

  int width() const noexcept { return pixels.width(); }
  int height() const noexcept { return pixels.height(); }
};

/// Resamples the quad onto an axis-aligned rectangle so the writing runs
/// horizontally. Axis-aligned quads on integer coordinates reproduce the
/// pixel sub-array exactly.
GrayImage extract_quad(const GrayImage& image, const Quad& quad);
PieceImage extract_piece(const SourceImage& image, const RegionAnnotation& ann);

} // namespace scribe
