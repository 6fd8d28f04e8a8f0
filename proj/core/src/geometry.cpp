#include "scribe/geometry.hpp"

#include "scribe/errors.hpp"

#include <cmath>

namespace scribe {

namespace {

double cross(const Point& o, const Point& a, const Point& b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(b.x - a.x, b.y - a.y);
}

} // namespace

double quad_area(const Quad& q) noexcept {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % 4];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

bool quad_is_convex_clockwise(const Quad& q) noexcept {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(cross(q[i], q[(i + 1) % 4], q[(i + 2) % 4]) > 0.0)) {
      return false;
    }
  }
  return true;
}

bool quad_inside(const Quad& q, int width, int height) noexcept {
  for (const auto& p : q) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 ||
        p.x > width || p.y > height) {
      return false;
    }
  }
  return true;
}

std::pair<int, int> piece_dimensions(const Quad& q) {
  const double w = (distance(q[0], q[1]) + distance(q[3], q[2])) / 2.0;
  const double h = (distance(q[0], q[3]) + distance(q[1], q[2])) / 2.0;
  return {static_cast<int>(std::lround(w)), static_cast<int>(std::lround(h))};
}

std::string_view to_string(Author author) noexcept {
  return author == Author::Author1 ? "Author1" : "Author2";
}

Author author_from_string(std::string_view text) {
  if (text == "Author1") {
    return Author::Author1;
  }
  if (text == "Author2") {
    return Author::Author2;
  }
  throw ParseError("unknown author '" + std::string(text) + "'");
}

ClassScheme::ClassScheme(std::string id, int n_classes)
    : id_(std::move(id)), n_classes_(n_classes) {
  if (id_.empty()) {
    throw ValidationError("class scheme id must not be empty");
  }
  if (n_classes != 4 && n_classes != 8) {
    throw ValidationError("class scheme '" + id_ + "': n_classes must be 4 or 8");
  }
}

ClassScheme::ClassScheme(std::string id, int n_classes, const std::map<int, Author>& author_of_class)
    : ClassScheme(std::move(id), n_classes) {
  if (author_of_class != mapping()) {
    throw ValidationError("class scheme '" + id_ +
                          "': author mapping must assign the lower half of the classes to Author1 "
                          "and the upper half to Author2");
  }
}

Author ClassScheme::author_of(int cls) const {
  if (!valid_class(cls)) {
    throw ValidationError("class " + std::to_string(cls) + " not valid under scheme '" + id_ + "'");
  }
  return cls <= n_classes_ / 2 ? Author::Author1 : Author::Author2;
}

std::map<int, Author> ClassScheme::mapping() const {
  std::map<int, Author> out;
  for (int c = 1; c <= n_classes_; ++c) {
    out.emplace(c, author_of(c));
  }
  return out;
}

GrayImage extract_quad(const GrayImage& image, const Quad& q) {
  if (quad_area(q) < 1.0) {
    throw ValidationError("degenerate quad (area below 1 px^2)");
  }
  const auto [w, h] = piece_dimensions(q);
  if (w < 1 || h < 1) {
    throw ValidationError("degenerate quad (zero-length edge)");
  }
  GrayImage out(w, h);
  for (int v = 0; v < h; ++v) {
    const double b = (v + 0.5) / h;
    for (int u = 0; u < w; ++u) {
      const double a = (u + 0.5) / w;
      // Bilinear patch through the four corners, in corner-based coordinates.
      const double x = (1 - a) * (1 - b) * q[0].x + a * (1 - b) * q[1].x + a * b * q[2].x +
                       (1 - a) * b * q[3].x;
      const double y = (1 - a) * (1 - b) * q[0].y + a * (1 - b) * q[1].y + a * b * q[2].y +
                       (1 - a) * b * q[3].y;
      out.at(u, v) = clamp_to_byte(image.sample(x - 0.5, y - 0.5));
    }
  }
  return out;
}

PieceImage extract_piece(const SourceImage& image, const RegionAnnotation& ann) {
  if (!quad_inside(ann.quad, image.pixels.width(), image.pixels.height())) {
    throw ValidationError("region '" + ann.piece_id + "' lies outside source '" + image.id + "'");
  }
  auto pixels = extract_quad(image.pixels, ann.quad);
  if (pixels.width() < pixels.height()) {
    throw ValidationError("region '" + ann.piece_id +
                          "' is taller than wide; corners must start at the top-left of the line");
  }
  return PieceImage{ann.piece_id, std::move(pixels), ann.class_label, ann.scheme_id};
}

} // namespace scribe
