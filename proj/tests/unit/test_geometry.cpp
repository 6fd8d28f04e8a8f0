#include <doctest.h>

#include <scribe/errors.hpp>
#include <scribe/geometry.hpp>

#include <cmath>
#include <numbers>

using namespace scribe;

namespace {

Quad rect(double x, double y, double w, double h) {
  return {Point{x, y}, Point{x + w, y}, Point{x + w, y + h}, Point{x, y + h}};
}

GrayImage gradient(int w, int h) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y) = static_cast<std::uint8_t>(40 + x / 2 + y / 3);
    }
  }
  return img;
}

} // namespace

TEST_CASE("quad area and orientation") {
  const auto q = rect(0, 0, 10, 4);
  CHECK(quad_area(q) == doctest::Approx(40));
  CHECK(quad_is_convex_clockwise(q));
  const Quad ccw{q[0], q[3], q[2], q[1]};
  CHECK_FALSE(quad_is_convex_clockwise(ccw));
  const Quad dart{Point{0, 0}, Point{10, 0}, Point{2, 2}, Point{0, 10}};
  CHECK_FALSE(quad_is_convex_clockwise(dart));
  CHECK(quad_inside(q, 10, 4));
  CHECK_FALSE(quad_inside(q, 9, 4));
}

TEST_CASE("piece dimensions are rounded mean edge lengths") {
  const Quad q{Point{0, 0}, Point{10, 0}, Point{11, 5}, Point{0, 5}};
  const auto [w, h] = piece_dimensions(q);
  // top 10, bottom 11 -> 10.5 rounds to 11; left 5, right sqrt(26)
  CHECK(w == 11);
  CHECK(h == 5);
}

TEST_CASE("class scheme enforces the lower-half mapping") {
  const ClassScheme s4("c4", 4);
  CHECK(s4.author_of(1) == Author::Author1);
  CHECK(s4.author_of(2) == Author::Author1);
  CHECK(s4.author_of(3) == Author::Author2);
  const ClassScheme s8("c8", 8);
  CHECK(s8.author_of(4) == Author::Author1);
  CHECK(s8.author_of(5) == Author::Author2);
  CHECK_THROWS_AS(s8.author_of(9), ValidationError);
  CHECK_THROWS_AS(ClassScheme("x", 6), ValidationError);

  auto mapping = s4.mapping();
  CHECK_NOTHROW(ClassScheme("c4", 4, mapping));
  mapping[2] = Author::Author2;
  CHECK_THROWS_AS(ClassScheme("c4", 4, mapping), ValidationError);
  mapping.erase(2);
  CHECK_THROWS_AS(ClassScheme("c4", 4, mapping), ValidationError);
}

TEST_CASE("author string round trip") {
  CHECK(author_from_string("Author1") == Author::Author1);
  CHECK(to_string(Author::Author2) == "Author2");
  CHECK_THROWS_AS(author_from_string("Author3"), ParseError);
}

TEST_CASE("axis-aligned integer quad reproduces the sub-array") {
  const auto img = gradient(60, 40);
  const auto piece = extract_quad(img, rect(7, 5, 30, 12));
  REQUIRE(piece.width() == 30);
  REQUIRE(piece.height() == 12);
  CHECK(piece == img.crop(7, 5, 30, 12));
}

TEST_CASE("rotated quad matches the closed-form rotation of a smooth field") {
  // f(x, y) = 60 + 0.8x + 0.5y on pixel centres; bilinear sampling of a
  // linear field is exact up to byte rounding.
  const int W = 200, H = 160;
  GrayImage img(W, H);
  auto f = [](double x, double y) { return 60.0 + 0.8 * x + 0.5 * y; };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      img.at(x, y) = clamp_to_byte(f(x, y));
    }
  }
  const double theta = 10.0 * std::numbers::pi / 180.0;
  const double cx = 100, cy = 80, hw = 50, hh = 15;
  auto rot = [&](double dx, double dy) {
    return Point{cx + dx * std::cos(theta) - dy * std::sin(theta), cy + dx * std::sin(theta) + dy * std::cos(theta)};
  };
  const Quad q{rot(-hw, -hh), rot(hw, -hh), rot(hw, hh), rot(-hw, hh)};
  REQUIRE(quad_is_convex_clockwise(q));
  const auto piece = extract_quad(img, q);
  REQUIRE(piece.width() == 100);
  REQUIRE(piece.height() == 30);

  double total = 0;
  for (int v = 0; v < piece.height(); ++v) {
    for (int u = 0; u < piece.width(); ++u) {
      // Pixel centre of the piece in the rotated frame, then back into the
      // source frame where pixel centres sit at integer coordinates.
      const auto p = rot(-hw + (u + 0.5), -hh + (v + 0.5));
      total += std::abs(piece.at(u, v) - f(p.x - 0.5, p.y - 0.5));
    }
  }
  CHECK(total / (piece.width() * piece.height()) <= 8.0);
  CHECK(total / (piece.width() * piece.height()) <= 1.0);
}

TEST_CASE("extract_piece rejects degenerate or portrait regions") {
  SourceImage src{"s", gradient(100, 100)};
  RegionAnnotation ann;
  ann.piece_id = "p";
  ann.source_id = "s";
  ann.class_label = 1;
  ann.scheme_id = "c4";
  ann.quad = rect(10, 10, 20, 40);
  CHECK_THROWS_AS(extract_piece(src, ann), ValidationError);
  ann.quad = rect(10, 10, 0.5, 0.5);
  CHECK_THROWS_AS(extract_piece(src, ann), ValidationError);
  ann.quad = rect(90, 10, 20, 5);
  CHECK_THROWS_AS(extract_piece(src, ann), ValidationError);
  ann.quad = rect(10, 10, 40, 20);
  const auto p = extract_piece(src, ann);
  CHECK(p.width() == 40);
  CHECK(p.class_label == 1);
  CHECK(p.scheme_id == "c4");
}
