#include <doctest.h>

#include <scribe/augment.hpp>
#include <scribe/errors.hpp>

#include <algorithm>
#include <set>

using namespace scribe;

namespace {

GrayImage noise(int w, int h, unsigned seed) {
  GrayImage img(w, h);
  for (auto& p : img.pixels()) {
    seed = seed * 1103515245u + 12345u;
    p = static_cast<std::uint8_t>(seed >> 16);
  }
  return img;
}

} // namespace

TEST_CASE("flips are involutions and mirror coordinates") {
  const auto img = noise(13, 7, 1);
  CHECK(flip_horizontal(flip_horizontal(img)) == img);
  CHECK(flip_vertical(flip_vertical(img)) == img);
  const auto fh = flip_horizontal(img);
  CHECK(fh.at(0, 3) == img.at(12, 3));
  const auto fv = flip_vertical(img);
  CHECK(fv.at(4, 0) == img.at(4, 6));
}

TEST_CASE("shine scales and clamps") {
  GrayImage img(2, 1, std::vector<std::uint8_t>{100, 240});
  const auto s = apply_shine(img, 1.2);
  CHECK(s.at(0, 0) == 120);
  CHECK(s.at(1, 0) == 255);
  CHECK(apply_shine(img, 1.0) == img);
}

TEST_CASE("shift replicates the nearest edge") {
  GrayImage img(4, 1, std::vector<std::uint8_t>{1, 2, 3, 4});
  const auto right = apply_shift(img, 2, 0);
  CHECK(right == GrayImage(4, 1, std::vector<std::uint8_t>{1, 1, 1, 2}));
  const auto left = apply_shift(img, -1, 0);
  CHECK(left == GrayImage(4, 1, std::vector<std::uint8_t>{2, 3, 4, 4}));
  CHECK(apply_shift(img, 0, 0) == img);
}

TEST_CASE("zoom keeps size and is the identity at 1") {
  const auto img = noise(20, 10, 3);
  CHECK(apply_zoom(img, 1.0) == img);
  const auto z = apply_zoom(img, 1.1);
  CHECK(z.width() == 20);
  CHECK(z.height() == 10);
  GrayImage flat(20, 10, 77);
  CHECK(apply_zoom(flat, 0.9) == flat);
  CHECK_THROWS_AS(apply_zoom(img, 0.0), ValidationError);
}

TEST_CASE("chain enumeration covers the grid once") {
  const AugmentationParams p;
  const auto with_zoom = enumerate_chains(p, true);
  const auto without = enumerate_chains(p, false);
  CHECK(with_zoom.size() == 3u * 3u * 3u * 2u * 2u * 3u);
  CHECK(without.size() == 3u * 3u * 3u * 2u * 2u);
  std::set<std::string> seen;
  for (const auto& c : with_zoom) {
    seen.insert(c.descriptor());
  }
  CHECK(seen.size() == with_zoom.size());
  CHECK(std::count_if(without.begin(), without.end(), [](const auto& c) { return c.is_identity(); }) == 1);
  CHECK(AugmentationChain{}.descriptor() == "shine=1;dx=0;dy=0;fh=0;fv=0;zoom=1");
}

TEST_CASE("identity chain preserves pieces") {
  const auto img = noise(30, 12, 9);
  CHECK(apply_chain(img, AugmentationChain{}) == img);
  PieceImage piece{"p", img, 2, "c4"};
  const auto out = augment(piece, AugmentationParams::identity(), true);
  REQUIRE(out.size() == 4); // flips are always enumerated
  CHECK(out[0].piece.pixels == img);
  CHECK(out[0].chain.is_identity());
}

TEST_CASE("parameter lists must contain their identity") {
  AugmentationParams p;
  p.shine_factors = {0.8, 1.2};
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = AugmentationParams{};
  p.shift_offsets_h = {-10, 10};
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_NOTHROW(AugmentationParams{}.validate());
}
