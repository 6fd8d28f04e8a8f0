#include <doctest.h>

#include "temp_dir.hpp"

#include <scribe/errors.hpp>
#include <scribe/image.hpp>
#include <scribe/util.hpp>

#include <fstream>

using namespace scribe;
using scribe::testing::TempDir;

namespace {

GrayImage ramp(int w, int h) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
    }
  }
  return img;
}

} // namespace

TEST_CASE("crop copies the exact window") {
  const auto img = ramp(20, 10);
  const auto c = img.crop(3, 2, 5, 4);
  REQUIRE(c.width() == 5);
  REQUIRE(c.height() == 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      CHECK(c.at(x, y) == img.at(x + 3, y + 2));
    }
  }
  CHECK_THROWS_AS(img.crop(16, 0, 5, 4), ValidationError);
  CHECK_THROWS_AS(img.crop(-1, 0, 5, 4), ValidationError);
}

TEST_CASE("bilinear sample hits pixel centres and clamps at edges") {
  GrayImage img(2, 2, std::vector<std::uint8_t>{0, 100, 50, 150});
  CHECK(img.sample(0, 0) == doctest::Approx(0));
  CHECK(img.sample(1, 1) == doctest::Approx(150));
  CHECK(img.sample(0.5, 0) == doctest::Approx(50));
  CHECK(img.sample(0.5, 0.5) == doctest::Approx(75));
  CHECK(img.sample(-3, -3) == doctest::Approx(0));
  CHECK(img.sample(9, 0) == doctest::Approx(100));
}

TEST_CASE("pixel buffer size must match dimensions") {
  CHECK_THROWS_AS(GrayImage(3, 3, std::vector<std::uint8_t>(8)), ValidationError);
}

TEST_CASE("luminance and clamping") {
  CHECK(luminance(255, 255, 255) == 255);
  CHECK(luminance(0, 0, 0) == 0);
  CHECK(luminance(255, 0, 0) == 76);
  CHECK(luminance(0, 255, 0) == 150);
  CHECK(luminance(0, 0, 255) == 29);
  CHECK(clamp_to_byte(-4.0) == 0);
  CHECK(clamp_to_byte(300.0) == 255);
  CHECK(clamp_to_byte(12.5) == 13);
}

TEST_CASE("PNG round trip is lossless") {
  const auto img = ramp(33, 17);
  const auto bytes = encode_png(img);
  CHECK(decode_png(bytes) == img);

  TempDir tmp;
  save_png(img, tmp / "a.png");
  CHECK(load_image(tmp / "a.png") == img);
}

TEST_CASE("PGM binary and ASCII load") {
  TempDir tmp;
  const auto img = ramp(6, 4);
  save_pgm(img, tmp / "b.pgm");
  CHECK(load_image(tmp / "b.pgm") == img);

  write_text_file(tmp / "c.pgm", "P2\n# comment\n3 2\n255\n0 10 20\n30 40 255\n");
  const auto c = load_image(tmp / "c.pgm");
  REQUIRE(c.width() == 3);
  CHECK(c.at(1, 0) == 10);
  CHECK(c.at(2, 1) == 255);
}

TEST_CASE("unreadable images raise ParseError") {
  TempDir tmp;
  write_text_file(tmp / "junk.png", "not an image");
  CHECK_THROWS_AS(load_image(tmp / "junk.png"), ParseError);
  CHECK_THROWS_AS(load_image(tmp / "missing.png"), ParseError);
  const std::vector<std::uint8_t> junk{1, 2, 3};
  CHECK_THROWS_AS(decode_png(junk), ParseError);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex(std::string_view("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
