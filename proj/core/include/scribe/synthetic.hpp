#pragma once

#include "scribe/annotations.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace scribe {

/// Parameters of a rendered "hand": oriented stroke texture over a base
/// luminance. Classes of one hand differ by a small luminance step.
struct SyntheticHand {
  double base_luminance = 80.0;
  double stroke_angle_deg = 0.0;
  double stroke_period = 7.0;
  double stroke_depth = 40.0;
};

struct SyntheticConfig {
  SyntheticHand hand1{70.0, 15.0, 7.0, 40.0};
  SyntheticHand hand2{170.0, 75.0, 9.0, 40.0};
  double class_step = 6.0;    ///< luminance step between neighbouring classes of one hand
  double pixel_noise = 30.0;  ///< std-dev of per-pixel noise
  int pieces_per_class = 8;
  int piece_width = 120;
  int piece_height = 48;
  double max_rotation_deg = 3.0;
  Author held_out_author = Author::Author2;
  int held_out_regions = 2;
  std::uint64_t seed = 20240521;
};

struct SyntheticFixture {
  std::filesystem::path annotation_path;
  std::filesystem::path image_path;
  std::string scheme4_id;
  std::string scheme8_id;
  std::string held_out_set_id;
  Author held_out_author = Author::Author1;
};

/// Renders one source image with a 4-class and an 8-class region layout
/// (each class `pieces_per_class` pieces) plus an external set written by
/// `held_out_author`, and writes `annotations.json` + `tablet.png` to `dir`.
SyntheticFixture write_synthetic_fixture(const SyntheticConfig& config, const std::filesystem::path& dir);

} // namespace scribe
