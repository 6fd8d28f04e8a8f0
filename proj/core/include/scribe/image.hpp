#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scribe {

/// 8-bit single-channel raster, row-major, origin at the top-left corner.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  /// Exact sub-array copy; the window must lie inside the image.
  GrayImage crop(int x, int y, int w, int h) const;

  /// Bilinear sample with pixel centres at integer coordinates and edge
  /// replication outside the raster.
  double sample(double x, double y) const;

  bool operator==(const GrayImage&) const = default;

private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// ITU-R BT.601 luma, rounded to nearest.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

std::uint8_t clamp_to_byte(double value) noexcept;

/// Loads PNG (any colour type, reduced to luminance) or binary/ASCII PGM.
GrayImage load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const GrayImage& image);
GrayImage decode_png(std::span<const std::uint8_t> bytes);
void save_png(const GrayImage& image, const std::filesystem::path& path);
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

} // namespace scribe
