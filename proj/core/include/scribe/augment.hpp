#pragma once

#include "scribe/geometry.hpp"
#include "scribe/image.hpp"

#include <string>
#include <vector>

namespace scribe {

/// Parameter grid for piece augmentation. Every list must contain its
/// identity element (1.0 for factors, 0 for shifts).
struct AugmentationParams {
  std::vector<double> shine_factors{0.8, 1.0, 1.2};
  std::vector<int> shift_offsets_h{-10, 0, 10};
  std::vector<int> shift_offsets_v{-10, 0, 10};
  std::vector<double> zoom_factors{0.9, 1.0, 1.1};

  static AugmentationParams identity();
  void validate() const;
  bool operator==(const AugmentationParams&) const = default;
};

/// One point of the augmentation grid, applied in field order.
struct AugmentationChain {
  double shine = 1.0;
  int shift_h = 0;
  int shift_v = 0;
  bool flip_h = false;
  bool flip_v = false;
  double zoom = 1.0;

  bool is_identity() const noexcept;
  std::string descriptor() const;
  bool operator==(const AugmentationChain&) const = default;
};

/// Multiplies luminance by `factor`, clamped to [0, 255].
GrayImage apply_shine(const GrayImage& image, double factor);
/// Translates content by (dx, dy); vacated pixels replicate the nearest edge.
GrayImage apply_shift(const GrayImage& image, int dx, int dy);
GrayImage flip_horizontal(const GrayImage& image);
GrayImage flip_vertical(const GrayImage& image);
/// Bilinear rescale about the centre, cropped or edge-padded back to the
/// original size.
GrayImage apply_zoom(const GrayImage& image, double factor);

GrayImage apply_chain(const GrayImage& image, const AugmentationChain& chain);

/// Cartesian product shine x shift_h x shift_v x flip_h x flip_v x zoom;
/// the zoom axis collapses to {1.0} when disabled.
std::vector<AugmentationChain> enumerate_chains(const AugmentationParams& params, bool zoom_enabled);

struct AugmentedPiece {
  PieceImage piece;
  AugmentationChain chain;
  std::size_t chain_index = 0;
};

std::vector<AugmentedPiece> augment(const PieceImage& piece, const AugmentationParams& params,
                                    bool zoom_enabled);

} // namespace scribe
