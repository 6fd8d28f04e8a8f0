#include "scribe/augment.hpp"

#include "scribe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace scribe {

AugmentationParams AugmentationParams::identity() {
  return AugmentationParams{{1.0}, {0}, {0}, {1.0}};
}

void AugmentationParams::validate() const {
  auto check_factors = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) {
      throw ValidationError(std::string(name) + " must not be empty");
    }
    if (std::find(v.begin(), v.end(), 1.0) == v.end()) {
      throw ValidationError(std::string(name) + " must include the identity factor 1.0");
    }
    for (double f : v) {
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw ValidationError(std::string(name) + " must be positive and finite");
      }
    }
  };
  auto check_shifts = [](const std::vector<int>& v, const char* name) {
    if (v.empty()) {
      throw ValidationError(std::string(name) + " must not be empty");
    }
    if (std::find(v.begin(), v.end(), 0) == v.end()) {
      throw ValidationError(std::string(name) + " must include the identity offset 0");
    }
  };
  check_factors(shine_factors, "shine_factors");
  check_shifts(shift_offsets_h, "shift_offsets_h");
  check_shifts(shift_offsets_v, "shift_offsets_v");
  check_factors(zoom_factors, "zoom_factors");
}

bool AugmentationChain::is_identity() const noexcept {
  return shine == 1.0 && shift_h == 0 && shift_v == 0 && !flip_h && !flip_v && zoom == 1.0;
}

std::string AugmentationChain::descriptor() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "shine=%g;dx=%d;dy=%d;fh=%d;fv=%d;zoom=%g", shine, shift_h, shift_v,
                flip_h ? 1 : 0, flip_v ? 1 : 0, zoom);
  return buf;
}

GrayImage apply_shine(const GrayImage& image, double factor) {
  GrayImage out = image;
  if (factor == 1.0) {
    return out;
  }
  for (auto& p : out.pixels()) {
    p = clamp_to_byte(p * factor);
  }
  return out;
}

GrayImage apply_shift(const GrayImage& image, int dx, int dy) {
  const int w = image.width();
  const int h = image.height();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::clamp(y - dy, 0, h - 1);
    for (int x = 0; x < w; ++x) {
      out.at(x, y) = image.at(std::clamp(x - dx, 0, w - 1), sy);
    }
  }
  return out;
}

GrayImage flip_horizontal(const GrayImage& image) {
  GrayImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out.at(x, y) = image.at(image.width() - 1 - x, y);
    }
  }
  return out;
}

GrayImage flip_vertical(const GrayImage& image) {
  GrayImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out.at(x, y) = image.at(x, image.height() - 1 - y);
    }
  }
  return out;
}

GrayImage apply_zoom(const GrayImage& image, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ValidationError("zoom factor must be positive and finite");
  }
  if (factor == 1.0) {
    return image;
  }
  const double cx = (image.width() - 1) / 2.0;
  const double cy = (image.height() - 1) / 2.0;
  GrayImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out.at(x, y) = clamp_to_byte(image.sample((x - cx) / factor + cx, (y - cy) / factor + cy));
    }
  }
  return out;
}

GrayImage apply_chain(const GrayImage& image, const AugmentationChain& chain) {
  GrayImage out = apply_shine(image, chain.shine);
  if (chain.shift_h != 0 || chain.shift_v != 0) {
    out = apply_shift(out, chain.shift_h, chain.shift_v);
  }
  if (chain.flip_h) {
    out = flip_horizontal(out);
  }
  if (chain.flip_v) {
    out = flip_vertical(out);
  }
  return apply_zoom(out, chain.zoom);
}

std::vector<AugmentationChain> enumerate_chains(const AugmentationParams& params, bool zoom_enabled) {
  params.validate();
  const std::vector<double> zooms = zoom_enabled ? params.zoom_factors : std::vector<double>{1.0};
  std::vector<AugmentationChain> chains;
  chains.reserve(params.shine_factors.size() * params.shift_offsets_h.size() *
                 params.shift_offsets_v.size() * 4 * zooms.size());
  for (double shine : params.shine_factors) {
    for (int dx : params.shift_offsets_h) {
      for (int dy : params.shift_offsets_v) {
        for (bool fh : {false, true}) {
          for (bool fv : {false, true}) {
            for (double z : zooms) {
              chains.push_back(AugmentationChain{shine, dx, dy, fh, fv, z});
            }
          }
        }
      }
    }
  }
  return chains;
}

std::vector<AugmentedPiece> augment(const PieceImage& piece, const AugmentationParams& params,
                                    bool zoom_enabled) {
  const auto chains = enumerate_chains(params, zoom_enabled);
  std::vector<AugmentedPiece> out;
  out.reserve(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    PieceImage p{piece.piece_id, apply_chain(piece.pixels, chains[i]), piece.class_label, piece.scheme_id};
    out.push_back(AugmentedPiece{std::move(p), chains[i], i});
  }
  return out;
}

} // namespace scribe
