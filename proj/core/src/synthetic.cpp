#include "scribe/synthetic.hpp"

#include "scribe/rng.hpp"
#include "scribe/util.hpp"

#include <cmath>
#include <numbers>

namespace scribe {

namespace {

// Irwin-Hall(4) approximation of a unit normal; portable across platforms.
double gaussian(SplitMix64& rng) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    s += static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
  }
  return (s - 2.0) * std::sqrt(3.0);
}

double uniform(SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

struct Layout {
  int cell_w;
  int cell_h;
  int cols;
};

struct PlannedRegion {
  std::string piece_id;
  std::string scheme_id;
  int class_label = 0; // 0 for external
  const SyntheticHand* hand = nullptr;
  double level = 0.0;
  int cell = 0;
};

} // namespace

SyntheticFixture write_synthetic_fixture(const SyntheticConfig& cfg, const std::filesystem::path& dir) {
  SyntheticFixture fx;
  fx.scheme4_id = "classes4";
  fx.scheme8_id = "classes8";
  fx.held_out_set_id = "held-out";
  fx.held_out_author = cfg.held_out_author;

  std::vector<PlannedRegion> plan;
  int cell = 0;
  for (const auto& [scheme_id, n] : {std::pair{fx.scheme4_id, 4}, std::pair{fx.scheme8_id, 8}}) {
    const int per_hand = n / 2;
    for (int c = 1; c <= n; ++c) {
      const bool first = c <= per_hand;
      const int q = (first ? c : c - per_hand) - 1;
      // Per-hand levels centred on the hand's base luminance.
      const double level = (q - (per_hand - 1) / 2.0) * cfg.class_step;
      for (int k = 0; k < cfg.pieces_per_class; ++k) {
        char id[48];
        std::snprintf(id, sizeof id, "c%d-k%02d-%d", c, k, n);
        plan.push_back({id, scheme_id, c, first ? &cfg.hand1 : &cfg.hand2, level, cell++});
      }
    }
  }
  const auto* held_hand = cfg.held_out_author == Author::Author1 ? &cfg.hand1 : &cfg.hand2;
  for (int k = 0; k < cfg.held_out_regions; ++k) {
    plan.push_back({"held-" + std::to_string(k), "", 0, held_hand, 0.0, cell++});
  }

  const Layout layout{cfg.piece_width + 24, cfg.piece_height + 24, 10};
  const int rows = (cell + layout.cols - 1) / layout.cols;
  GrayImage image(layout.cols * layout.cell_w, rows * layout.cell_h);

  SplitMix64 rng(cfg.seed);
  for (auto& px : image.pixels()) {
    px = clamp_to_byte(128.0 + 6.0 * gaussian(rng));
  }

  AnnotationSet set;
  set.schemes = {ClassScheme(fx.scheme4_id, 4), ClassScheme(fx.scheme8_id, 8)};
  set.sources = {SourceRef{"tablet", "tablet.png"}};
  ExternalRegionSet held{fx.held_out_set_id, {}};

  const double w = cfg.piece_width;
  const double h = cfg.piece_height;
  for (const auto& r : plan) {
    const double cx = (r.cell % layout.cols) * layout.cell_w + layout.cell_w / 2.0;
    const double cy = (r.cell / layout.cols) * layout.cell_h + layout.cell_h / 2.0;
    const double angle = uniform(rng, -cfg.max_rotation_deg, cfg.max_rotation_deg) * std::numbers::pi / 180.0;
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    const auto& hand = *r.hand;
    const double ta = hand.stroke_angle_deg * std::numbers::pi / 180.0;

    // Corners in piece frame, rotated about the cell centre.
    Quad quad{};
    const Point local[4] = {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
    for (int i = 0; i < 4; ++i) {
      quad[static_cast<std::size_t>(i)] = Point{cx + local[i].x * ca - local[i].y * sa, cy + local[i].x * sa + local[i].y * ca};
    }

    // Render by inverse mapping every pixel centre of the cell.
    const int x0 = static_cast<int>(cx - layout.cell_w / 2.0);
    const int y0 = static_cast<int>(cy - layout.cell_h / 2.0);
    for (int y = y0; y < y0 + layout.cell_h; ++y) {
      for (int x = x0; x < x0 + layout.cell_w; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const double u = dx * ca + dy * sa;
        const double v = -dx * sa + dy * ca;
        if (std::abs(u) > w / 2 + 2 || std::abs(v) > h / 2 + 2) {
          continue;
        }
        const double t = (u * std::cos(ta) + v * std::sin(ta)) * 2.0 * std::numbers::pi / hand.stroke_period;
        const double stroke = hand.stroke_depth * (0.5 + 0.5 * std::cos(t + phase));
        const double value = hand.base_luminance + r.level - stroke + cfg.pixel_noise * gaussian(rng);
        image.at(x, y) = clamp_to_byte(value);
      }
    }

    if (r.class_label == 0) {
      held.regions.push_back(ExternalRegion{r.piece_id, "tablet", quad, 0});
    } else {
      set.regions.push_back(RegionAnnotation{r.piece_id, "tablet", quad, r.class_label, r.scheme_id, r.cell % 2});
    }
  }
  if (!held.regions.empty()) {
    set.external_sets.push_back(std::move(held));
  }

  std::filesystem::create_directories(dir);
  fx.image_path = dir / "tablet.png";
  fx.annotation_path = dir / "annotations.json";
  save_png(image, fx.image_path);
  write_text_file(fx.annotation_path, annotations_to_json(set));
  return fx;
}

} // namespace scribe
