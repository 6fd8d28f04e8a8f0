#include "scribe/dataset_io.hpp"

#include "json_io.hpp"
#include "scribe/errors.hpp"
#include "scribe/util.hpp"

namespace scribe {

namespace detail {

json parse_json(std::string_view text, std::string_view where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(where) + ": " + e.what());
  }
}

json scheme_to_json(const ClassScheme& scheme) {
  json mapping = json::object();
  for (const auto& [cls, author] : scheme.mapping()) {
    mapping[std::to_string(cls)] = std::string(to_string(author));
  }
  return {{"id", scheme.id()}, {"n_classes", scheme.n_classes()}, {"author_of_class", mapping}};
}

ClassScheme scheme_from_json(const json& j) {
  const auto id = get<std::string>(j, "id", "scheme");
  std::map<int, Author> mapping;
  const auto classes = get<json>(j, "author_of_class", "scheme " + id);
  for (const auto& [cls, author] : classes.items()) {
    mapping[std::stoi(cls)] = author_from_string(author.get<std::string>());
  }
  return ClassScheme(id, get<int>(j, "n_classes", "scheme " + id), mapping);
}

json spec_to_json(const DatasetSpec& spec) {
  return {{"dataset_type", spec.dataset_type},
          {"zoom_enabled", spec.zoom_enabled},
          {"stride_px", spec.stride_px},
          {"scheme_id", spec.scheme_id},
          {"n_classes", spec.n_classes},
          {"seed", spec.seed},
          {"split_ratio", spec.split_ratio},
          {"augmentation",
           {{"shine_factors", spec.augmentation.shine_factors},
            {"shift_offsets_h", spec.augmentation.shift_offsets_h},
            {"shift_offsets_v", spec.augmentation.shift_offsets_v},
            {"zoom_factors", spec.augmentation.zoom_factors}}}};
}

DatasetSpec spec_from_json(const json& j) {
  DatasetSpec s;
  s.dataset_type = get<std::string>(j, "dataset_type", "dataset spec");
  s.zoom_enabled = get<bool>(j, "zoom_enabled", "dataset spec");
  s.stride_px = get<int>(j, "stride_px", "dataset spec");
  s.scheme_id = get<std::string>(j, "scheme_id", "dataset spec");
  s.n_classes = get<int>(j, "n_classes", "dataset spec");
  s.seed = get<std::uint64_t>(j, "seed", "dataset spec");
  s.split_ratio = get<double>(j, "split_ratio", "dataset spec");
  const auto aug = get<json>(j, "augmentation", "dataset spec");
  s.augmentation.shine_factors = get<std::vector<double>>(aug, "shine_factors", "augmentation");
  s.augmentation.shift_offsets_h = get<std::vector<int>>(aug, "shift_offsets_h", "augmentation");
  s.augmentation.shift_offsets_v = get<std::vector<int>>(aug, "shift_offsets_v", "augmentation");
  s.augmentation.zoom_factors = get<std::vector<double>>(aug, "zoom_factors", "augmentation");
  return s;
}

json provenance_to_json(const Provenance& p) {
  return {{"piece_id", p.piece_id}, {"chain", p.chain}, {"offset_x", p.offset_x}, {"offset_y", p.offset_y}};
}

Provenance provenance_from_json(const json& j) {
  return Provenance{get<std::string>(j, "piece_id", "provenance"), get<std::string>(j, "chain", "provenance"),
                    get<int>(j, "offset_x", "provenance"), get<int>(j, "offset_y", "provenance")};
}

} // namespace detail

using detail::get;
using detail::json;

namespace {

constexpr const char* kDatasetFormat = "scribe-dataset/1";
constexpr const char* kExternalFormat = "scribe-external-tiles/1";

std::string store_tile(const GrayImage& pixels, const std::filesystem::path& dir) {
  const auto bytes = encode_png(pixels);
  const auto hash = sha256_hex(bytes);
  const std::string rel = "tiles/" + hash.substr(0, 2) + "/" + hash + ".png";
  const auto full = dir / rel;
  if (!std::filesystem::exists(full)) {
    write_text_file(full, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return rel;
}

json sample_row(const TileSample& s, const std::filesystem::path& dir) {
  json row = {{"sample_id", s.sample_id},
              {"partition", std::string(to_string(s.partition))},
              {"true_class", s.true_class ? json(*s.true_class) : json(nullptr)},
              {"provenance", detail::provenance_to_json(s.provenance)}};
  row["file"] = store_tile(s.pixels, dir);
  return row;
}

TileSample read_row(const json& row, const std::filesystem::path& dir, bool load_pixels, int tile_size) {
  TileSample s;
  s.sample_id = get<std::string>(row, "sample_id", "sample");
  const std::string where = "sample " + s.sample_id;
  s.partition = partition_from_string(get<std::string>(row, "partition", where));
  const auto& tc = get<json>(row, "true_class", where);
  if (!tc.is_null()) {
    s.true_class = tc.get<int>();
  }
  s.provenance = detail::provenance_from_json(get<json>(row, "provenance", where));
  if (load_pixels) {
    s.pixels = load_image(dir / get<std::string>(row, "file", where));
    if (s.pixels.width() != tile_size || s.pixels.height() != tile_size) {
      throw ValidationError(where + ": tile raster is not " + std::to_string(tile_size) + " px square");
    }
  }
  return s;
}

} // namespace

void write_dataset(const TileDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json counts = json::object();
  for (const auto& [cls, c] : ds.counts) {
    counts[std::to_string(cls)] = {{"train", c.train}, {"test", c.test}};
  }
  json samples = json::array();
  for (const auto* group : {&ds.train, &ds.test}) {
    for (const auto& s : *group) {
      samples.push_back(sample_row(s, dir));
    }
  }
  json doc = {{"format", kDatasetFormat},
              {"spec", detail::spec_to_json(ds.spec)},
              {"scheme", detail::scheme_to_json(ds.scheme)},
              {"tile_size", ds.tile_size},
              {"counts", counts},
              {"samples", samples}};
  write_text_file(dir / "manifest.json", doc.dump(1) + "\n");
}

TileDataset read_dataset(const std::filesystem::path& dir, bool load_pixels) {
  const auto doc = detail::parse_json(read_text_file(dir / "manifest.json"), "dataset manifest");
  if (get<std::string>(doc, "format", "dataset manifest") != kDatasetFormat) {
    throw ParseError("dataset manifest: unsupported format");
  }
  TileDataset ds;
  ds.spec = detail::spec_from_json(get<json>(doc, "spec", "dataset manifest"));
  ds.scheme = detail::scheme_from_json(get<json>(doc, "scheme", "dataset manifest"));
  ds.tile_size = get<int>(doc, "tile_size", "dataset manifest");
  const auto counts = get<json>(doc, "counts", "dataset manifest");
  for (const auto& [cls, c] : counts.items()) {
    ds.counts[std::stoi(cls)] = ClassCounts{get<std::size_t>(c, "train", "counts"), get<std::size_t>(c, "test", "counts")};
  }
  for (const auto& row : get<json>(doc, "samples", "dataset manifest")) {
    auto s = read_row(row, dir, load_pixels, ds.tile_size);
    if (!s.true_class || !ds.scheme.valid_class(*s.true_class)) {
      throw ValidationError("sample " + s.sample_id + ": missing or invalid true_class");
    }
    if (s.partition == Partition::External) {
      throw ValidationError("sample " + s.sample_id + ": external tiles do not belong in a dataset");
    }
    (s.partition == Partition::Train ? ds.train : ds.test).push_back(std::move(s));
  }
  return ds;
}

const ClassScheme& LoadedExternalSet::scheme(std::string_view id) const {
  for (const auto& s : schemes) {
    if (s.id() == id) {
      return s;
    }
  }
  throw ValidationError("external set '" + set.set_id + "' has no scheme '" + std::string(id) + "'");
}

void write_external_set(const ExternalTileSet& set, const std::vector<ClassScheme>& schemes,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json js = json::array();
  for (const auto& s : schemes) {
    js.push_back(detail::scheme_to_json(s));
  }
  json samples = json::array();
  for (const auto& t : set.tiles) {
    samples.push_back(sample_row(t, dir));
  }
  json doc = {{"format", kExternalFormat}, {"set_id", set.set_id},     {"tile_size", set.tile_size},
              {"stride_px", set.stride_px}, {"schemes", js}, {"samples", samples}};
  write_text_file(dir / "manifest.json", doc.dump(1) + "\n");
}

LoadedExternalSet read_external_set(const std::filesystem::path& dir, bool load_pixels) {
  const auto doc = detail::parse_json(read_text_file(dir / "manifest.json"), "external tile manifest");
  if (get<std::string>(doc, "format", "external tile manifest") != kExternalFormat) {
    throw ParseError("external tile manifest: unsupported format");
  }
  LoadedExternalSet out;
  out.set.set_id = get<std::string>(doc, "set_id", "external tile manifest");
  out.set.tile_size = get<int>(doc, "tile_size", "external tile manifest");
  out.set.stride_px = get<int>(doc, "stride_px", "external tile manifest");
  for (const auto& s : get<json>(doc, "schemes", "external tile manifest")) {
    out.schemes.push_back(detail::scheme_from_json(s));
  }
  for (const auto& row : get<json>(doc, "samples", "external tile manifest")) {
    auto s = read_row(row, dir, load_pixels, out.set.tile_size);
    if (s.true_class) {
      throw ValidationError("external sample " + s.sample_id + " must be unlabeled");
    }
    out.set.tiles.push_back(std::move(s));
  }
  return out;
}

} // namespace scribe
