#include "scribe/annotations.hpp"

#include "scribe/errors.hpp"
#include "scribe/util.hpp"

#include <json.hpp>

#include <set>

namespace scribe {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& obj, const char* key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string(where) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

Quad parse_quad(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(std::string(where) + ": quad must hold four [x, y] corners");
  }
  Quad q{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& c = j[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ParseError(std::string(where) + ": quad corner must be [x, y]");
    }
    q[i] = Point{c[0].get<double>(), c[1].get<double>()};
  }
  return q;
}

json quad_json(const Quad& q) {
  json out = json::array();
  for (const auto& p : q) {
    out.push_back({p.x, p.y});
  }
  return out;
}

void check_quad(const Quad& q, const std::string& piece_id) {
  if (quad_area(q) < 1.0) {
    throw ValidationError("region '" + piece_id + "': degenerate quad");
  }
  if (!quad_is_convex_clockwise(q)) {
    throw ValidationError("region '" + piece_id + "': quad must be convex with clockwise corners");
  }
}

} // namespace

const ClassScheme& AnnotationSet::scheme(std::string_view id) const {
  for (const auto& s : schemes) {
    if (s.id() == id) {
      return s;
    }
  }
  throw ValidationError("unknown class scheme '" + std::string(id) + "'");
}

const ClassScheme& AnnotationSet::scheme_with_classes(int n_classes) const {
  const ClassScheme* found = nullptr;
  for (const auto& s : schemes) {
    if (s.n_classes() == n_classes) {
      if (found) {
        throw ValidationError("more than one scheme with " + std::to_string(n_classes) + " classes");
      }
      found = &s;
    }
  }
  if (!found) {
    throw ValidationError("no scheme with " + std::to_string(n_classes) + " classes");
  }
  return *found;
}

const ExternalRegionSet& AnnotationSet::external_set(std::string_view set_id) const {
  for (const auto& s : external_sets) {
    if (s.set_id == set_id) {
      return s;
    }
  }
  throw ValidationError("unknown external set '" + std::string(set_id) + "'");
}

AnnotationSet parse_annotations(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("annotation file: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("annotation file: top level must be an object");
  }

  AnnotationSet set;
  std::set<std::string> scheme_ids;
  std::set<std::string> source_ids;
  std::set<std::string> piece_ids;

  for (const auto& s : field<json>(doc, "schemes", "annotation file")) {
    const auto id = field<std::string>(s, "id", "scheme");
    const auto n = field<int>(s, "n_classes", "scheme " + id);
    std::map<int, Author> mapping;
    const auto classes = field<json>(s, "author_of_class", "scheme " + id);
    for (const auto& [cls, author] : classes.items()) {
      int c = 0;
      try {
        c = std::stoi(cls);
      } catch (const std::exception&) {
        throw ParseError("scheme " + id + ": class key '" + cls + "' is not an integer");
      }
      if (!author.is_string()) {
        throw ParseError("scheme " + id + ": author must be a string");
      }
      mapping[c] = author_from_string(author.get<std::string>());
    }
    if (!scheme_ids.insert(id).second) {
      throw ValidationError("duplicate scheme id '" + id + "'");
    }
    set.schemes.emplace_back(id, n, mapping);
  }

  for (const auto& s : field<json>(doc, "sources", "annotation file")) {
    SourceRef ref{field<std::string>(s, "id", "source"), field<std::string>(s, "path", "source")};
    if (!source_ids.insert(ref.id).second) {
      throw ValidationError("duplicate source id '" + ref.id + "'");
    }
    set.sources.push_back(std::move(ref));
  }

  for (const auto& r : field<json>(doc, "regions", "annotation file")) {
    RegionAnnotation ann;
    ann.piece_id = field<std::string>(r, "piece_id", "region");
    const std::string where = "region " + ann.piece_id;
    ann.source_id = field<std::string>(r, "source_id", where);
    ann.quad = parse_quad(field<json>(r, "quad", where), where);
    ann.class_label = field<int>(r, "class_label", where);
    ann.scheme_id = field<std::string>(r, "scheme_id", where);
    ann.line_pair_index = field<int>(r, "line_pair_index", where);

    if (!piece_ids.insert(ann.piece_id).second) {
      throw ValidationError("duplicate piece id '" + ann.piece_id + "'");
    }
    if (!source_ids.contains(ann.source_id)) {
      throw ValidationError(where + ": undeclared source '" + ann.source_id + "'");
    }
    if (!set.scheme(ann.scheme_id).valid_class(ann.class_label)) {
      throw ValidationError(where + ": class_label " + std::to_string(ann.class_label) +
                            " invalid under scheme '" + ann.scheme_id + "'");
    }
    if (ann.line_pair_index < 0) {
      throw ValidationError(where + ": line_pair_index must be non-negative");
    }
    check_quad(ann.quad, ann.piece_id);
    set.regions.push_back(std::move(ann));
  }

  if (doc.contains("external_sets")) {
    std::set<std::string> set_ids;
    for (const auto& e : doc.at("external_sets")) {
      ExternalRegionSet ext;
      ext.set_id = field<std::string>(e, "set_id", "external set");
      if (!set_ids.insert(ext.set_id).second) {
        throw ValidationError("duplicate external set '" + ext.set_id + "'");
      }
      for (const auto& r : field<json>(e, "regions", "external set " + ext.set_id)) {
        ExternalRegion reg;
        reg.piece_id = field<std::string>(r, "piece_id", "external region");
        const std::string where = "external region " + reg.piece_id;
        reg.source_id = field<std::string>(r, "source_id", where);
        reg.quad = parse_quad(field<json>(r, "quad", where), where);
        reg.line_pair_index = r.contains("line_pair_index") ? field<int>(r, "line_pair_index", where) : 0;
        if (!piece_ids.insert(reg.piece_id).second) {
          throw ValidationError("duplicate piece id '" + reg.piece_id + "'");
        }
        if (!source_ids.contains(reg.source_id)) {
          throw ValidationError(where + ": undeclared source '" + reg.source_id + "'");
        }
        check_quad(reg.quad, reg.piece_id);
        ext.regions.push_back(std::move(reg));
      }
      if (ext.regions.empty()) {
        throw ValidationError("external set '" + ext.set_id + "' has no regions");
      }
      set.external_sets.push_back(std::move(ext));
    }
  }
  return set;
}

std::string annotations_to_json(const AnnotationSet& set) {
  json doc;
  doc["schemes"] = json::array();
  for (const auto& s : set.schemes) {
    json mapping = json::object();
    for (const auto& [cls, author] : s.mapping()) {
      mapping[std::to_string(cls)] = std::string(to_string(author));
    }
    doc["schemes"].push_back({{"id", s.id()}, {"n_classes", s.n_classes()}, {"author_of_class", mapping}});
  }
  doc["sources"] = json::array();
  for (const auto& s : set.sources) {
    doc["sources"].push_back({{"id", s.id}, {"path", s.path}});
  }
  doc["regions"] = json::array();
  for (const auto& r : set.regions) {
    doc["regions"].push_back({{"piece_id", r.piece_id},
                              {"source_id", r.source_id},
                              {"quad", quad_json(r.quad)},
                              {"class_label", r.class_label},
                              {"scheme_id", r.scheme_id},
                              {"line_pair_index", r.line_pair_index}});
  }
  if (!set.external_sets.empty()) {
    doc["external_sets"] = json::array();
    for (const auto& e : set.external_sets) {
      json regions = json::array();
      for (const auto& r : e.regions) {
        regions.push_back({{"piece_id", r.piece_id},
                           {"source_id", r.source_id},
                           {"quad", quad_json(r.quad)},
                           {"line_pair_index", r.line_pair_index}});
      }
      doc["external_sets"].push_back({{"set_id", e.set_id}, {"regions", regions}});
    }
  }
  return doc.dump(2) + "\n";
}

void validate_bounds(const AnnotationSet& set,
                     const std::map<std::string, SourceImage, std::less<>>& images) {
  auto check = [&](const std::string& piece_id, const std::string& source_id, const Quad& q) {
    const auto it = images.find(source_id);
    if (it == images.end()) {
      throw ValidationError("region '" + piece_id + "': source image '" + source_id + "' not loaded");
    }
    if (!quad_inside(q, it->second.pixels.width(), it->second.pixels.height())) {
      throw ValidationError("region '" + piece_id + "': quad outside the bounds of '" + source_id + "'");
    }
  };
  for (const auto& r : set.regions) {
    check(r.piece_id, r.source_id, r.quad);
  }
  for (const auto& e : set.external_sets) {
    for (const auto& r : e.regions) {
      check(r.piece_id, r.source_id, r.quad);
    }
  }
}

LoadedAnnotations load_annotations(const std::filesystem::path& path) {
  LoadedAnnotations out;
  out.set = parse_annotations(read_text_file(path));
  const auto base = path.parent_path();
  for (const auto& src : out.set.sources) {
    std::filesystem::path p(src.path);
    if (p.is_relative()) {
      p = base / p;
    }
    out.images.emplace(src.id, SourceImage{src.id, load_image(p)});
  }
  validate_bounds(out.set, out.images);
  return out;
}

std::vector<PieceImage> LoadedAnnotations::extract_pieces(std::string_view scheme_id) const {
  std::vector<PieceImage> pieces;
  for (const auto& r : set.regions) {
    if (r.scheme_id == scheme_id) {
      pieces.push_back(extract_piece(images.find(r.source_id)->second, r));
    }
  }
  return pieces;
}

std::vector<PieceImage> LoadedAnnotations::extract_external(std::string_view set_id) const {
  std::vector<PieceImage> pieces;
  for (const auto& r : set.external_set(set_id).regions) {
    RegionAnnotation ann{r.piece_id, r.source_id, r.quad, 0, "", r.line_pair_index};
    pieces.push_back(extract_piece(images.find(r.source_id)->second, ann));
  }
  return pieces;
}

} // namespace scribe
