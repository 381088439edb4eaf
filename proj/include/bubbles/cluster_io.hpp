#pragma once

// Cluster documents. JSON object with fields density_exponent, vertices,
// edges and regions; the exterior label is the string "exterior". Floats are
// written with 17 significant digits, so save(load(s)) reproduces s.
//
//   {
//     "density_exponent": 2,
//     "vertices": [ {"id": 0, "x": 0, "y": 0, "pinned": true}, ... ],
//     "edges":    [ {"id": 0, "tail": 0, "head": 1, "left": 0, "right": "exterior"}, ... ],
//     "regions":  [ {"id": 0, "label": "A", "target_weighted_area": 10}, ... ]
//   }

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bubbles/cluster.hpp"
#include "bubbles/errors.hpp"

namespace bubbles {

namespace io_detail {

using Json = nlohmann::json;

inline std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string label(int region) { return region == kExterior ? "\"exterior\"" : std::to_string(region); }

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline int integer(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

inline int region_ref(const Json& obj, const char* key, const std::string& where) {
  const Json& v = field(obj, key, where);
  if (v.is_string() && v.get<std::string>() == "exterior") return kExterior;
  if (v.is_number_integer()) return v.get<int>();
  throw ParseError(where + "." + key + ": expected a region id or \"exterior\"");
}

inline const Json& array(const Json& doc, const char* key) {
  const Json& v = field(doc, key, "document");
  if (!v.is_array()) throw ParseError(std::string(key) + ": expected an array");
  return v;
}

}  // namespace io_detail

inline std::string save_cluster(const Cluster& c) {
  using namespace io_detail;
  std::ostringstream out;
  out << "{\n  \"density_exponent\": " << real(c.density.p) << ",\n  \"vertices\": [";
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    const Vertex& v = c.vertices[i];
    out << (i ? ",\n" : "\n") << "    {\"id\": " << v.id << ", \"x\": " << real(v.pos.x) << ", \"y\": " << real(v.pos.y)
        << ", \"pinned\": " << (v.pinned_to_origin ? "true" : "false") << "}";
  }
  out << (c.vertices.empty() ? "" : "\n  ") << "],\n  \"edges\": [";
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    const Edge& e = c.edges[i];
    out << (i ? ",\n" : "\n") << "    {\"id\": " << e.id << ", \"tail\": " << e.tail << ", \"head\": " << e.head
        << ", \"left\": " << label(e.left_region) << ", \"right\": " << label(e.right_region) << "}";
  }
  out << (c.edges.empty() ? "" : "\n  ") << "],\n  \"regions\": [";
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    const Region& r = c.regions[i];
    out << (i ? ",\n" : "\n") << "    {\"id\": " << r.id << ", \"label\": " << Json(r.label).dump()
        << ", \"target_weighted_area\": " << real(r.target_weighted_area) << "}";
  }
  out << (c.regions.empty() ? "" : "\n  ") << "]\n}\n";
  return out.str();
}

// Parses without validating topology.
inline Cluster parse_cluster(const std::string& text) {
  using namespace io_detail;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  Cluster c;
  c.density.p = number(doc, "density_exponent", "document");
  const Json& vs = array(doc, "vertices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string at = "vertices[" + std::to_string(i) + "]";
    const Json& pinned = field(vs[i], "pinned", at);
    if (!pinned.is_boolean()) throw ParseError(at + ".pinned: expected true or false");
    c.vertices.push_back({integer(vs[i], "id", at), {number(vs[i], "x", at), number(vs[i], "y", at)}, pinned.get<bool>()});
  }
  const Json& es = array(doc, "edges");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string at = "edges[" + std::to_string(i) + "]";
    c.edges.push_back({integer(es[i], "id", at), integer(es[i], "tail", at), integer(es[i], "head", at),
                       region_ref(es[i], "left", at), region_ref(es[i], "right", at)});
  }
  const Json& rs = array(doc, "regions");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string at = "regions[" + std::to_string(i) + "]";
    const Json& lab = field(rs[i], "label", at);
    if (!lab.is_string()) throw ParseError(at + ".label: expected a string");
    c.regions.push_back({integer(rs[i], "id", at), number(rs[i], "target_weighted_area", at), lab.get<std::string>()});
  }
  return c;
}

inline Cluster load_cluster(const std::string& text) {
  Cluster c = parse_cluster(text);
  const auto problems = validate(c);
  if (!problems.empty()) throw ValidationError("invalid cluster:\n" + describe(problems));
  return c;
}

inline Cluster read_cluster_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_cluster(buf.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace bubbles
