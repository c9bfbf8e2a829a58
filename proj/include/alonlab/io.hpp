#pragma once

// JSON file formats.  Graphs: {"n", "d", "model", "edges": [{"u", "v",
// "label": {"kind", "j"}, "loop"}]} with 1-based vertices; a perm edge
// (u,v,j) encodes pi_j(u) = v.  Tangles use the same shape but "model" and
// "d" are mandatory (the ambient degree, not enforced on the tangle).
// Variable-length graphs: {"directed", "vertices", "edges": [{"u", "v",
// "len"} | {"u", "v", "tree_series": {"c", "d"}}]}, 1-based as well;
// directedness is a property of the whole file.  An undirected monomial
// loop may carry "half": true to mark single-direction traversal.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "tangles.hpp"
#include "vlg.hpp"

namespace alonlab {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("io: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw domain_error("io: read failure on " + path);
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("io: cannot create " + path);
  out << text;
  out.flush();
  if (!out) throw domain_error("io: write failure on " + path);
}

inline nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw domain_error(std::string("json: ") + e.what());
  }
}

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j,
                                        const char* key) {
  if (!j.is_object())
    throw domain_error(std::string("json: expected an object holding \"") +
                       key + "\"");
  auto it = j.find(key);
  if (it == j.end())
    throw domain_error(std::string("json: missing field \"") + key + "\"");
  return *it;
}

inline int json_int(const nlohmann::json& j, const char* key) {
  const auto& f = json_field(j, key);
  if (!f.is_number_integer())
    throw domain_error(std::string("json: field \"") + key +
                       "\" must be an integer");
  return f.get<int>();
}

inline double json_number(const nlohmann::json& j, const char* key) {
  const auto& f = json_field(j, key);
  if (!f.is_number())
    throw domain_error(std::string("json: field \"") + key +
                       "\" must be a number");
  return f.get<double>();
}

inline std::string json_string(const nlohmann::json& j, const char* key) {
  const auto& f = json_field(j, key);
  if (!f.is_string())
    throw domain_error(std::string("json: field \"") + key +
                       "\" must be a string");
  return f.get<std::string>();
}

inline char model_from_string(const std::string& s) {
  if (s.size() == 1 && (s[0] == 'g' || s[0] == 'h' || s[0] == 'i' ||
                        s[0] == 'j'))
    return s[0];
  throw domain_error("json: model must be one of \"g\", \"h\", \"i\", \"j\"");
}

inline nlohmann::json edge_to_json(const EdgePair& p) {
  // stored pairs never carry perm_inv, but serialize it safely anyway
  int u = p.u, v = p.v;
  Label lab = p.label;
  if (lab.kind == LabelKind::perm_inv) {
    std::swap(u, v);
    lab = lab.inverse();
  }
  const char* kind = lab.kind == LabelKind::perm      ? "perm"
                     : lab.kind == LabelKind::match   ? "match"
                                                      : "halfloop";
  const char* loop = p.loop == LoopKind::normal  ? "normal"
                     : p.loop == LoopKind::whole ? "whole"
                                                 : "half";
  return {{"u", u + 1},
          {"v", v + 1},
          {"label", {{"kind", kind}, {"j", lab.j}}},
          {"loop", loop}};
}

inline EdgeSpec edge_from_json(const nlohmann::json& j) {
  EdgeSpec e;
  e.u = json_int(j, "u");
  e.v = json_int(j, "v");
  const auto& lab = json_field(j, "label");
  std::string kind = json_string(lab, "kind");
  if (kind == "perm")
    e.label.kind = LabelKind::perm;
  else if (kind == "match")
    e.label.kind = LabelKind::match;
  else if (kind == "halfloop")
    e.label.kind = LabelKind::halfloop;
  else
    throw domain_error("json: unknown label kind \"" + kind + "\"");
  e.label.j = json_int(lab, "j");
  std::string loop = json_string(j, "loop");
  if (loop == "normal")
    e.loop = LoopKind::normal;
  else if (loop == "whole")
    e.loop = LoopKind::whole;
  else if (loop == "half")
    e.loop = LoopKind::half;
  else
    throw domain_error("json: unknown loop kind \"" + loop + "\"");
  return e;
}

inline std::vector<EdgeSpec> edges_from_json(const nlohmann::json& j) {
  const auto& arr = json_field(j, "edges");
  if (!arr.is_array()) throw domain_error("json: \"edges\" must be an array");
  std::vector<EdgeSpec> es;
  es.reserve(arr.size());
  for (const auto& je : arr) es.push_back(edge_from_json(je));
  return es;
}

}  // namespace detail

inline nlohmann::json graph_to_json(const LabeledGraph& g) {
  nlohmann::json j;
  j["n"] = g.n;
  j["d"] = g.d ? nlohmann::json(*g.d) : nlohmann::json(nullptr);
  j["model"] =
      g.model ? nlohmann::json(std::string(1, *g.model)) : nlohmann::json(nullptr);
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& p : g.pairs) edges.push_back(detail::edge_to_json(p));
  return j;
}

inline LabeledGraph graph_from_json(const nlohmann::json& j) {
  int n = detail::json_int(j, "n");
  std::optional<int> d;
  const auto& jd = detail::json_field(j, "d");
  if (!jd.is_null()) {
    if (!jd.is_number_integer())
      throw domain_error("json: field \"d\" must be an integer or null");
    d = jd.get<int>();
  }
  std::optional<char> model;
  const auto& jm = detail::json_field(j, "model");
  if (!jm.is_null()) {
    if (!jm.is_string())
      throw domain_error("json: field \"model\" must be a string or null");
    model = detail::model_from_string(jm.get<std::string>());
  }
  return build_graph(n, detail::edges_from_json(j), d, model);
}

inline nlohmann::json tangle_to_json(const Tangle& t) {
  nlohmann::json j = graph_to_json(t.graph);
  j["model"] = std::string(1, t.model);
  j["d"] = t.d;
  return j;
}

inline Tangle tangle_from_json(const nlohmann::json& j) {
  const auto& jm = detail::json_field(j, "model");
  if (!jm.is_string())
    throw domain_error("json: a tangle needs a concrete \"model\"");
  const auto& jd = detail::json_field(j, "d");
  if (!jd.is_number_integer())
    throw domain_error("json: a tangle needs a concrete \"d\"");
  return make_tangle(detail::json_int(j, "n"), detail::edges_from_json(j),
                     detail::model_from_string(jm.get<std::string>()),
                     jd.get<int>());
}

inline nlohmann::json vlg_to_json(const VLG& g) {
  validate(g);
  bool directed = false;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (i == 0)
      directed = g.edges[i].directed;
    else if (g.edges[i].directed != directed)
      throw domain_error("vlg json: edges of mixed directedness");
  }
  nlohmann::json j;
  j["directed"] = directed;
  j["vertices"] = g.n;
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) {
    nlohmann::json je{{"u", e.u + 1}, {"v", e.v + 1}};
    if (e.kind == WeightKind::monomial) {
      je["len"] = e.len;
      if (e.half) je["half"] = true;
    } else {
      je["tree_series"] = {{"c", e.scale}, {"d", e.tree_d}};
    }
    edges.push_back(je);
  }
  return j;
}

inline VLG vlg_from_json(const nlohmann::json& j) {
  const auto& jdir = detail::json_field(j, "directed");
  if (!jdir.is_boolean())
    throw domain_error("json: field \"directed\" must be a boolean");
  bool directed = jdir.get<bool>();
  VLG g;
  g.n = detail::json_int(j, "vertices");
  const auto& arr = detail::json_field(j, "edges");
  if (!arr.is_array()) throw domain_error("json: \"edges\" must be an array");
  for (const auto& je : arr) {
    VlgEdge e;
    e.u = detail::json_int(je, "u") - 1;
    e.v = detail::json_int(je, "v") - 1;
    e.directed = directed;
    bool has_len = je.is_object() && je.contains("len");
    bool has_tree = je.is_object() && je.contains("tree_series");
    if (has_len == has_tree)
      throw domain_error(
          "json: a vlg edge carries exactly one of \"len\" and "
          "\"tree_series\"");
    if (has_len) {
      const auto& jl = detail::json_field(je, "len");
      if (!jl.is_number_integer())
        throw domain_error("json: field \"len\" must be an integer");
      e.len = jl.get<long long>();
      if (je.contains("half")) {
        const auto& jh = *je.find("half");
        if (!jh.is_boolean())
          throw domain_error("json: field \"half\" must be a boolean");
        e.half = jh.get<bool>();
      }
    } else {
      const auto& ts = detail::json_field(je, "tree_series");
      e.kind = WeightKind::tree_series;
      e.scale = detail::json_number(ts, "c");
      e.tree_d = detail::json_number(ts, "d");
    }
    g.edges.push_back(e);
  }
  validate(g);
  return g;
}

inline nlohmann::json read_json_file(const std::string& path) {
  return parse_json(read_text_file(path));
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace alonlab
