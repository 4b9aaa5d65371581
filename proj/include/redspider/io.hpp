#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "redspider/rainworm.hpp"
#include "redspider/sepexample.hpp"

namespace redspider {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Relational structures.
// {"signature": {...}, "elements": [...], "atoms": [["pred", ["e1","e2"]], ...],
//  "constants": {"a": "e0"}}; colored predicates appear as "G:pred" / "R:pred".

inline json structure_to_json(const structure& s) {
  json out;
  out["signature"] = json::object();
  for (const auto& [pred, arity] : s.predicates) out["signature"][pred] = arity;
  out["elements"] = json::array();
  for (elem_id e : s.elements) out["elements"].push_back(name_of(e));
  out["atoms"] = json::array();
  for (const auto& a : s.atoms) {
    json args = json::array();
    for (elem_id e : a.args) args.push_back(name_of(e));
    out["atoms"].push_back(json::array({a.pred, args}));
  }
  out["constants"] = json::object();
  for (const auto& [k, v] : s.constant_binding) out["constants"][k] = name_of(v);
  return out;
}

inline structure structure_from_json(const json& j) {
  structure s;
  if (!j.is_object() || !j.contains("atoms"))
    throw std::invalid_argument("structure JSON must be an object with an atoms array");
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 2)
      throw std::invalid_argument("atom must be a [pred, args] pair");
    std::vector<elem_id> args;
    for (const auto& e : a.at(1)) args.push_back(intern(e.get<std::string>()));
    s.add_atom(a.at(0).get<std::string>(), std::move(args));
  }
  if (j.contains("elements"))
    for (const auto& e : j.at("elements")) s.elements.insert(intern(e.get<std::string>()));
  if (j.contains("constants"))
    for (const auto& [k, v] : j.at("constants").items())
      s.bind_constant(k, intern(v.get<std::string>()));
  if (j.contains("signature"))
    for (const auto& [pred, arity] : j.at("signature").items()) {
      auto [it, fresh] = s.predicates.emplace(pred, arity.get<int>());
      if (!fresh && it->second != arity.get<int>())
        throw std::invalid_argument("signature arity clash on " + pred);
    }
  return s;
}

// ---------------------------------------------------------------------------
// Swarms. {"edges": [{"label": {"color": "G", "upper": 3, "lower": null},
//                     "src": "a", "dst": "b"}, ...]}

inline json spider_label_to_json(const ideal_spider& sp) {
  json out;
  out["color"] = sp.col == hue::green ? "G" : "R";
  out["upper"] = sp.upper ? json(*sp.upper) : json(nullptr);
  out["lower"] = sp.lower ? json(*sp.lower) : json(nullptr);
  return out;
}

inline ideal_spider spider_label_from_json(const json& j) {
  ideal_spider sp;
  std::string c = j.at("color").get<std::string>();
  if (c == "G")
    sp.col = hue::green;
  else if (c == "R")
    sp.col = hue::red;
  else
    throw std::invalid_argument("spider color must be G or R");
  if (!j.at("upper").is_null()) sp.upper = j.at("upper").get<int>();
  if (!j.at("lower").is_null()) sp.lower = j.at("lower").get<int>();
  return sp;
}

inline json swarm_to_json(const swarm_t& m) {
  json edges = json::array();
  for (const auto& e : m.edges) {
    json je;
    je["label"] = spider_label_to_json(e.label);
    je["src"] = name_of(e.src);
    je["dst"] = name_of(e.dst);
    edges.push_back(std::move(je));
  }
  return json{{"edges", std::move(edges)}};
}

inline swarm_t swarm_from_json(const json& j) {
  swarm_t m;
  for (const auto& je : j.at("edges"))
    m.edges.insert(swarm_edge{spider_label_from_json(je.at("label")),
                              intern(je.at("src").get<std::string>()),
                              intern(je.at("dst").get<std::string>())});
  return m;
}

// ---------------------------------------------------------------------------
// Green graphs: like swarms but with integer-or-null labels, plus an optional
// symbol table {"5": "alpha", ...} used by the DOT exporter.

inline json greengraph_to_json(const green_graph& g,
                               const std::map<int, std::string>* symbols = nullptr) {
  json edges = json::array();
  for (const auto& e : g.edges) {
    json je;
    je["label"] = e.label ? json(*e.label) : json(nullptr);
    je["src"] = name_of(e.src);
    je["dst"] = name_of(e.dst);
    edges.push_back(std::move(je));
  }
  json out{{"edges", std::move(edges)}};
  if (symbols) {
    out["symbols"] = json::object();
    for (const auto& [code, name] : *symbols) out["symbols"][std::to_string(code)] = name;
  }
  return out;
}

inline green_graph greengraph_from_json(const json& j) {
  green_graph g;
  for (const auto& je : j.at("edges")) {
    std::optional<int> label;
    if (!je.at("label").is_null()) label = je.at("label").get<int>();
    g.edges.insert(gg_edge{label, intern(je.at("src").get<std::string>()),
                           intern(je.at("dst").get<std::string>())});
  }
  return g;
}

inline std::map<int, std::string> symbols_from_json(const json& j) {
  std::map<int, std::string> out;
  if (j.contains("symbols"))
    for (const auto& [code, name] : j.at("symbols").items())
      out[std::stoi(code)] = name.get<std::string>();
  return out;
}

// ---------------------------------------------------------------------------
// DOT export. Vertex names are quoted verbatim; edge labels use the symbol
// table when one covers the code, the code number otherwise, and the empty
// string for the empty label.

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string greengraph_dot(const green_graph& g,
                                  const std::map<int, std::string>& symbols = {}) {
  std::ostringstream out;
  out << "digraph G {\n";
  for (elem_id v : g.vertices()) out << "  " << detail::dot_quote(name_of(v)) << ";\n";
  for (const auto& e : g.edges) {
    std::string label;
    if (e.label) {
      auto it = symbols.find(*e.label);
      label = it != symbols.end() ? it->second : std::to_string(*e.label);
    }
    out << "  " << detail::dot_quote(name_of(e.src)) << " -> "
        << detail::dot_quote(name_of(e.dst)) << " [label=" << detail::dot_quote(label)
        << "];\n";
  }
  out << "}\n";
  return out.str();
}

inline std::string swarm_dot(const swarm_t& m) {
  std::ostringstream out;
  out << "digraph S {\n";
  for (elem_id v : m.vertices()) out << "  " << detail::dot_quote(name_of(v)) << ";\n";
  for (const auto& e : m.edges)
    out << "  " << detail::dot_quote(name_of(e.src)) << " -> "
        << detail::dot_quote(name_of(e.dst)) << " [label=" << detail::dot_quote(e.label.str())
        << "];\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Machines. Partitioned symbol lists plus instructions:
// {"a0": [...], ..., "delta": [{"shape": "d4", "lhs": [...], "rhs": [...]}]}

inline json machine_to_json(const rainworm_machine& m) {
  json out;
  auto put = [&](const char* key, const std::set<std::string>& cls) {
    out[key] = json::array();
    for (const auto& s : cls) out[key].push_back(s);
  };
  put("a0", m.a0);
  put("a1", m.a1);
  put("q_r0", m.q_r0);
  put("q_l0", m.q_l0);
  put("q_r1", m.q_r1);
  put("q_l1", m.q_l1);
  put("q_rg0", m.q_rg0);
  put("q_rg1", m.q_rg1);
  out["delta"] = json::array();
  for (const auto& ins : m.delta) {
    json ji;
    ji["shape"] = ins.shape;
    ji["lhs"] = ins.lhs;
    ji["rhs"] = ins.rhs;
    out["delta"].push_back(std::move(ji));
  }
  return out;
}

inline rainworm_machine machine_from_json(const json& j) {
  rainworm_machine m;
  auto get = [&](const char* key, std::set<std::string>& cls) {
    if (!j.contains(key)) return;
    for (const auto& s : j.at(key)) cls.insert(s.get<std::string>());
  };
  get("a0", m.a0);
  get("a1", m.a1);
  get("q_r0", m.q_r0);
  get("q_l0", m.q_l0);
  get("q_r1", m.q_r1);
  get("q_l1", m.q_l1);
  get("q_rg0", m.q_rg0);
  get("q_rg1", m.q_rg1);
  if (!j.contains("delta"))
    throw std::invalid_argument("machine JSON must have a delta array");
  for (const auto& ji : j.at("delta")) {
    rw_instruction ins;
    ins.shape = ji.at("shape").get<std::string>();
    for (const auto& s : ji.at("lhs")) ins.lhs.push_back(s.get<std::string>());
    for (const auto& s : ji.at("rhs")) ins.rhs.push_back(s.get<std::string>());
    m.delta.push_back(std::move(ins));
  }
  auto problems = validate_machine(m);
  if (!problems.empty())
    throw std::invalid_argument("invalid machine: " + problems.front());
  return m;
}

inline json rules_l2_to_json(const std::vector<rule_l2>& rules) {
  json out = json::array();
  auto lab = [](const std::optional<int>& l) { return l ? json(*l) : json(nullptr); };
  for (const auto& r : rules)
    out.push_back(json{{"i1", lab(r.i1)},
                       {"i2", lab(r.i2)},
                       {"i3", lab(r.i3)},
                       {"i4", lab(r.i4)},
                       {"mode", r.mode == glue::wedge ? "wedge" : "vee"}});
  return out;
}

// ---------------------------------------------------------------------------
// Experiment reports and file plumbing.

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json make_report(const std::string& command, const json& inputs,
                        const json& payload, double timing_ms,
                        const json& symbols = json::object()) {
  json out;
  out["tool"] = "redspider";
  out["version"] = "0.1.0";
  out["command"] = command;
  out["inputs"] = inputs;
  out["payload"] = payload;
  out["symbols"] = symbols;
  out["timing_ms"] = timing_ms;
  return out;
}

inline json symbol_table_json(const label_universe& u) {
  json out = json::object();
  for (const auto& [code, name] : u.names) out[std::to_string(code)] = name;
  return out;
}

}  // namespace redspider
