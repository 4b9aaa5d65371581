#pragma once

#include <optional>
#include <vector>

#include "redspider/spider.hpp"

namespace redspider {

inline std::optional<ideal_spider> algebra(std::optional<int> upper,
                                           std::optional<int> lower,
                                           const ideal_spider& sp) {
  auto fits = [](const std::optional<int>& sub, const std::optional<int>& sup) {
    return !sub || (sup && *sub == *sup);
  };
  if (!fits(sp.upper, upper) || !fits(sp.lower, lower)) return std::nullopt;
  auto minus = [](const std::optional<int>& sup, const std::optional<int>& sub) {
    return sub ? std::optional<int>{} : sup;
  };
  return ideal_spider{other(sp.col), minus(upper, sp.upper), minus(lower, sp.lower)};
}

struct rule_l1 {
  std::optional<int> u1, l1;  // left operand legs
  std::optional<int> u2, l2;  // right operand legs
  glue mode = glue::wedge;    // wedge: shared target; vee: shared source
  int origin = -1;            // index of the level-2 rule this came from; -1: base
};

struct swarm_fresh {
  long counter = 0;
  elem_id next(const std::set<elem_id>& used) {
    for (;;) {
      elem_id e = intern("w" + std::to_string(counter++));
      if (!used.count(e)) return e;
    }
  }
};

struct swarm_result {
  swarm_t m;
  int stages_run = 0;
  bool reached_fixpoint = false;
};

namespace detail {

// Lazy single application of an L1 rule to a pair of same-color edges sharing
// the mode's endpoint. Returns true when it added the witness pair.
inline bool fire_l1(swarm_t& m, const rule_l1& r, const swarm_edge& e1,
                    const swarm_edge& e2, swarm_fresh& fresh,
                    std::set<elem_id>& used) {
  if (e1.label.col != e2.label.col) return false;
  bool shared = r.mode == glue::wedge ? e1.dst == e2.dst : e1.src == e2.src;
  if (!shared) return false;
  auto p1 = algebra(r.u1, r.l1, e1.label);
  auto p2 = algebra(r.u2, r.l2, e2.label);
  if (!p1 || !p2) return false;
  elem_id k1 = r.mode == glue::wedge ? e1.src : e1.dst;
  elem_id k2 = r.mode == glue::wedge ? e2.src : e2.dst;
  // witness: a shared fresh-side endpoint carrying both product edges
  for (const auto& w : m.edges) {
    if (w.label != *p1) continue;
    bool w_keeps = r.mode == glue::wedge ? w.src == k1 : w.dst == k1;
    if (!w_keeps) continue;
    elem_id cand = r.mode == glue::wedge ? w.dst : w.src;
    swarm_edge need{*p2, r.mode == glue::wedge ? k2 : cand,
                    r.mode == glue::wedge ? cand : k2};
    if (m.edges.count(need)) return false;
  }
  elem_id nv = fresh.next(used);
  used.insert(nv);
  if (r.mode == glue::wedge) {
    m.edges.insert(swarm_edge{*p1, k1, nv});
    m.edges.insert(swarm_edge{*p2, k2, nv});
  } else {
    m.edges.insert(swarm_edge{*p1, nv, k1});
    m.edges.insert(swarm_edge{*p2, nv, k2});
  }
  return true;
}

}  // namespace detail

inline swarm_result saturate_swarm(const std::vector<rule_l1>& rules, const swarm_t& m0,
                                   int stage_budget) {
  swarm_result r;
  r.m = m0;
  swarm_fresh fresh;
  std::set<elem_id> used = m0.vertices();
  for (int stage = 0; stage < stage_budget; ++stage) {
    swarm_t snapshot = r.m;
    bool changed = false;
    for (const auto& rule : rules)
      for (const auto& e1 : snapshot.edges)
        for (const auto& e2 : snapshot.edges)
          if (detail::fire_l1(r.m, rule, e1, e2, fresh, used)) changed = true;
    ++r.stages_run;
    if (!changed) {
      r.reached_fixpoint = true;
      break;
    }
  }
  if (rules.empty()) r.reached_fixpoint = true;
  return r;
}

inline std::vector<binary_query_t> compile_rules(const std::vector<rule_l1>& rules,
                                                 const label_universe& u) {
  std::vector<binary_query_t> out;
  for (size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    out.push_back(binary_query(r.u1, r.l1, r.u2, r.l2, r.mode, u,
                               "c" + std::to_string(i) + "."));
  }
  return out;
}

inline std::vector<conjunctive_query> queries_of(const std::vector<binary_query_t>& qs) {
  std::vector<conjunctive_query> out;
  for (const auto& q : qs) out.push_back(q.canonical);
  return out;
}

inline bool has_red_spider(const swarm_t& m) {
  for (const auto& e : m.edges)
    if (e.label == full_red()) return true;
  return false;
}

inline bool has_green_spider(const swarm_t& m) {
  for (const auto& e : m.edges)
    if (e.label == full_green()) return true;
  return false;
}

// Least fixpoint of the importance relation: the seed edge, plus every edge
// that occurs in a present witness pair for a rule applied to important edges.
inline std::set<swarm_edge> important_edges(const swarm_t& m,
                                            const std::vector<rule_l1>& rules) {
  swarm_edge seed{full_green(), intern("a"), intern("b")};
  if (!m.edges.count(seed)) throw std::invalid_argument("seed edge missing");
  std::set<swarm_edge> imp{seed};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rule : rules)
      for (const auto& e1 : imp)
        for (const auto& e2 : imp) {
          if (e1.label.col != e2.label.col) continue;
          bool shared = rule.mode == glue::wedge ? e1.dst == e2.dst : e1.src == e2.src;
          if (!shared) continue;
          auto p1 = algebra(rule.u1, rule.l1, e1.label);
          auto p2 = algebra(rule.u2, rule.l2, e2.label);
          if (!p1 || !p2) continue;
          elem_id k1 = rule.mode == glue::wedge ? e1.src : e1.dst;
          elem_id k2 = rule.mode == glue::wedge ? e2.src : e2.dst;
          for (const auto& w : m.edges) {
            if (w.label != *p1) continue;
            bool keeps = rule.mode == glue::wedge ? w.src == k1 : w.dst == k1;
            if (!keeps) continue;
            elem_id cand = rule.mode == glue::wedge ? w.dst : w.src;
            swarm_edge mate{*p2, rule.mode == glue::wedge ? k2 : cand,
                            rule.mode == glue::wedge ? cand : k2};
            if (!m.edges.count(mate)) continue;
            if (imp.insert(w).second) changed = true;
            if (imp.insert(mate).second) changed = true;
          }
        }
  }
  return imp;
}

inline bool is_minimal_model(const swarm_t& m, const std::vector<rule_l1>& rules) {
  return important_edges(m, rules) == m.edges;
}

}  // namespace redspider
