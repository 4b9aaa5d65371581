#pragma once

#include <optional>
#include <queue>
#include <vector>

#include "redspider/swarm.hpp"

namespace redspider {

struct gg_edge {
  std::optional<int> label;  // nullopt encodes the empty label
  elem_id src = 0;
  elem_id dst = 0;

  auto operator<=>(const gg_edge&) const = default;
};

struct green_graph {
  std::set<gg_edge> edges;

  std::set<elem_id> vertices() const {
    std::set<elem_id> out;
    for (const auto& e : edges) {
      out.insert(e.src);
      out.insert(e.dst);
    }
    return out;
  }

  bool operator==(const green_graph&) const = default;
};

inline gg_edge seed_edge() { return gg_edge{std::nullopt, intern("a"), intern("b")}; }

struct rule_l2 {
  std::optional<int> i1, i2;  // left side labels
  std::optional<int> i3, i4;  // right side labels
  glue mode = glue::wedge;    // wedge: shared target; vee: shared source

  auto operator<=>(const rule_l2&) const = default;
};

struct gg_trigger {
  int rule = 0;
  bool left_to_right = true;
  int stage = 0;
  gg_edge lhs1, lhs2;
  std::vector<gg_edge> added;
  elem_id fresh = 0;
};

struct gg_result {
  green_graph g;
  int stages_run = 0;
  bool reached_fixpoint = false;
  std::vector<gg_trigger> log;
};

namespace detail {

inline std::vector<const gg_edge*> edges_with_label(const green_graph& g,
                                                    const std::optional<int>& l) {
  std::vector<const gg_edge*> out;
  for (const auto& e : g.edges)
    if (e.label == l) out.push_back(&e);
  return out;
}

inline bool gg_witnessed(const green_graph& g, const std::optional<int>& b1,
                         const std::optional<int>& b2, glue mode, elem_id x,
                         elem_id xp) {
  for (const auto& e : g.edges) {
    if (e.label != b1) continue;
    if (mode == glue::wedge) {
      if (e.src != x) continue;
      if (g.edges.count(gg_edge{b2, xp, e.dst})) return true;
    } else {
      if (e.dst != x) continue;
      if (g.edges.count(gg_edge{b2, e.src, xp})) return true;
    }
  }
  return false;
}

}  // namespace detail

// Each rule is a biconditional; both directions act as lazy edge-generating
// rules. Trigger discovery runs on the stage-entry snapshot, witness checks on
// the evolving graph.
inline gg_result saturate_greengraph(const std::vector<rule_l2>& rules,
                                     const green_graph& g0, int stage_budget) {
  gg_result r;
  r.g = g0;
  swarm_fresh fresh;
  std::set<elem_id> used = g0.vertices();
  for (int stage = 1; stage <= stage_budget; ++stage) {
    green_graph snapshot = r.g;
    bool changed = false;
    for (size_t ri = 0; ri < rules.size(); ++ri) {
      const auto& rule = rules[ri];
      for (bool l2r : {true, false}) {
        auto a1 = l2r ? rule.i1 : rule.i3;
        auto a2 = l2r ? rule.i2 : rule.i4;
        auto b1 = l2r ? rule.i3 : rule.i1;
        auto b2 = l2r ? rule.i4 : rule.i2;
        auto lhs1 = detail::edges_with_label(snapshot, a1);
        auto lhs2 = detail::edges_with_label(snapshot, a2);
        for (const gg_edge* e1 : lhs1)
          for (const gg_edge* e2 : lhs2) {
            bool shared = rule.mode == glue::wedge ? e1->dst == e2->dst
                                                   : e1->src == e2->src;
            if (!shared) continue;
            elem_id x = rule.mode == glue::wedge ? e1->src : e1->dst;
            elem_id xp = rule.mode == glue::wedge ? e2->src : e2->dst;
            if (detail::gg_witnessed(r.g, b1, b2, rule.mode, x, xp)) continue;
            elem_id nv = fresh.next(used);
            used.insert(nv);
            gg_trigger t;
            t.rule = static_cast<int>(ri);
            t.left_to_right = l2r;
            t.stage = stage;
            t.lhs1 = *e1;
            t.lhs2 = *e2;
            t.fresh = nv;
            gg_edge w1 = rule.mode == glue::wedge ? gg_edge{b1, x, nv}
                                                  : gg_edge{b1, nv, x};
            gg_edge w2 = rule.mode == glue::wedge ? gg_edge{b2, xp, nv}
                                                  : gg_edge{b2, nv, xp};
            r.g.edges.insert(w1);
            r.g.edges.insert(w2);
            t.added = {w1, w2};
            r.log.push_back(std::move(t));
            changed = true;
          }
      }
    }
    ++r.stages_run;
    if (!changed) {
      r.reached_fixpoint = true;
      break;
    }
  }
  if (rules.empty()) r.reached_fixpoint = true;
  return r;
}

// Translation to level 1: the fixed base triple plus two rules per level-2
// rule; rule number i (counting from 2 in declaration order) consumes the
// fresh lower codes 2i+1 and 2i+2, which must lie in the universe's reserved
// block.
inline std::vector<rule_l1> precompile_rules(const std::vector<rule_l2>& rules,
                                             const label_universe& u) {
  std::vector<rule_l1> out;
  out.push_back(rule_l1{1, 1, 2, 2, glue::wedge, -1});
  out.push_back(rule_l1{3, 1, 4, 2, glue::wedge, -1});
  out.push_back(rule_l1{3, std::nullopt, 4, 3, glue::wedge, -1});
  for (size_t idx = 0; idx < rules.size(); ++idx) {
    int n = static_cast<int>(idx) + 2;
    int c1 = 2 * n + 1, c2 = 2 * n + 2;
    if (c2 > u.block_end)
      throw std::overflow_error("code universe too small for rule " +
                                std::to_string(n));
    const auto& r = rules[idx];
    out.push_back(rule_l1{r.i1, c1, r.i2, c2, r.mode, static_cast<int>(idx)});
    out.push_back(rule_l1{r.i3, c1, r.i4, c2, r.mode, static_cast<int>(idx)});
  }
  return out;
}

struct pattern_12 {
  gg_edge one, two;
};

inline std::optional<pattern_12> has_12_pattern(const green_graph& g) {
  for (const auto& e1 : g.edges) {
    if (e1.label != 1) continue;
    for (const auto& e2 : g.edges)
      if (e2.label == 2 && e2.dst == e1.dst) return pattern_12{e1, e2};
  }
  return std::nullopt;
}

// Drop empty-labelled edges, reverse odd-labelled ones.
inline green_graph parity_glasses(const green_graph& g) {
  if (!g.edges.count(seed_edge()))
    throw std::invalid_argument("seed edge missing");
  green_graph pg;
  for (const auto& e : g.edges) {
    if (!e.label) continue;
    if (*e.label % 2 == 0)
      pg.edges.insert(e);
    else
      pg.edges.insert(gg_edge{e.label, e.dst, e.src});
  }
  return pg;
}

// Words read along PG paths from a that end at the target with no accepted
// nonempty proper prefix; the union is taken over targets a and b.
inline std::set<std::vector<int>> words(const green_graph& g, int length_bound) {
  green_graph pg = parity_glasses(g);
  std::map<elem_id, std::map<int, std::set<elem_id>>> step;
  for (const auto& e : pg.edges) step[e.src][*e.label].insert(e.dst);
  std::set<std::vector<int>> out;
  std::map<std::vector<int>, std::set<elem_id>> frontier;
  frontier[{}] = {intern("a")};
  for (int len = 0; len < length_bound; ++len) {
    std::map<std::vector<int>, std::set<elem_id>> next;
    for (const auto& [word, states] : frontier) {
      std::map<int, std::set<elem_id>> moves;
      for (elem_id s : states) {
        auto it = step.find(s);
        if (it == step.end()) continue;
        for (const auto& [label, dsts] : it->second)
          moves[label].insert(dsts.begin(), dsts.end());
      }
      for (const auto& [label, dsts] : moves) {
        std::vector<int> w = word;
        w.push_back(label);
        if (dsts.count(intern("a")) || dsts.count(intern("b")))
          out.insert(w);  // accepted: prefix-freeness stops extension
        else
          next[std::move(w)] = dsts;
      }
    }
    frontier = std::move(next);
  }
  return out;
}

// Importance for green graphs: seed plus every present witness pair of a rule
// direction whose arguments are already important.
inline std::set<gg_edge> important_edges(const green_graph& g,
                                         const std::vector<rule_l2>& rules) {
  if (!g.edges.count(seed_edge())) throw std::invalid_argument("seed edge missing");
  std::set<gg_edge> imp{seed_edge()};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rule : rules)
      for (bool l2r : {true, false}) {
        auto a1 = l2r ? rule.i1 : rule.i3;
        auto a2 = l2r ? rule.i2 : rule.i4;
        auto b1 = l2r ? rule.i3 : rule.i1;
        auto b2 = l2r ? rule.i4 : rule.i2;
        for (const auto& e1 : imp)
          for (const auto& e2 : imp) {
            if (e1.label != a1 || e2.label != a2) continue;
            bool shared = rule.mode == glue::wedge ? e1.dst == e2.dst
                                                   : e1.src == e2.src;
            if (!shared) continue;
            elem_id x = rule.mode == glue::wedge ? e1.src : e1.dst;
            elem_id xp = rule.mode == glue::wedge ? e2.src : e2.dst;
            for (const auto& w : g.edges) {
              if (w.label != b1) continue;
              elem_id wx = rule.mode == glue::wedge ? w.src : w.dst;
              if (wx != x) continue;
              elem_id cand = rule.mode == glue::wedge ? w.dst : w.src;
              gg_edge mate = rule.mode == glue::wedge ? gg_edge{b2, xp, cand}
                                                      : gg_edge{b2, cand, xp};
              if (!g.edges.count(mate)) continue;
              if (imp.insert(w).second) changed = true;
              if (imp.insert(mate).second) changed = true;
            }
          }
      }
  }
  return imp;
}

inline bool models_l2(const green_graph& g, const std::vector<rule_l2>& rules) {
  for (const auto& rule : rules)
    for (bool l2r : {true, false}) {
      auto a1 = l2r ? rule.i1 : rule.i3;
      auto a2 = l2r ? rule.i2 : rule.i4;
      auto b1 = l2r ? rule.i3 : rule.i1;
      auto b2 = l2r ? rule.i4 : rule.i2;
      for (const auto& e1 : g.edges)
        for (const auto& e2 : g.edges) {
          if (e1.label != a1 || e2.label != a2) continue;
          bool shared = rule.mode == glue::wedge ? e1.dst == e2.dst
                                                 : e1.src == e2.src;
          if (!shared) continue;
          elem_id x = rule.mode == glue::wedge ? e1.src : e1.dst;
          elem_id xp = rule.mode == glue::wedge ? e2.src : e2.dst;
          if (!detail::gg_witnessed(g, b1, b2, rule.mode, x, xp)) return false;
        }
    }
  return true;
}

struct l2_violation {
  int rule = 0;
  bool left_to_right = true;
  gg_edge lhs1, lhs2;
};

inline std::vector<l2_violation> l2_violations(const green_graph& g,
                                               const std::vector<rule_l2>& rules) {
  std::vector<l2_violation> out;
  for (size_t ri = 0; ri < rules.size(); ++ri) {
    const auto& rule = rules[ri];
    for (bool l2r : {true, false}) {
      auto a1 = l2r ? rule.i1 : rule.i3;
      auto a2 = l2r ? rule.i2 : rule.i4;
      auto b1 = l2r ? rule.i3 : rule.i1;
      auto b2 = l2r ? rule.i4 : rule.i2;
      for (const auto& e1 : g.edges)
        for (const auto& e2 : g.edges) {
          if (e1.label != a1 || e2.label != a2) continue;
          bool shared = rule.mode == glue::wedge ? e1.dst == e2.dst
                                                 : e1.src == e2.src;
          if (!shared) continue;
          elem_id x = rule.mode == glue::wedge ? e1.src : e1.dst;
          elem_id xp = rule.mode == glue::wedge ? e2.src : e2.dst;
          if (!detail::gg_witnessed(g, b1, b2, rule.mode, x, xp))
            out.push_back(l2_violation{static_cast<int>(ri), l2r, e1, e2});
        }
    }
  }
  return out;
}

// Keep full or upper one-lame green edges, reinterpreted as graph labels.
inline green_graph deprecompile_map(const swarm_t& m) {
  green_graph g;
  for (const auto& e : m.edges)
    if (e.label.col == hue::green && !e.label.lower)
      g.edges.insert(gg_edge{e.label.upper, e.src, e.dst});
  return g;
}

struct precompile_outcome {
  swarm_t m;
  std::vector<std::string> violations;
};

// One chase stage of the translated rules over the graph seen as a green
// swarm: the graph's edges plus exactly the demanded red witnesses.
inline precompile_outcome precompile_map(const green_graph& g,
                                         const std::vector<rule_l2>& rules,
                                         const label_universe& u) {
  precompile_outcome out;
  if (has_12_pattern(g)) out.violations.push_back("input contains a 1-2 pattern");
  if (!models_l2(g, rules)) out.violations.push_back("input is not a model of the rules");
  try {
    if (important_edges(g, rules) != g.edges)
      out.violations.push_back("input is not a minimal model");
  } catch (const std::exception& e) {
    out.violations.push_back(e.what());
  }
  swarm_t m;
  for (const auto& e : g.edges)
    m.edges.insert(swarm_edge{ideal_spider{hue::green, e.label, std::nullopt},
                              e.src, e.dst});
  auto l1 = precompile_rules(rules, u);
  swarm_fresh fresh;
  std::set<elem_id> used = m.vertices();
  swarm_t snapshot = m;
  for (const auto& rule : l1)
    for (const auto& e1 : snapshot.edges)
      for (const auto& e2 : snapshot.edges)
        detail::fire_l1(m, rule, e1, e2, fresh, used);
  out.m = std::move(m);
  return out;
}

}  // namespace redspider
