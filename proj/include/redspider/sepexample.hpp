#pragma once

#include <string>
#include <vector>

#include "redspider/chase.hpp"
#include "redspider/greengraph.hpp"

namespace redspider {

// Grid labels <dir, kind, diag, border>: dir in {n,e,s,w}, kind in {a,b}
// (a = the alpha family, b = the beta family), diag/border plain or barred
// (uppercase letter = barred).
inline std::string grid_label_name(char dir, char kind, bool diag_bar, bool border_bar) {
  std::string out = "<";
  out += dir;
  out += ',';
  out += kind;
  out += ',';
  out += diag_bar ? 'D' : 'd';
  out += ',';
  out += border_bar ? 'B' : 'b';
  out += '>';
  return out;
}

struct sep_context {
  label_universe u;
  int alpha = 0, beta0 = 0, beta1 = 0, eta0 = 0, eta1 = 0;
  std::vector<rule_l2> tinf, tbox;

  int g(char dir, char kind, bool diag_bar, bool border_bar) const {
    return u.code(grid_label_name(dir, kind, diag_bar, border_bar));
  }
};

// reserve_rules: how many level-2 rules a later precompile step will number
// (0 when the run stays at level 2). with_grid_labels=false keeps the
// universe small for runs that never touch the grid rules.
inline sep_context make_sep_context(int reserve_rules, bool with_grid_labels = true) {
  sep_context c;
  if (reserve_rules > 0) c.u.reserve_block(reserve_rules);
  c.alpha = c.u.assign("alpha", true);
  c.beta0 = c.u.assign("beta0", true);
  c.beta1 = c.u.assign("beta1", false);
  c.eta0 = c.u.assign("eta0", true);
  c.eta1 = c.u.assign("eta1", false);
  if (with_grid_labels)
    for (char dir : {'n', 'e', 's', 'w'})
    for (char kind : {'a', 'b'})
      for (bool diag_bar : {false, true})
        for (bool border_bar : {false, true}) {
          std::string name = grid_label_name(dir, kind, diag_bar, border_bar);
          if (!c.u.named.count(name)) c.u.assign(name, true);
        }

  c.tinf = {
      rule_l2{std::nullopt, std::nullopt, c.alpha, c.eta1, glue::wedge},
      rule_l2{std::nullopt, c.eta1, c.eta0, c.beta1, glue::vee},
      rule_l2{std::nullopt, c.eta0, c.eta1, c.beta0, glue::wedge},
  };

  if (!with_grid_labels) return c;
  auto G = [&](char dir, char kind, bool diag_bar, bool border_bar) {
    return c.g(dir, kind, diag_bar, border_bar);
  };
  auto& tb = c.tbox;
  // grid-triggering rule: creates the tile in the south-eastern corner
  tb.push_back(rule_l2{c.beta0, c.beta0, G('n', 'b', 0, 0), G('w', 'b', 0, 0), glue::wedge});
  // southern strip
  tb.push_back(rule_l2{c.beta1, G('n', 'b', 0, 0), G('s', 'b', 1, 0), G('e', 'b', 0, 1), glue::vee});
  tb.push_back(rule_l2{c.beta0, G('s', 'b', 1, 0), G('n', 'b', 1, 0), G('w', 'b', 1, 1), glue::wedge});
  tb.push_back(rule_l2{c.beta1, G('n', 'b', 1, 0), G('s', 'b', 1, 0), G('e', 'b', 1, 1), glue::vee});
  tb.push_back(rule_l2{c.alpha, G('s', 'b', 1, 0), G('n', 'b', 1, 0), G('w', 'a', 1, 1), glue::wedge});
  // eastern strip
  tb.push_back(rule_l2{c.beta1, G('w', 'b', 0, 0), G('e', 'b', 1, 0), G('s', 'b', 0, 1), glue::vee});
  tb.push_back(rule_l2{c.beta0, G('e', 'b', 1, 0), G('w', 'b', 1, 0), G('n', 'b', 1, 1), glue::wedge});
  tb.push_back(rule_l2{c.beta1, G('w', 'b', 1, 0), G('e', 'b', 1, 0), G('s', 'b', 1, 1), glue::vee});
  tb.push_back(rule_l2{c.alpha, G('e', 'b', 1, 0), G('w', 'b', 1, 0), G('n', 'a', 1, 1), glue::wedge});
  // interior schemes
  for (char theta : {'a', 'b'})
    for (char omega : {'a', 'b'})
      for (bool X : {false, true})
        for (bool Y : {false, true}) {
          tb.push_back(rule_l2{G('e', theta, X, 1), G('s', omega, Y, 1),
                               G('n', omega, X, 1), G('w', theta, Y, 1), glue::wedge});
          tb.push_back(rule_l2{G('w', theta, X, 1), G('n', omega, Y, 1),
                               G('s', omega, X, 1), G('e', theta, Y, 1), glue::vee});
        }
  return c;
}

inline std::vector<rule_l2> t_all(const sep_context& c) {
  std::vector<rule_l2> out = c.tinf;
  out.insert(out.end(), c.tbox.begin(), c.tbox.end());
  return out;
}

inline bool is_grid_label(const sep_context& c, const std::optional<int>& label) {
  if (!label) return false;
  const std::string* n = c.u.name_of_code(*label);
  return n && !n->empty() && (*n)[0] == '<';
}

// Square-length-t slime trail word: alpha (beta1 beta0)^t, i.e. the trail
// a, b1, a1, ..., a_t, b_{t+1} supporting a grid of t x t squares.
inline std::vector<int> trail_word(const sep_context& c, int t) {
  std::vector<int> w = {c.alpha};
  for (int i = 0; i < t; ++i) {
    w.push_back(c.beta1);
    w.push_back(c.beta0);
  }
  return w;
}

// Lay a PG-word down as green edges starting at `from`, naming interior
// vertices with `prefix`; returns the final vertex.
inline elem_id lay_word(green_graph& g, const std::vector<int>& word, elem_id from,
                        const std::string& prefix,
                        std::optional<elem_id> final_vertex = std::nullopt) {
  elem_id cur = from;
  for (size_t i = 0; i < word.size(); ++i) {
    elem_id nxt = (i + 1 == word.size() && final_vertex)
                      ? *final_vertex
                      : intern(prefix + std::to_string(i + 1));
    if (word[i] % 2 == 0)
      g.edges.insert(gg_edge{word[i], cur, nxt});
    else
      g.edges.insert(gg_edge{word[i], nxt, cur});
    cur = nxt;
  }
  return cur;
}

// Two slime trails from a with identified endpoints, plus the seed edge.
// Equal square-lengths quotient to a single path.
inline green_graph build_two_path(const sep_context& c, int t, int tp) {
  if (t < 1 || tp < 1) throw std::invalid_argument("path lengths must be positive");
  green_graph g;
  g.edges.insert(seed_edge());
  elem_id shared = intern("pend");
  lay_word(g, trail_word(c, t), intern("a"), "p1_", shared);
  lay_word(g, trail_word(c, tp), intern("a"), t == tp ? "p1_" : "p2_", shared);
  return g;
}

struct grid_report {
  bool pattern_found = false;
  std::optional<pattern_12> witness;
  int stages_run = 0;
  bool conclusive = false;  // fixpoint reached (or pattern found)
  int edge_count = 0;
  int grid_edge_count = 0;
};

inline grid_report grid_experiment(const sep_context& c, int t, int tp, int budget) {
  green_graph g = build_two_path(c, t, tp);
  auto rules = t_all(c);
  grid_report rep;
  gg_result r;
  r.g = g;
  // stage at a time so we can stop as soon as the pattern exists
  for (int i = 0; i < budget; ++i) {
    r = saturate_greengraph(rules, r.g, 1);
    ++rep.stages_run;
    auto w = has_12_pattern(r.g);
    if (w) {
      rep.pattern_found = true;
      rep.witness = w;
      rep.conclusive = true;
      break;
    }
    if (r.reached_fixpoint) {
      rep.conclusive = true;
      break;
    }
  }
  rep.edge_count = static_cast<int>(r.g.edges.size());
  for (const auto& e : r.g.edges)
    if (is_grid_label(c, e.label)) ++rep.grid_edge_count;
  return rep;
}

// The honest chase prefix of the three skeleton rules over the seed.
inline gg_result honest_prefix(const sep_context& c, int depth) {
  green_graph g;
  g.edges.insert(seed_edge());
  return saturate_greengraph(c.tinf, g, depth);
}

// Follow the slime trail: a, b1, a1, b2, ... as far as it exists.
inline std::vector<elem_id> trail_vertices(const sep_context& c, const green_graph& g) {
  std::vector<elem_id> out = {intern("a")};
  std::optional<elem_id> b;
  for (const auto& e : g.edges)
    if (e.label == c.alpha && e.src == intern("a")) b = e.dst;
  if (!b) return out;
  out.push_back(*b);
  for (;;) {
    std::optional<elem_id> anext;
    for (const auto& e : g.edges)
      if (e.label == c.beta1 && e.dst == out.back()) anext = e.src;
    if (!anext) return out;
    out.push_back(*anext);
    std::optional<elem_id> bnext;
    for (const auto& e : g.edges)
      if (e.label == c.beta0 && e.src == out.back()) bnext = e.dst;
    if (!bnext) return out;
    out.push_back(*bnext);
  }
}

// The honest grid over the trail triggered (degenerately) on the last
// beta0 edge H_beta0(a_t, b_{t+1}), isolated from the lower-index grids by
// seeding the corner tile explicitly and leaving the triggering rule out of
// the saturation.
inline green_graph build_Mt(const sep_context& c, int t, int budget = 200) {
  if (t < 1) throw std::invalid_argument("t must be positive");
  green_graph g;
  g.edges.insert(seed_edge());
  // trail a, b1, a1, ..., a_t, b_{t+1}
  std::vector<elem_id> verts = {intern("a")};
  for (int i = 1; i <= t; ++i) {
    verts.push_back(intern("mb" + std::to_string(i)));
    verts.push_back(intern("ma" + std::to_string(i)));
  }
  verts.push_back(intern("mb" + std::to_string(t + 1)));
  g.edges.insert(gg_edge{c.alpha, verts[0], verts[1]});
  for (int i = 1; i <= t; ++i) {
    g.edges.insert(gg_edge{c.beta1, verts[2 * i], verts[2 * i - 1]});
    g.edges.insert(gg_edge{c.beta0, verts[2 * i], verts[2 * i + 1]});
  }
  elem_id corner_src = verts[2 * t];  // a_t
  elem_id tile = intern("mc");
  g.edges.insert(gg_edge{c.g('n', 'b', 0, 0), corner_src, tile});
  g.edges.insert(gg_edge{c.g('w', 'b', 0, 0), corner_src, tile});
  std::vector<rule_l2> rules(c.tbox.begin() + 1, c.tbox.end());
  auto r = saturate_greengraph(rules, g, budget);
  if (!r.reached_fixpoint) throw std::runtime_error("grid did not close within budget");
  return r.g;
}

struct truncation {
  green_graph g;
  green_graph skeleton;
  std::map<gg_edge, int> grid_of;    // foam edge -> grid index t
  std::map<elem_id, int> stage_of;   // vertex -> creation stage
  int depth = 0;
  bool grids_closed = false;
};

// Finite truncation of the infinite union: skeleton prefix of the given depth
// with every grid it supports, constants shared.
inline truncation build_M_truncated(const sep_context& c, int depth, int grid_budget = 300) {
  truncation out;
  out.depth = depth;
  gg_result sk = honest_prefix(c, depth);
  out.skeleton = sk.g;
  for (elem_id v : out.skeleton.vertices()) out.stage_of[v] = 0;
  for (const auto& t : sk.log)
    if (t.fresh) out.stage_of[t.fresh] = t.stage;
  // index the beta0 trail edges: H_beta0(a_t, b_{t+1}) belongs to grid t
  std::map<gg_edge, int> beta0_grid;
  auto trail = trail_vertices(c, out.skeleton);
  for (size_t i = 2; i + 1 < trail.size(); i += 2) {
    int t = static_cast<int>(i) / 2;  // edge a_t -> b_{t+1}
    beta0_grid[gg_edge{c.beta0, trail[i], trail[i + 1]}] = t;
  }
  auto r = saturate_greengraph(c.tbox, out.skeleton, grid_budget);
  out.grids_closed = r.reached_fixpoint;
  out.g = r.g;
  for (const auto& t : r.log) {
    if (t.fresh) out.stage_of[t.fresh] = depth;  // grid vertices are late
    int grid = 0;
    if (t.rule == 0 && t.left_to_right) {
      auto it = beta0_grid.find(t.lhs1);
      if (it != beta0_grid.end()) grid = it->second;
    } else {
      for (const auto& lhs : {t.lhs1, t.lhs2}) {
        auto it = out.grid_of.find(lhs);
        if (it != out.grid_of.end()) {
          if (grid && grid != it->second)
            throw std::runtime_error("edge produced jointly by two grids");
          grid = it->second;
        }
      }
    }
    for (const auto& e : t.added)
      if (is_grid_label(c, e.label) && grid) out.grid_of[e] = grid;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Level-0 pipeline: the two compiled query systems over one shared universe,
// truncated chases of the skeleton system, late fragments, and the paired
// almost-indistinguishable structures built from them.

struct vd_context {
  sep_context c;  // joint universe: one precompile block for all 44 rules
  std::vector<rule_l1> l1_all, l1_inf, l1_box;
  std::vector<binary_query_t> q_inf, q_box;
  std::vector<dependency> t_qinf, t_qbox;
};

inline vd_context make_vd_context() {
  vd_context v;
  v.c = make_sep_context(44);
  v.l1_all = precompile_rules(t_all(v.c), v.c.u);
  for (const auto& r : v.l1_all) {
    if (r.origin < 3) v.l1_inf.push_back(r);               // base triple + skeleton
    if (r.origin < 0 || r.origin >= 3) v.l1_box.push_back(r);  // base triple + grid
  }
  v.q_inf = compile_rules(v.l1_inf, v.c.u);
  v.q_box = compile_rules(v.l1_box, v.c.u);
  v.t_qinf = tgds_of(queries_of(v.q_inf), "qi");
  v.t_qbox = tgds_of(queries_of(v.q_box), "qb");
  return v;
}

// The full green spider from a to b, with a, b, c as constants.
inline structure seed_structure(const vd_context& v) {
  structure d = make_spider(full_green(), intern("a"), intern("b"), v.c.u, "seed.");
  d.bind_constant("a");
  d.bind_constant("b");
  return d;
}

inline structure chase_qinf(const vd_context& v, int i) {
  structure d = seed_structure(v);
  fresh_namer fresh;
  for (int k = 1; k <= i; ++k) d = chase_stage(v.t_qinf, d, &fresh, nullptr, k);
  return d;
}

// Atoms added during stages i+1..2i, with their incident elements (the shared
// constants a, b, c stay bound).
inline structure late_fragment(const vd_context& v, int i) {
  if (i < 1) throw std::invalid_argument("i must be positive");
  structure d = seed_structure(v);
  fresh_namer fresh;
  for (int k = 1; k <= i; ++k) d = chase_stage(v.t_qinf, d, &fresh, nullptr, k);
  structure early = d;
  for (int k = i + 1; k <= 2 * i; ++k) d = chase_stage(v.t_qinf, d, &fresh, nullptr, k);
  structure out;
  for (const auto& a : d.atoms)
    if (!early.atoms.count(a)) out.add_atom(a);
  for (const auto& [name, e] : d.constant_binding) out.bind_constant(name, e);
  return out;
}

// What one viewer sees: the daltonised one-color restriction.
inline structure lens(const structure& d, hue h) { return dalt(restrict_color(d, h)); }

using view_atom = std::pair<int, std::vector<elem_id>>;  // (query index, tuple)

inline std::set<view_atom> eval_views(const std::vector<binary_query_t>& qs,
                                      const structure& d) {
  std::set<view_atom> out;
  for (size_t i = 0; i < qs.size(); ++i)
    for (const auto& t : eval_cq(qs[i].canonical, d))
      out.insert({static_cast<int>(i), t});
  return out;
}

struct view_diff {
  std::vector<size_t> green_sizes, red_sizes;  // per query
  std::set<view_atom> only_green, only_red;

  size_t difference() const { return only_green.size() + only_red.size(); }
};

// Compare what the two viewers see through the given queries on one colored
// structure.
inline view_diff view_difference(const std::vector<binary_query_t>& qs,
                                 const structure& colored) {
  structure g = lens(colored, hue::green);
  structure r = lens(colored, hue::red);
  view_diff out;
  for (size_t i = 0; i < qs.size(); ++i) {
    auto vg = eval_cq(qs[i].canonical, g);
    auto vr = eval_cq(qs[i].canonical, r);
    out.green_sizes.push_back(vg.size());
    out.red_sizes.push_back(vr.size());
    for (const auto& t : vg)
      if (!vr.count(t)) out.only_green.insert({static_cast<int>(i), t});
    for (const auto& t : vr)
      if (!vg.count(t)) out.only_red.insert({static_cast<int>(i), t});
  }
  return out;
}

// Copy with every non-constant element tagged, for disjoint unions that share
// only the constants.
inline structure disjoint_copy(const structure& s, const std::string& tag) {
  std::set<elem_id> keep;
  for (const auto& [name, e] : s.constant_binding) keep.insert(e);
  return rename_elements(s, [&](elem_id e) {
    return keep.count(e) ? e : intern(name_of(e) + "#" + tag);
  });
}

struct dy_dn_result {
  structure dy, dn;
  int copies = 0;
  bool closures_reached_fixpoint = true;  // only meaningful with grids
  view_diff inf_diff;                     // skeleton-system views of the main component
  std::optional<view_diff> box_diff;      // grid-system views, when closed
};

// The paired structures: dy = green lens of the depth-i chase plus i tagged
// copies of each lens of the late fragment; dn the same with the red lens of
// the main component, plus the two one-lame red gadget spiders at (a, b) that
// the red viewer needs. With grids, every component is first closed under the
// grid-system dependencies.
inline dy_dn_result build_Dy_Dn(const vd_context& v, int i, bool with_grids = false,
                                int closure_budget = 60) {
  if (i < 1) throw std::invalid_argument("i must be positive");
  structure main = chase_qinf(v, i);
  structure late = late_fragment(v, i);
  dy_dn_result out;
  out.copies = i;
  if (with_grids) {
    auto close = [&](structure d) {
      auto r = chase(v.t_qbox, d, closure_budget);
      if (!r.reached_fixpoint) out.closures_reached_fixpoint = false;
      return r.s;
    };
    main = close(std::move(main));
    late = close(std::move(late));
  }
  out.inf_diff = view_difference(v.q_inf, main);
  if (with_grids) out.box_diff = view_difference(v.q_box, main);
  out.dy = lens(main, hue::green);
  out.dn = lens(main, hue::red);
  structure late_g = lens(late, hue::green);
  structure late_r = lens(late, hue::red);
  for (int k = 1; k <= i; ++k) {
    std::string n = std::to_string(k);
    out.dy.absorb(disjoint_copy(late_g, "g" + n));
    out.dy.absorb(disjoint_copy(late_r, "r" + n));
    out.dn.absorb(disjoint_copy(late_g, "g" + n));
    out.dn.absorb(disjoint_copy(late_r, "r" + n));
  }
  for (int lower : {7, 9}) {
    structure gadget = make_spider(ideal_spider{hue::red, std::nullopt, lower},
                                   intern("a"), intern("b"), v.c.u,
                                   "gad" + std::to_string(lower) + ".");
    // red lens: the off-color calf disappears, so the daltonised gadget does
    // not complete to a full spider
    out.dn.absorb(lens(gadget, hue::red));
  }
  out.dn.bind_constant("a");
  out.dn.bind_constant("b");
  return out;
}

}  // namespace redspider
