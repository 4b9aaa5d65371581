#pragma once

#include <optional>
#include <string>
#include <vector>

#include "redspider/relcore.hpp"

namespace redspider {

struct dependency {
  conjunctive_query body;  // free = frontier variables
  conjunctive_query head;  // same frontier variables, plus fresh existentials
  std::string id;
};

enum class direction { g_to_r, r_to_g };

// Def.-style TGD generation: body is the query painted in the source color,
// head is the query painted in the target color with bound variables renamed.
inline dependency tgd_from_cq(const conjunctive_query& q, direction dir,
                              const std::string& id = "") {
  hue src = dir == direction::g_to_r ? hue::green : hue::red;
  conjunctive_query body = paint(q, src);
  conjunctive_query head = paint(q, other(src));
  std::set<elem_id> keep(q.free.begin(), q.free.end());
  for (const auto& [name, e] : q.canonical.constant_binding) keep.insert(e);
  head.canonical = rename_elements(head.canonical, [&](elem_id e) {
    return keep.count(e) ? e : intern(name_of(e) + "^");
  });
  return dependency{std::move(body), std::move(head), id};
}

struct fresh_namer {
  long counter = 0;
  elem_id next(const structure& avoid) {
    for (;;) {
      elem_id e = intern("_n" + std::to_string(counter++));
      if (!avoid.elements.count(e)) return e;
    }
  }
};

struct trigger_record {
  std::string dep_id;
  std::vector<elem_id> frontier;
  std::vector<elem_id> created;
  int stage = 0;
};

struct chase_result {
  structure s;
  int stages_run = 0;
  bool reached_fixpoint = false;
  std::vector<trigger_record> trigger_log;
  long fresh_counter = 0;
};

namespace detail {

inline std::map<elem_id, elem_id> frontier_seed(const conjunctive_query& q,
                                                const std::vector<elem_id>& frontier) {
  if (frontier.size() != q.free.size())
    throw std::invalid_argument("frontier arity mismatch");
  std::map<elem_id, elem_id> seed;
  for (size_t i = 0; i < frontier.size(); ++i) seed[q.free[i]] = frontier[i];
  return seed;
}

// Lazy application against a mutable structure. Returns created elements, or
// nullopt when the head was already witnessed.
inline std::optional<std::vector<elem_id>> apply_tgd_mut(
    structure& d, const dependency& t, const std::vector<elem_id>& frontier,
    fresh_namer& fresh) {
  auto seed = frontier_seed(t.head, frontier);
  if (first_homomorphism(t.head.canonical, d, seed)) return std::nullopt;
  std::map<elem_id, elem_id> rename = seed;
  for (const auto& [name, e] : t.head.canonical.constant_binding) {
    auto it = d.constant_binding.find(name);
    rename[e] = it != d.constant_binding.end() ? it->second : e;
  }
  std::vector<elem_id> created;
  for (elem_id e : t.head.canonical.elements)
    if (!rename.count(e)) {
      elem_id f = fresh.next(d);
      rename[e] = f;
      created.push_back(f);
    }
  for (const auto& a : t.head.canonical.atoms) {
    std::vector<elem_id> args;
    for (elem_id e : a.args) args.push_back(rename.at(e));
    d.add_atom(a.pred, std::move(args));
  }
  return created;
}

}  // namespace detail

inline structure apply_tgd(const structure& d, const dependency& t,
                           const std::vector<elem_id>& frontier) {
  auto seed = detail::frontier_seed(t.body, frontier);
  if (!first_homomorphism(t.body.canonical, d, seed))
    throw std::invalid_argument("frontier is not a body match");
  structure out = d;
  fresh_namer fresh;
  detail::apply_tgd_mut(out, t, frontier, fresh);
  return out;
}

// One pass: triggers discovered against the stage-entry snapshot, witness
// checks against the evolving structure.
inline structure chase_stage(const std::vector<dependency>& ts, const structure& d,
                             fresh_namer* fresh = nullptr,
                             std::vector<trigger_record>* log = nullptr,
                             int stage = 0) {
  structure out = d;
  fresh_namer local;
  fresh_namer& fn = fresh ? *fresh : local;
  for (const auto& t : ts) {
    std::set<std::vector<elem_id>> frontiers;
    for_each_homomorphism(t.body.canonical, d, {}, [&](const homomorphism& h) {
      std::vector<elem_id> f;
      f.reserve(t.body.free.size());
      for (elem_id v : t.body.free) f.push_back(h(v));
      frontiers.insert(std::move(f));
      return true;
    });
    for (const auto& f : frontiers) {
      auto created = detail::apply_tgd_mut(out, t, f, fn);
      if (created && log) log->push_back({t.id, f, *created, stage});
    }
  }
  return out;
}

inline chase_result chase(const std::vector<dependency>& ts, const structure& d,
                          int stage_budget) {
  chase_result r;
  r.s = d;
  if (ts.empty()) {
    r.reached_fixpoint = true;
    return r;
  }
  fresh_namer fresh;
  for (int i = 0; i < stage_budget; ++i) {
    structure next = chase_stage(ts, r.s, &fresh, &r.trigger_log, i + 1);
    ++r.stages_run;
    if (next == r.s) {
      r.reached_fixpoint = true;
      break;
    }
    r.s = std::move(next);
  }
  r.fresh_counter = fresh.counter;
  return r;
}

// All TGDs generated by a query set (both color directions per query).
inline std::vector<dependency> tgds_of(const std::vector<conjunctive_query>& queries,
                                       const std::string& id_prefix = "q") {
  std::vector<dependency> out;
  for (size_t i = 0; i < queries.size(); ++i) {
    out.push_back(tgd_from_cq(queries[i], direction::g_to_r,
                              id_prefix + std::to_string(i) + ":GR"));
    out.push_back(tgd_from_cq(queries[i], direction::r_to_g,
                              id_prefix + std::to_string(i) + ":RG"));
  }
  return out;
}

inline bool satisfies(const structure& d, const dependency& t) {
  bool ok = true;
  for_each_homomorphism(t.body.canonical, d, {}, [&](const homomorphism& h) {
    std::vector<elem_id> f;
    for (elem_id v : t.body.free) f.push_back(h(v));
    if (!first_homomorphism(t.head.canonical, d, detail::frontier_seed(t.head, f))) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

inline bool satisfies_all(const structure& d, const std::vector<dependency>& ts) {
  for (const auto& t : ts)
    if (!satisfies(d, t)) return false;
  return true;
}

struct determinacy_verdict {
  bool holds = true;          // false only on a genuine counterexample
  bool model_of_tq = false;   // whether d satisfied the generated TGDs
  std::optional<std::vector<elem_id>> witness;
};

// The color-transfer condition: false (with witness) iff d models the
// generated dependencies, matches the green copy of q0 at some tuple, but not
// the red copy at that tuple.
inline determinacy_verdict check_determinacy_condition(
    const std::vector<conjunctive_query>& queries, const conjunctive_query& q0,
    const structure& d) {
  determinacy_verdict v;
  v.model_of_tq = satisfies_all(d, tgds_of(queries));
  if (!v.model_of_tq) return v;
  auto green_view = eval_cq(paint(q0, hue::green), d);
  auto red_view = eval_cq(paint(q0, hue::red), d);
  for (const auto& tuple : green_view)
    if (!red_view.count(tuple)) {
      v.holds = false;
      v.witness = tuple;
      return v;
    }
  return v;
}

}  // namespace redspider
