#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "redspider/base.hpp"

namespace redspider {

struct atom {
  std::string pred;
  std::vector<elem_id> args;

  auto operator<=>(const atom&) const = default;
};

// A finite set of positive relational atoms over interned elements, with
// distinguished constants. Predicates are registered on first use.
struct structure {
  std::map<std::string, int> predicates;  // name -> arity
  std::set<elem_id> elements;
  std::set<atom> atoms;
  std::map<std::string, elem_id> constant_binding;

  void add_atom(const std::string& pred, std::vector<elem_id> args) {
    auto [it, fresh] = predicates.emplace(pred, static_cast<int>(args.size()));
    if (!fresh && it->second != static_cast<int>(args.size()))
      throw std::invalid_argument("arity mismatch for predicate " + pred);
    for (elem_id e : args) elements.insert(e);
    atoms.insert(atom{pred, std::move(args)});
  }

  void add_atom(const atom& a) { add_atom(a.pred, a.args); }

  void bind_constant(const std::string& name, elem_id e) {
    constant_binding[name] = e;
    elements.insert(e);
  }

  void bind_constant(const std::string& name) { bind_constant(name, intern(name)); }

  bool has_atom(const atom& a) const { return atoms.count(a) > 0; }

  void absorb(const structure& other) {
    for (const auto& a : other.atoms) add_atom(a);
    for (elem_id e : other.elements) elements.insert(e);
    for (const auto& [k, v] : other.constant_binding) {
      auto it = constant_binding.find(k);
      if (it != constant_binding.end() && it->second != v)
        throw std::invalid_argument("conflicting binding for constant " + k);
      constant_binding[k] = v;
    }
  }

  bool operator==(const structure& other) const {
    return atoms == other.atoms && elements == other.elements &&
           constant_binding == other.constant_binding;
  }
};

// Copy with every element renamed through `rename`; constants keep their
// bindings renamed too (callers who want shared constants pass the identity
// on them).
inline structure rename_elements(const structure& s,
                                 const std::function<elem_id(elem_id)>& rename) {
  structure out;
  out.predicates = s.predicates;
  for (elem_id e : s.elements) out.elements.insert(rename(e));
  for (const auto& a : s.atoms) {
    std::vector<elem_id> args;
    args.reserve(a.args.size());
    for (elem_id e : a.args) args.push_back(rename(e));
    out.atoms.insert(atom{a.pred, std::move(args)});
  }
  for (const auto& [k, v] : s.constant_binding) out.constant_binding[k] = rename(v);
  return out;
}

struct conjunctive_query {
  structure canonical;
  std::vector<elem_id> free;  // ordered; defines the view tuple layout
};

struct homomorphism {
  std::map<elem_id, elem_id> mapping;

  elem_id operator()(elem_id e) const {
    auto it = mapping.find(e);
    if (it == mapping.end()) throw std::out_of_range("unmapped element");
    return it->second;
  }
};

namespace detail {

struct target_index {
  const structure& t;
  std::map<std::string, int> pred_ids;
  std::vector<std::vector<const atom*>> lists;  // indexed by pred id
  std::map<std::tuple<int, int, elem_id>, std::vector<const atom*>> pos_lists;

  explicit target_index(const structure& target) : t(target) {
    for (const auto& a : target.atoms) {
      auto [it, fresh] = pred_ids.emplace(a.pred, static_cast<int>(lists.size()));
      if (fresh) lists.emplace_back();
      lists[it->second].push_back(&a);
      for (int i = 0; i < static_cast<int>(a.args.size()); ++i)
        pos_lists[{it->second, i, a.args[i]}].push_back(&a);
    }
  }

  int pred_id(const std::string& pred) const {
    auto it = pred_ids.find(pred);
    return it == pred_ids.end() ? -1 : it->second;
  }

  const std::vector<const atom*>* pred_list(const std::string& pred) const {
    int id = pred_id(pred);
    return id < 0 ? nullptr : &lists[id];
  }

  const std::vector<const atom*>* pos_list(const std::string& pred, int i,
                                           elem_id e) const {
    int id = pred_id(pred);
    if (id < 0) return nullptr;
    auto it = pos_lists.find({id, i, e});
    return it == pos_lists.end() ? nullptr : &it->second;
  }

  // Smallest anchored candidate list for `src` (pred id precomputed by the
  // caller), falling back to the whole predicate when nothing is bound.
  const std::vector<const atom*>& candidates(const atom& src, int pid,
                                             const std::map<elem_id, elem_id>& m) const {
    static const std::vector<const atom*> none;
    if (pid < 0) return none;
    const std::vector<const atom*>* best = nullptr;
    for (int i = 0; i < static_cast<int>(src.args.size()); ++i) {
      auto bound = m.find(src.args[i]);
      if (bound == m.end()) continue;
      auto it = pos_lists.find({pid, i, bound->second});
      if (it == pos_lists.end()) return none;
      if (!best || it->second.size() < best->size()) best = &it->second;
    }
    return best ? *best : lists[pid];
  }
};

// Most-constrained-first backtracking. An anchored frontier (atoms with at
// least one bound argument) is maintained incrementally, so each step only
// inspects atoms adjacent to the matched region instead of every remaining
// atom.
struct hom_enumerator {
  const structure& target;
  target_index idx;
  std::vector<const atom*> atoms;
  std::vector<int> pid;  // target pred id per atom
  std::vector<char> done;
  std::vector<int> nbound;  // bound argument positions per atom
  std::map<elem_id, std::vector<int>> touch;
  std::set<int> frontier;  // not done, nbound > 0
  std::vector<int> hot;    // recently anchored: likely forced, checked first
  std::vector<elem_id> loose;
  std::map<elem_id, elem_id> m;
  const std::function<bool(const homomorphism&)>& emit;
  size_t n_done = 0;

  hom_enumerator(const structure& source, const structure& tgt,
                 std::map<elem_id, elem_id> seed,
                 const std::function<bool(const homomorphism&)>& em)
      : target(tgt), idx(tgt), m(std::move(seed)), emit(em) {
    for (const auto& a : source.atoms) {
      int i = static_cast<int>(atoms.size());
      atoms.push_back(&a);
      pid.push_back(idx.pred_id(a.pred));
      for (elem_id e : a.args) touch[e].push_back(i);
    }
    done.assign(atoms.size(), 0);
    nbound.assign(atoms.size(), 0);
    std::set<elem_id> in_atoms;
    for (const auto& a : source.atoms)
      for (elem_id e : a.args) in_atoms.insert(e);
    for (elem_id e : source.elements)
      if (!in_atoms.count(e)) loose.push_back(e);
    for (const auto& [e, img] : m) note_bound(e);
  }

  void note_bound(elem_id e) {
    auto it = touch.find(e);
    if (it == touch.end()) return;
    for (int i : it->second) {
      if (nbound[i]++ == 0 && !done[i]) frontier.insert(i);
      if (!done[i]) hot.push_back(i);
    }
  }

  void note_unbound(elem_id e) {
    auto it = touch.find(e);
    if (it == touch.end()) return;
    for (int i : it->second)
      if (--nbound[i] == 0) frontier.erase(i);
  }

  // Elements not touched by any atom map to arbitrary target elements.
  bool fill_loose(size_t k) {
    if (k == loose.size()) return emit(homomorphism{m});
    if (m.count(loose[k])) return fill_loose(k + 1);
    for (elem_id e : target.elements) {
      m[loose[k]] = e;
      if (!fill_loose(k + 1)) {
        m.erase(loose[k]);
        return false;
      }
      m.erase(loose[k]);
    }
    return true;
  }

  bool search() {
    if (n_done == atoms.size()) return fill_loose(0);
    int best = -1;
    size_t best_n = SIZE_MAX;
    // Fast path: a recently anchored atom with at most one candidate is an
    // optimal pick; anything else drained here stays reachable via the
    // frontier scan below.
    while (!hot.empty()) {
      int i = hot.back();
      hot.pop_back();
      if (done[i] || nbound[i] == 0) continue;
      if (idx.candidates(*atoms[i], pid[i], m).size() <= 1) {
        best = i;
        break;
      }
    }
    if (best < 0)
      for (int i : frontier) {
        size_t n = idx.candidates(*atoms[i], pid[i], m).size();
        if (n < best_n) {
          best_n = n;
          best = i;
          if (n <= 1) break;  // forced or failed: no better pick exists
        }
      }
    if (best < 0)  // disconnected piece: take any remaining atom
      for (size_t i = 0; i < atoms.size(); ++i)
        if (!done[i]) {
          best = static_cast<int>(i);
          break;
        }
    const atom& src = *atoms[best];
    done[best] = 1;
    ++n_done;
    frontier.erase(best);
    bool keep_going = true;
    for (const atom* cand : idx.candidates(src, pid[best], m)) {
      if (cand->args.size() != src.args.size()) continue;
      std::vector<elem_id> newly;
      bool ok = true;
      for (size_t i = 0; i < src.args.size() && ok; ++i) {
        auto it = m.find(src.args[i]);
        if (it == m.end()) {
          m[src.args[i]] = cand->args[i];
          note_bound(src.args[i]);
          newly.push_back(src.args[i]);
        } else if (it->second != cand->args[i]) {
          ok = false;
        }
      }
      if (ok && !search()) keep_going = false;
      for (elem_id e : newly) {
        m.erase(e);
        note_unbound(e);
      }
      if (!keep_going) break;
    }
    done[best] = 0;
    --n_done;
    if (nbound[best] > 0) frontier.insert(best);
    return keep_going;
  }
};

}  // namespace detail

// Enumerates homomorphisms extending `seed`; `emit` returns false to stop.
// Returns false iff the enumeration was stopped early.
inline bool for_each_homomorphism(const structure& source, const structure& target,
                                  const std::map<elem_id, elem_id>& seed,
                                  const std::function<bool(const homomorphism&)>& emit) {
  std::map<elem_id, elem_id> m = seed;
  // Constants map to the target's binding of the same name (or themselves).
  for (const auto& [name, e] : source.constant_binding) {
    auto it = target.constant_binding.find(name);
    elem_id img = it != target.constant_binding.end() ? it->second : e;
    auto bound = m.find(e);
    if (bound != m.end() && bound->second != img) return true;  // inconsistent seed: no homs
    m[e] = img;
  }
  detail::hom_enumerator h(source, target, std::move(m), emit);
  return h.search();
}

inline std::vector<homomorphism> find_homomorphisms(
    const structure& source, const structure& target,
    const std::map<elem_id, elem_id>& seed = {}) {
  std::vector<homomorphism> out;
  for_each_homomorphism(source, target, seed, [&](const homomorphism& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

inline std::optional<homomorphism> first_homomorphism(
    const structure& source, const structure& target,
    const std::map<elem_id, elem_id>& seed = {}) {
  std::optional<homomorphism> out;
  for_each_homomorphism(source, target, seed, [&](const homomorphism& h) {
    out = h;
    return false;
  });
  return out;
}

inline std::set<std::vector<elem_id>> eval_cq(const conjunctive_query& q,
                                              const structure& d) {
  for (const auto& [pred, arity] : q.canonical.predicates) {
    auto it = d.predicates.find(pred);
    if (it != d.predicates.end() && it->second != arity)
      throw std::invalid_argument("signature mismatch on predicate " + pred);
  }
  std::set<std::vector<elem_id>> view;
  for_each_homomorphism(q.canonical, d, {}, [&](const homomorphism& h) {
    std::vector<elem_id> tuple;
    tuple.reserve(q.free.size());
    for (elem_id v : q.free) tuple.push_back(h(v));
    view.insert(std::move(tuple));
    return true;
  });
  return view;
}

inline bool is_colored(const std::string& pred) {
  return pred.rfind("G:", 0) == 0 || pred.rfind("R:", 0) == 0;
}

inline std::string strip_color(const std::string& pred) {
  return is_colored(pred) ? pred.substr(2) : pred;
}

inline structure paint(const structure& s, hue c) {
  structure out;
  out.elements = s.elements;
  out.constant_binding = s.constant_binding;
  for (const auto& [pred, arity] : s.predicates) {
    if (is_colored(pred)) throw std::invalid_argument("paint: input already colored");
    out.predicates[hue_prefix(c) + pred] = arity;
  }
  for (const auto& a : s.atoms) out.atoms.insert(atom{hue_prefix(c) + a.pred, a.args});
  return out;
}

inline conjunctive_query paint(const conjunctive_query& q, hue c) {
  return conjunctive_query{paint(q.canonical, c), q.free};
}

inline structure dalt(const structure& s) {
  structure out;
  out.elements = s.elements;
  out.constant_binding = s.constant_binding;
  for (const auto& [pred, arity] : s.predicates) {
    auto [it, fresh] = out.predicates.emplace(strip_color(pred), arity);
    if (!fresh && it->second != arity)
      throw std::invalid_argument("dalt: arity clash on " + it->first);
  }
  for (const auto& a : s.atoms) out.atoms.insert(atom{strip_color(a.pred), a.args});
  return out;
}

inline conjunctive_query dalt(const conjunctive_query& q) {
  return conjunctive_query{dalt(q.canonical), q.free};
}

inline structure restrict_color(const structure& s, hue c) {
  structure out;
  const std::string prefix = hue_prefix(c);
  for (const auto& a : s.atoms)
    if (a.pred.rfind(prefix, 0) == 0) out.add_atom(a);
  for (const auto& [k, v] : s.constant_binding) out.bind_constant(k, v);
  return out;
}

}  // namespace redspider
