#pragma once

#include <random>
#include <string>
#include <vector>

#include "redspider/chase.hpp"
#include "redspider/relcore.hpp"

namespace rstest {

using namespace redspider;

// Random uncolored structure over predicates P0../arity 1-2 and elements e0..
inline structure random_structure(std::mt19937& rng, int n_elems, int n_preds,
                                  int n_atoms, const std::string& elem_prefix = "e") {
  structure s;
  std::vector<elem_id> elems;
  for (int i = 0; i < n_elems; ++i) elems.push_back(intern(elem_prefix + std::to_string(i)));
  for (elem_id e : elems) s.elements.insert(e);
  std::vector<std::pair<std::string, int>> preds;
  for (int i = 0; i < n_preds; ++i) preds.push_back({"P" + std::to_string(i), 1 + i % 2});
  std::uniform_int_distribution<int> pe(0, n_elems - 1), pp(0, n_preds - 1);
  for (int i = 0; i < n_atoms; ++i) {
    auto& [name, arity] = preds[pp(rng)];
    std::vector<elem_id> args;
    for (int k = 0; k < arity; ++k) args.push_back(elems[pe(rng)]);
    s.add_atom(name, std::move(args));
  }
  return s;
}

// Random connected-ish query over the same predicate family.
inline conjunctive_query random_query(std::mt19937& rng, int n_vars, int n_preds,
                                      int n_atoms, int n_free,
                                      const std::string& var_prefix = "x") {
  conjunctive_query q;
  std::vector<elem_id> vars;
  for (int i = 0; i < n_vars; ++i) vars.push_back(intern(var_prefix + std::to_string(i)));
  for (elem_id v : vars) q.canonical.elements.insert(v);
  std::uniform_int_distribution<int> pv(0, n_vars - 1), pp(0, n_preds - 1);
  for (int i = 0; i < n_atoms; ++i) {
    int p = pp(rng);
    int arity = 1 + p % 2;
    std::vector<elem_id> args;
    for (int k = 0; k < arity; ++k) args.push_back(vars[pv(rng)]);
    q.canonical.add_atom("P" + std::to_string(p), std::move(args));
  }
  for (int i = 0; i < n_free && i < n_vars; ++i) q.free.push_back(vars[i]);
  return q;
}

// Oracle: enumerate every total assignment of q's elements into d.
inline std::set<std::vector<elem_id>> brute_force_eval(const conjunctive_query& q,
                                                       const structure& d) {
  std::vector<elem_id> srcs(q.canonical.elements.begin(), q.canonical.elements.end());
  std::vector<elem_id> tgts(d.elements.begin(), d.elements.end());
  std::set<std::vector<elem_id>> view;
  std::map<elem_id, elem_id> m;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == srcs.size()) {
      for (const auto& a : q.canonical.atoms) {
        std::vector<elem_id> args;
        for (elem_id e : a.args) args.push_back(m.at(e));
        if (!d.has_atom(atom{a.pred, args})) return;
      }
      std::vector<elem_id> tuple;
      for (elem_id v : q.free) tuple.push_back(m.at(v));
      view.insert(tuple);
      return;
    }
    elem_id src = srcs[i];
    // Constants must land on the target's binding of the same name.
    for (const auto& [name, e] : q.canonical.constant_binding)
      if (e == src) {
        auto it = d.constant_binding.find(name);
        m[src] = it != d.constant_binding.end() ? it->second : e;
        rec(i + 1);
        m.erase(src);
        return;
      }
    for (elem_id t : tgts) {
      m[src] = t;
      rec(i + 1);
    }
    m.erase(src);
  };
  rec(0);
  return view;
}

}  // namespace rstest
