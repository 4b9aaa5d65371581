#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "redspider/relcore.hpp"

namespace redspider {

// Per-run universe of leg codes 1..s. Codes 1..4 are reserved (1 and 2 are the
// two distinguished grid labels, 3 and 4 never occur in rule sets). A run that
// translates k level-2 rules reserves the contiguous block 5..2k+4 first; named
// codes are then assigned above the block with the requested parity.
struct label_universe {
  int next_code = 5;
  int block_end = 4;
  int max_code = 4;
  std::map<std::string, int> named;
  std::map<int, std::string> names;

  label_universe() {
    named["<n,a,D,B>"] = 1;
    named["<w,a,D,B>"] = 2;
    names[1] = "<n,a,D,B>";
    names[2] = "<w,a,D,B>";
  }

  void reserve_block(int n_l2_rules) {
    if (next_code != 5) throw std::logic_error("block must be reserved first");
    block_end = 2 * (n_l2_rules + 1) + 2;
    next_code = block_end + 1;
    if (block_end > max_code) max_code = block_end;
  }

  int assign(const std::string& name, bool even_parity) {
    if (named.count(name)) throw std::invalid_argument("code name reused: " + name);
    int code = next_code;
    if ((code % 2 == 0) != even_parity) ++code;
    named[name] = code;
    names[code] = name;
    next_code = code + 1;
    if (code > max_code) max_code = code;
    return code;
  }

  int code(const std::string& name) const {
    auto it = named.find(name);
    if (it == named.end()) throw std::out_of_range("unknown code name: " + name);
    return it->second;
  }

  const std::string* name_of_code(int code) const {
    auto it = names.find(code);
    return it == names.end() ? nullptr : &it->second;
  }

  int s() const { return max_code; }

  bool registered(int code) const { return code >= 1 && code <= max_code; }

  bool even(int code) const { return code % 2 == 0; }
};

struct ideal_spider {
  hue col = hue::green;
  std::optional<int> upper;
  std::optional<int> lower;

  auto operator<=>(const ideal_spider&) const = default;

  bool full() const { return !upper && !lower; }

  std::string str() const {
    std::string out = col == hue::green ? "G[" : "R[";
    out += upper ? std::to_string(*upper) : "";
    out += "|";
    out += lower ? std::to_string(*lower) : "";
    out += "]";
    return out;
  }
};

inline ideal_spider full_green() { return ideal_spider{hue::green, {}, {}}; }
inline ideal_spider full_red() { return ideal_spider{hue::red, {}, {}}; }

namespace anatomy {
inline std::string thigh(bool upper_row, int j) {
  return (upper_row ? "TU" : "TL") + std::to_string(j);
}
inline std::string calf(bool upper_row, int j) {
  return (upper_row ? "CU" : "CL") + std::to_string(j);
}
inline elem_id calf_end() { return intern("c"); }
}  // namespace anatomy

// Concrete spider: head atom H(head, tail, antenna); per leg code j an upper
// leg TUj(head, knee), CUj(knee, c) and a lower leg TLj(head, knee), CLj(knee, c).
// Everything carries the spider's color except the calves named by upper/lower,
// which carry the opposite color.
inline structure make_spider(const ideal_spider& kind, elem_id tail, elem_id antenna,
                             const label_universe& u,
                             const std::string& fresh_prefix = "sp.") {
  if (tail == antenna) throw std::invalid_argument("tail and antenna must differ");
  structure out;
  out.bind_constant("c", anatomy::calf_end());
  const std::string me = hue_prefix(kind.col);
  elem_id head = intern(fresh_prefix + "h");
  out.add_atom(me + std::string("H"), {head, tail, antenna});
  for (int j = 1; j <= u.s(); ++j) {
    for (bool upper_row : {true, false}) {
      const auto& sel = upper_row ? kind.upper : kind.lower;
      hue calf_hue = (sel && *sel == j) ? other(kind.col) : kind.col;
      elem_id knee = intern(fresh_prefix + (upper_row ? "ku" : "kl") + std::to_string(j));
      out.add_atom(me + anatomy::thigh(upper_row, j), {head, knee});
      out.add_atom(hue_prefix(calf_hue) + anatomy::calf(upper_row, j),
                   {knee, anatomy::calf_end()});
    }
  }
  return out;
}

// Canonical query of f^I_J: a full (uncolored) spider minus the calves of the
// legs named by I and J; those knees are free ("the magic of the algebra"),
// along with the tail. Head, antenna and the remaining knees are existential.
struct spider_query_t {
  std::optional<int> upper;
  std::optional<int> lower;
  conjunctive_query canonical;
  elem_id tail = 0;
  elem_id antenna = 0;
  std::vector<elem_id> magic_knees;
};

inline spider_query_t spider_query(std::optional<int> upper, std::optional<int> lower,
                                   const label_universe& u,
                                   const std::string& var_prefix = "f.") {
  for (const auto& sel : {upper, lower})
    if (sel && !u.registered(*sel))
      throw std::out_of_range("unregistered leg code " + std::to_string(*sel));
  spider_query_t f;
  f.upper = upper;
  f.lower = lower;
  f.tail = intern(var_prefix + "t");
  f.antenna = intern(var_prefix + "an");
  elem_id head = intern(var_prefix + "h");
  structure& c = f.canonical.canonical;
  c.bind_constant("c", anatomy::calf_end());
  c.add_atom("H", {head, f.tail, f.antenna});
  for (int j = 1; j <= u.s(); ++j) {
    for (bool upper_row : {true, false}) {
      const auto& sel = upper_row ? upper : lower;
      elem_id knee = intern(var_prefix + (upper_row ? "ku" : "kl") + std::to_string(j));
      c.add_atom(anatomy::thigh(upper_row, j), {head, knee});
      if (sel && *sel == j)
        f.magic_knees.push_back(knee);
      else
        c.add_atom(anatomy::calf(upper_row, j), {knee, anatomy::calf_end()});
    }
  }
  f.canonical.free.push_back(f.tail);
  for (elem_id k : f.magic_knees) f.canonical.free.push_back(k);
  return f;
}

// The algebra rule: f^I_J applies to an opposite-request spider with legs
// (I', J') iff I' <= I and J' <= J, producing the opposite color with legs
// (I minus I', J minus J').
inline std::optional<ideal_spider> apply_spider_algebra(const spider_query_t& f,
                                                        const ideal_spider& sp) {
  auto fits = [](const std::optional<int>& sub, const std::optional<int>& sup) {
    return !sub || (sup && *sub == *sup);
  };
  if (!fits(sp.upper, f.upper) || !fits(sp.lower, f.lower)) return std::nullopt;
  auto minus = [](const std::optional<int>& sup, const std::optional<int>& sub) {
    return sub ? std::optional<int>{} : sup;
  };
  return ideal_spider{other(sp.col), minus(f.upper, sp.upper), minus(f.lower, sp.lower)};
}

enum class glue { wedge, vee };  // wedge: shared antenna; vee: shared tail

struct binary_query_t {
  spider_query_t left;
  spider_query_t right;
  glue mode = glue::wedge;
  conjunctive_query canonical;
};

inline binary_query_t binary_query(std::optional<int> u1, std::optional<int> l1,
                                   std::optional<int> u2, std::optional<int> l2,
                                   glue mode, const label_universe& u,
                                   const std::string& var_prefix = "bq.") {
  binary_query_t b;
  b.mode = mode;
  b.left = spider_query(u1, l1, u, var_prefix + "l.");
  b.right = spider_query(u2, l2, u, var_prefix + "r.");
  b.canonical.canonical = b.left.canonical.canonical;
  // Identify the shared endpoint, then merge the right operand in.
  elem_id shared_l = mode == glue::wedge ? b.left.antenna : b.left.tail;
  elem_id shared_r = mode == glue::wedge ? b.right.antenna : b.right.tail;
  structure right = rename_elements(b.right.canonical.canonical, [&](elem_id e) {
    return e == shared_r ? shared_l : e;
  });
  b.canonical.canonical.absorb(right);
  // Free: the non-identified endpoints, then each operand's magic knees.
  if (mode == glue::wedge) {
    b.canonical.free = {b.left.tail, b.right.tail};
  } else {
    b.canonical.free = {b.left.antenna, b.right.antenna};
  }
  for (elem_id k : b.left.magic_knees) b.canonical.free.push_back(k);
  for (elem_id k : b.right.magic_knees) b.canonical.free.push_back(k);
  return b;
}

inline binary_query_t binary_query(const spider_query_t& f, const spider_query_t& g,
                                   glue mode, const label_universe& u,
                                   const std::string& var_prefix = "bq.") {
  return binary_query(f.upper, f.lower, g.upper, g.lower, mode, u, var_prefix);
}

struct swarm_edge {
  ideal_spider label;
  elem_id src = 0;  // tail
  elem_id dst = 0;  // antenna

  auto operator<=>(const swarm_edge&) const = default;
};

struct swarm_t {
  std::set<swarm_edge> edges;

  std::set<elem_id> vertices() const {
    std::set<elem_id> out;
    for (const auto& e : edges) {
      out.insert(e.src);
      out.insert(e.dst);
    }
    return out;
  }

  bool operator==(const swarm_t&) const = default;
};

// Build the structure for a swarm directly in quotient form: knees are shared
// per (leg predicate, calf color) class, so each class contributes one knee and
// one calf and every head plugs into the class knees its label dictates.
inline structure compile_swarm(const swarm_t& m, const label_universe& u) {
  structure out;
  out.bind_constant("c", anatomy::calf_end());
  out.bind_constant("a", intern("a"));
  out.bind_constant("b", intern("b"));
  auto class_knee = [&](bool upper_row, int j, hue calf_hue) {
    elem_id knee = intern(std::string("k.") + (upper_row ? "u" : "l") +
                          std::to_string(j) + "." + (calf_hue == hue::green ? "G" : "R"));
    out.add_atom(hue_prefix(calf_hue) + anatomy::calf(upper_row, j),
                 {knee, anatomy::calf_end()});
    return knee;
  };
  int idx = 0;
  for (const auto& e : m.edges) {
    const std::string me = hue_prefix(e.label.col);
    elem_id head = intern("h" + std::to_string(idx++));
    out.add_atom(me + std::string("H"), {head, e.src, e.dst});
    for (int j = 1; j <= u.s(); ++j) {
      for (bool upper_row : {true, false}) {
        const auto& sel = upper_row ? e.label.upper : e.label.lower;
        hue calf_hue = (sel && *sel == j) ? other(e.label.col) : e.label.col;
        elem_id knee = class_knee(upper_row, j, calf_hue);
        out.add_atom(me + anatomy::thigh(upper_row, j), {head, knee});
      }
    }
  }
  return out;
}

// One edge per head atom whose attached legs complete a real spider; a head
// whose legs offer both calf colors on some row yields one edge per readable
// ideal-spider label.
inline swarm_t decompile_structure(const structure& d, const label_universe& u) {
  swarm_t out;
  detail::target_index idx(d);
  elem_id c = anatomy::calf_end();
  {
    auto it = d.constant_binding.find("c");
    if (it != d.constant_binding.end()) c = it->second;
  }
  for (hue col : {hue::green, hue::red}) {
    const std::string me = hue_prefix(col);
    const auto* heads = idx.pred_list(me + std::string("H"));
    if (!heads) continue;
    for (const atom* ha : *heads) {
      elem_id head = ha->args[0];
      // For each row and leg record which calf colors a knee of that leg offers.
      std::array<std::vector<bool>, 2> has_own, has_opp;
      bool real = true;
      for (int row = 0; row < 2 && real; ++row) {
        bool upper_row = row == 0;
        has_own[row].assign(u.s() + 1, false);
        has_opp[row].assign(u.s() + 1, false);
        for (int j = 1; j <= u.s(); ++j) {
          const auto* th = idx.pos_list(me + anatomy::thigh(upper_row, j), 0, head);
          if (th) {
            for (const atom* ta : *th) {
              elem_id knee = ta->args[1];
              for (hue ch : {hue::green, hue::red}) {
                const auto* ca =
                    idx.pos_list(hue_prefix(ch) + anatomy::calf(upper_row, j), 0, knee);
                if (!ca) continue;
                bool hits_c = false;
                for (const atom* cal : *ca)
                  if (cal->args[1] == c) hits_c = true;
                if (!hits_c) continue;
                (ch == col ? has_own : has_opp)[row][j] = true;
              }
            }
          }
          if (!has_own[row][j] && !has_opp[row][j]) {
            real = false;
            break;
          }
        }
      }
      if (!real) continue;
      // Label (I, J) readable iff the selected leg offers the opposite color
      // and every other leg of the row offers the base color.
      auto row_options = [&](int row) {
        std::vector<std::optional<int>> opts;
        int own_count = 0;
        for (int j = 1; j <= u.s(); ++j)
          if (has_own[row][j]) ++own_count;
        if (own_count == u.s()) opts.push_back(std::nullopt);
        for (int j = 1; j <= u.s(); ++j)
          if (has_opp[row][j] && own_count - (has_own[row][j] ? 1 : 0) == u.s() - 1)
            opts.push_back(j);
        return opts;
      };
      auto uppers = row_options(0);
      auto lowers = row_options(1);
      for (const auto& I : uppers)
        for (const auto& J : lowers)
          out.edges.insert(swarm_edge{ideal_spider{col, I, J}, ha->args[1], ha->args[2]});
    }
  }
  return out;
}

}  // namespace redspider
