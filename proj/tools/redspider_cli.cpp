// Command-line front end: experiment orchestration over the saturation and
// reduction modules, JSON reports, and DOT export.
//
// Exit codes: 0 success, 1 usage error, 2 input-format error,
// 3 budget-inconclusive, 4 invariant discrepancy.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "redspider/io.hpp"

namespace rs = redspider;
using rs::json;

namespace {

bool verbose() {
  const char* env = std::getenv("REDSPIDER_LOG");
  return env && *env;
}

void log_line(const std::string& msg) {
  if (verbose()) std::cerr << "[redspider] " << msg << "\n";
}

struct command_result {
  int exit_code = 0;
  json payload;
  json symbols = json::object();
};

json file_digest(const std::string& path) {
  return json{{"path", path}, {"fnv1a", rs::fnv1a_hex(rs::read_file(path))}};
}

json load_json_file(const std::string& path) {
  try {
    return json::parse(rs::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + out_path);
  out << text;
}

json view_diff_json(const rs::view_diff& vd) {
  return json{{"only_green", vd.only_green.size()},
              {"only_red", vd.only_red.size()},
              {"difference", vd.difference()}};
}

// --- subcommand bodies ------------------------------------------------------

command_result run_chase(int stages) {
  rs::vd_context v = rs::make_vd_context();
  log_line("chasing the skeleton query system for " + std::to_string(stages) +
           " stage(s)");
  rs::structure d = rs::chase_qinf(v, stages);
  rs::view_diff vd = rs::view_difference(v.q_inf, d);
  command_result r;
  r.payload = json{{"stages", stages},
                   {"atoms", d.atoms.size()},
                   {"elements", d.elements.size()},
                   {"views", view_diff_json(vd)}};
  r.symbols = rs::symbol_table_json(v.c.u);
  if (vd.difference() != 1) r.exit_code = 4;
  return r;
}

command_result run_precompile() {
  rs::vd_context v = rs::make_vd_context();
  command_result r;
  r.payload = json{{"level2_rules", rs::t_all(v.c).size()},
                   {"level1_rules", v.l1_all.size()},
                   {"skeleton_level1_rules", v.l1_inf.size()},
                   {"grid_level1_rules", v.l1_box.size()},
                   {"reserved_block_end", v.c.u.block_end}};
  r.symbols = rs::symbol_table_json(v.c.u);
  return r;
}

command_result run_compile() {
  rs::vd_context v = rs::make_vd_context();
  json arities = json::array();
  for (const auto& q : v.q_inf) arities.push_back(q.canonical.free.size());
  command_result r;
  r.payload = json{{"skeleton_queries", v.q_inf.size()},
                   {"grid_queries", v.q_box.size()},
                   {"skeleton_free_arities", arities}};
  r.symbols = rs::symbol_table_json(v.c.u);
  return r;
}

command_result run_simulate(const std::string& machine_path, int budget,
                            const std::string& trace_path) {
  rs::rainworm_machine m = rs::machine_from_json(load_json_file(machine_path));
  log_line("simulating for up to " + std::to_string(budget) + " step(s)");
  rs::rw_run rr = rs::run(m, budget);
  if (!trace_path.empty()) {
    std::string text;
    for (const auto& w : rr.trace) {
      for (size_t i = 0; i < w.size(); ++i) text += (i ? " " : "") + w[i];
      text += "\n";
    }
    write_text(trace_path, text);
  }
  command_result r;
  r.payload = json{{"halted", rr.halted},
                   {"k", rr.k},
                   {"trace_length", rr.trace.size()},
                   {"final", rr.halted ? json(rr.u) : json(nullptr)}};
  if (!rr.halted) r.exit_code = 3;  // halting not decided within the budget
  return r;
}

command_result run_finite_model(const std::string& machine_path, int budget) {
  rs::rainworm_machine m = rs::machine_from_json(load_json_file(machine_path));
  rs::rw_run rr = rs::run(m, budget);
  command_result r;
  if (!rr.halted) {
    r.payload = json{{"halted", false}, {"budget", budget}};
    r.exit_code = 3;
    return r;
  }
  rs::rw_context ctx = rs::make_rw_context(m);
  log_line("machine halted after " + std::to_string(rr.k) +
           " step(s); running the model construction");
  rs::fm_result fm = rs::finite_model_procedure(ctx, rr.u, rr.k);
  rs::invariant_report inv = rs::check_fm_invariants(ctx, fm.g, rr.u);
  int interesting = rs::count_interesting(rs::find_matches(fm.g, ctx.t_tri));
  r.payload = json{{"halted", true},
                   {"k", rr.k},
                   {"final", rr.u},
                   {"iterations", fm.iterations},
                   {"edges", fm.g.edges.size()},
                   {"last_pass_added_nothing", fm.last_pass_added_nothing},
                   {"interesting_matches", interesting},
                   {"invariants_ok", inv.ok()},
                   {"discrepancies", fm.discrepancies},
                   {"graph", rs::greengraph_to_json(fm.g, &ctx.symbol)}};
  r.symbols = rs::symbol_table_json(ctx.c.u);
  if (!fm.last_pass_added_nothing || !fm.discrepancies.empty() || interesting != 0 ||
      !inv.ok())
    r.exit_code = 4;
  return r;
}

command_result run_compile_rainworm(const std::string& machine_path) {
  rs::rainworm_machine m = rs::machine_from_json(load_json_file(machine_path));
  rs::rw_context ctx = rs::make_rw_context(m);
  json codes = json::object();
  for (const auto& [sym, code] : ctx.code) codes[sym] = code;
  command_result r;
  r.payload = json{{"rule_count", ctx.t_tri.size()},
                   {"rules", rs::rules_l2_to_json(ctx.t_tri)},
                   {"codes", codes}};
  r.symbols = rs::symbol_table_json(ctx.c.u);
  return r;
}

command_result run_grid(int t, int tp, int budget, bool demo) {
  rs::sep_context c = rs::make_sep_context(0);
  log_line("grid experiment t=" + std::to_string(t) + " t'=" + std::to_string(tp));
  rs::grid_report rep = rs::grid_experiment(c, t, tp, budget);
  command_result r;
  r.payload = json{{"t", t},
                   {"tprime", tp},
                   {"budget", budget},
                   {"pattern_found", rep.pattern_found},
                   {"conclusive", rep.conclusive},
                   {"stages_run", rep.stages_run},
                   {"edge_count", rep.edge_count},
                   {"grid_edge_count", rep.grid_edge_count}};
  r.symbols = rs::symbol_table_json(c.u);
  if (demo) {
    // demo mode verifies the dichotomy: mismatched lengths must produce the
    // two-label pattern, equal lengths must not
    if (rep.pattern_found != (t != tp)) r.exit_code = 4;
  } else if (!rep.pattern_found && !rep.conclusive) {
    r.exit_code = 3;
  }
  return r;
}

command_result run_truncate_m(int depth) {
  rs::sep_context c = rs::make_sep_context(0);
  rs::truncation tr = rs::build_M_truncated(c, depth);
  bool pattern = rs::has_12_pattern(tr.g).has_value();
  std::set<int> grids;
  for (const auto& [e, t] : tr.grid_of) grids.insert(t);
  command_result r;
  r.payload = json{{"depth", depth},
                   {"edges", tr.g.edges.size()},
                   {"skeleton_edges", tr.skeleton.edges.size()},
                   {"grids", grids},
                   {"grids_closed", tr.grids_closed},
                   {"pattern_found", pattern}};
  r.symbols = rs::symbol_table_json(c.u);
  if (pattern)
    r.exit_code = 4;
  else if (!tr.grids_closed)
    r.exit_code = 3;
  return r;
}

command_result run_dy_dn(int i, bool with_grids) {
  rs::vd_context v = rs::make_vd_context();
  rs::dy_dn_result res = rs::build_Dy_Dn(v, i, with_grids);
  command_result r;
  r.payload = json{{"i", i},
                   {"with_grids", with_grids},
                   {"copies", res.copies},
                   {"skeleton_views", view_diff_json(res.inf_diff)},
                   {"grid_views", res.box_diff ? view_diff_json(*res.box_diff)
                                               : json(nullptr)},
                   {"closures_reached_fixpoint", res.closures_reached_fixpoint}};
  r.symbols = rs::symbol_table_json(v.c.u);
  if (with_grids && !res.closures_reached_fixpoint)
    r.exit_code = 3;
  else if (res.inf_diff.difference() != 1 ||
           (res.box_diff && res.box_diff->difference() != 0))
    r.exit_code = 4;
  return r;
}

int run_export_dot(const std::string& in_path, const std::string& out_path) {
  json j = load_json_file(in_path);
  if (!j.is_object() || !j.contains("edges") || !j.at("edges").is_array())
    throw std::invalid_argument("expected an object with an edges array");
  const auto& edges = j.at("edges");
  bool spider_labels = !edges.empty() && edges.front().at("label").is_object();
  std::string dot = spider_labels
                        ? rs::swarm_dot(rs::swarm_from_json(j))
                        : rs::greengraph_dot(rs::greengraph_from_json(j),
                                             rs::symbols_from_json(j));
  write_text(out_path, dot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rewriting and saturation laboratory"};
  app.require_subcommand(1);

  std::string out_path;
  long seed = 0;
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--seed", seed, "random seed echoed in the report");

  int stages = 3;
  auto* sc_chase = app.add_subcommand("chase", "chase the skeleton query system");
  sc_chase->add_option("--stages", stages, "chase depth");

  auto* sc_precompile =
      app.add_subcommand("precompile", "translate the rule inventory one level down");
  auto* sc_compile =
      app.add_subcommand("compile", "compile the translated rules into queries");

  std::string machine_path, trace_path;
  int budget = 1000;
  auto* sc_simulate = app.add_subcommand("simulate", "run a rewriting machine");
  sc_simulate->add_option("--machine", machine_path, "machine JSON file")->required();
  sc_simulate->add_option("--budget", budget, "step budget");
  sc_simulate->add_option("--trace", trace_path, "write one configuration per line");

  auto* sc_fm = app.add_subcommand("finite-model",
                                   "build the finite model of a halting machine");
  sc_fm->add_option("--machine", machine_path, "machine JSON file")->required();
  sc_fm->add_option("--budget", budget, "step budget for the halting run");

  auto* sc_cr = app.add_subcommand("compile-rainworm",
                                   "translate a machine into saturation rules");
  sc_cr->add_option("--machine", machine_path, "machine JSON file")->required();

  int t = 1, tp = 1;
  int grid_budget = 40;
  auto* sc_grid = app.add_subcommand("grid", "saturate a two-trail instance");
  sc_grid->add_option("--t", t, "first trail square length")->required();
  sc_grid->add_option("--tprime", tp, "second trail square length")->required();
  sc_grid->add_option("--budget", grid_budget, "stage budget");

  auto* sc_demo = app.add_subcommand("separation-demo",
                                     "two-trail dichotomy demonstration");
  sc_demo->add_option("--t", t, "first trail square length")->required();
  sc_demo->add_option("--tprime", tp, "second trail square length")->required();
  sc_demo->add_option("--budget", grid_budget, "stage budget");

  int depth = 7;
  auto* sc_trunc = app.add_subcommand("truncate-M",
                                      "finite truncation of the infinite model");
  sc_trunc->add_option("--depth", depth, "skeleton chase depth");

  int vd_i = 2;
  bool with_grids = false;
  auto* sc_dydn = app.add_subcommand("dy-dn", "build the paired view-difference structures");
  sc_dydn->add_option("--i", vd_i, "chase depth of the main component");
  sc_dydn->add_flag("--with-grids", with_grids, "also close under the grid system");

  std::string in_path;
  auto* sc_dot = app.add_subcommand("export-dot", "render a graph JSON file as DOT");
  sc_dot->add_option("--in", in_path, "graph JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sc_dot->parsed()) return run_export_dot(in_path, out_path);

    auto start = std::chrono::steady_clock::now();
    command_result r;
    std::string command;
    json inputs = json::object();
    inputs["seed"] = seed;
    if (sc_chase->parsed()) {
      command = "chase";
      inputs["stages"] = stages;
      r = run_chase(stages);
    } else if (sc_precompile->parsed()) {
      command = "precompile";
      r = run_precompile();
    } else if (sc_compile->parsed()) {
      command = "compile";
      r = run_compile();
    } else if (sc_simulate->parsed()) {
      command = "simulate";
      inputs["machine"] = file_digest(machine_path);
      inputs["budget"] = budget;
      r = run_simulate(machine_path, budget, trace_path);
    } else if (sc_fm->parsed()) {
      command = "finite-model";
      inputs["machine"] = file_digest(machine_path);
      inputs["budget"] = budget;
      r = run_finite_model(machine_path, budget);
    } else if (sc_cr->parsed()) {
      command = "compile-rainworm";
      inputs["machine"] = file_digest(machine_path);
      r = run_compile_rainworm(machine_path);
    } else if (sc_grid->parsed() || sc_demo->parsed()) {
      command = sc_demo->parsed() ? "separation-demo" : "grid";
      inputs["t"] = t;
      inputs["tprime"] = tp;
      inputs["budget"] = grid_budget;
      r = run_grid(t, tp, grid_budget, sc_demo->parsed());
    } else if (sc_trunc->parsed()) {
      command = "truncate-M";
      inputs["depth"] = depth;
      r = run_truncate_m(depth);
    } else if (sc_dydn->parsed()) {
      command = "dy-dn";
      inputs["i"] = vd_i;
      inputs["with_grids"] = with_grids;
      r = run_dy_dn(vd_i, with_grids);
    } else {
      std::cerr << "no subcommand\n";
      return 1;
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    json report = rs::make_report(command, inputs, r.payload, ms, r.symbols);
    write_text(out_path, report.dump(2) + "\n");
    return r.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 3;
  }
}
