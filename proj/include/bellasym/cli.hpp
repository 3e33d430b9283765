#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymmetry.hpp"
#include "errors.hpp"
#include "game.hpp"
#include "lhv.hpp"
#include "solver.hpp"
#include "util.hpp"

namespace bellasym {
namespace detail {

// A game argument names either a file on disk or a built-in table.
inline GameTable load_game(const std::string& arg) {
  std::ifstream f(arg);
  if (f) {
    std::ostringstream text;
    text << f.rdbuf();
    return parse_game(text.str());
  }
  for (const GameMetadata& meta : builtin_games())
    if (meta.name == arg) return builtin_game(arg);
  throw LookupError("no game file or built-in named '" + arg + "'");
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InputError("failed while writing '" + path + "'");
}

inline void check_xi_flag(double v, const std::string& flag) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError(flag + " must lie in the budget range [0, 1], got " +
                          format_double(v));
}

inline const char* yn(bool b) { return b ? "yes" : "no"; }

inline nlohmann::json strategy_json(const EveStrategy& e) {
  return {{"alphabet_a", e.alphabet_a()},
          {"alphabet_b", e.alphabet_b()},
          {"joint_weights", e.joint_weights},
          {"settings_a", e.settings_a},
          {"settings_b", e.settings_b},
          {"response_a", e.response_a},
          {"response_b", e.response_b}};
}

inline nlohmann::json diagnostics_json(const SolveDiagnostics& d) {
  return {{"lp_pivots", d.lp_pivots},
          {"iterations", d.iterations},
          {"lp_rows", d.lp_rows},
          {"lp_cols", d.lp_cols},
          {"support_size", d.support_size},
          {"feasibility_residual", d.feasibility_residual},
          {"budget_a_tight", d.budget_a_tight},
          {"budget_b_tight", d.budget_b_tight},
          {"general_marginals", d.general_marginals}};
}

inline void print_bound_result(std::ostream& out, const BoundResult& res) {
  out << "adversarial bound: " << format_fixed(res.value) << "\n";
  out << "budget: xi_x=" << format_fixed(res.budget.xi_x)
      << " xi_y=" << format_fixed(res.budget.xi_y)
      << " (H_x=" << format_fixed(res.budget.entropy_x)
      << " bits, H_y=" << format_fixed(res.budget.entropy_y) << " bits)\n";
  out << "budget tight: A=" << yn(res.diagnostics.budget_a_tight)
      << " B=" << yn(res.diagnostics.budget_b_tight) << "\n";
  out << "lp: rows=" << res.diagnostics.lp_rows
      << " cols=" << res.diagnostics.lp_cols
      << " pivots=" << res.diagnostics.lp_pivots
      << " support=" << res.diagnostics.support_size
      << " residual=" << format_fixed(res.diagnostics.feasibility_residual)
      << "\n";
  out << "witness alphabet: A=" << res.witness.alphabet_a()
      << " B=" << res.witness.alphabet_b() << "\n";
  if (res.diagnostics.general_marginals)
    out << "note: non-uniform setting marginals; the discretized bound is "
           "best-effort there\n";
}

}  // namespace detail

// Entry point shared by the binary and the tests.  Returns the process
// exit code: 0 success, 1 input/usage errors, 2 solver failures.
inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"local-hidden-variable bounds of two-party games when the "
               "measurement settings are partially known"};
  app.name("bellasym");
  app.require_subcommand(1);

  // --- bound ---
  auto* cmd_bound = app.add_subcommand(
      "bound", "classical (zero-knowledge) bound by exact enumeration");
  std::string bound_game;
  std::uint64_t bound_cap = kDefaultEnumerationCap;
  std::string bound_witness_path;
  bool bound_json = false;
  cmd_bound->add_option("game", bound_game, "game file or built-in name")
      ->required();
  cmd_bound->add_option("--cap", bound_cap,
                        "largest strategy count to enumerate");
  cmd_bound->add_option("--witness", bound_witness_path,
                        "write the optimal strategy to this file");
  cmd_bound->add_flag("--json", bound_json, "machine-readable output");

  // --- adv-bound ---
  auto* cmd_adv = app.add_subcommand(
      "adv-bound", "bound when the adversary holds setting knowledge");
  std::string adv_game;
  double adv_xi_x = 0.0, adv_xi_y = 0.0;
  std::size_t adv_heights = kDefaultHeights;
  bool adv_oracle = false, adv_json = false;
  std::size_t adv_restarts = kDefaultOracleRestarts;
  std::uint64_t adv_seed = 0;
  std::string adv_witness_path;
  cmd_adv->add_option("game", adv_game, "game file or built-in name")
      ->required();
  cmd_adv->add_option("--xi-x", adv_xi_x, "relative knowledge of Alice's setting")
      ->required();
  cmd_adv->add_option("--xi-y", adv_xi_y, "relative knowledge of Bob's setting")
      ->required();
  cmd_adv->add_option("--heights", adv_heights,
                      "points on the peak-probability grid (default 8)");
  cmd_adv->add_flag("--oracle", adv_oracle,
                    "also run the coordinate-ascent cross-check");
  cmd_adv->add_option("--restarts", adv_restarts, "oracle restarts (default 8)");
  cmd_adv->add_option("--seed", adv_seed, "oracle seed (default 0)");
  cmd_adv->add_option("--witness", adv_witness_path,
                      "write the optimal strategy to this file");
  cmd_adv->add_flag("--json", adv_json, "machine-readable output");

  // --- sweep ---
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "bounds along the knowledge axis, CSV output");
  std::string sweep_game, sweep_out_path;
  std::size_t sweep_steps = 21, sweep_heights = kDefaultHeights;
  bool sweep_two_param = false;
  cmd_sweep->add_option("game", sweep_game, "game file or built-in name")
      ->required();
  cmd_sweep->add_option("--steps", sweep_steps,
                        "grid points per axis (default 21)");
  cmd_sweep->add_option("--heights", sweep_heights,
                        "points on the peak-probability grid (default 8)");
  cmd_sweep->add_flag("--two-param", sweep_two_param,
                      "sweep the full (xi_x, xi_y) grid");
  cmd_sweep->add_option("--out", sweep_out_path,
                        "write the CSV here instead of stdout");

  // --- check-symmetry ---
  auto* cmd_sym = app.add_subcommand(
      "check-symmetry", "is the game invariant under swapping the parties?");
  std::string sym_game;
  bool sym_json = false;
  cmd_sym->add_option("game", sym_game, "game file or built-in name")
      ->required();
  cmd_sym->add_flag("--json", sym_json, "machine-readable output");

  // --- simulate ---
  auto* cmd_sim = app.add_subcommand(
      "simulate", "Monte-Carlo run of the optimal strategy at a budget");
  std::string sim_game;
  double sim_xi_x = 0.0, sim_xi_y = 0.0;
  std::size_t sim_heights = kDefaultHeights;
  std::uint64_t sim_shots = 0, sim_seed = 0;
  bool sim_json = false;
  cmd_sim->add_option("game", sim_game, "game file or built-in name")
      ->required();
  cmd_sim->add_option("--shots", sim_shots, "number of shots")->required();
  cmd_sim->add_option("--xi-x", sim_xi_x, "relative knowledge of Alice's setting");
  cmd_sim->add_option("--xi-y", sim_xi_y, "relative knowledge of Bob's setting");
  cmd_sim->add_option("--heights", sim_heights,
                      "points on the peak-probability grid (default 8)");
  cmd_sim->add_option("--seed", sim_seed, "simulation seed (default 0)");
  cmd_sim->add_flag("--json", sim_json, "machine-readable output");

  // --- builtin ---
  auto* cmd_builtin = app.add_subcommand(
      "builtin", "print a built-in game in the game file format");
  std::string builtin_name;
  bool builtin_list = false;
  cmd_builtin->add_option("name", builtin_name, "built-in game name");
  cmd_builtin->add_flag("--list", builtin_list, "list the built-in games");

  std::vector<const char*> argv;
  argv.push_back("bellasym");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (app.got_subcommand(cmd_bound)) {
      const GameTable g = detail::load_game(bound_game);
      const ClassicalBoundResult res = classical_bound(g, bound_cap);
      if (!bound_witness_path.empty())
        detail::write_file(
            bound_witness_path,
            serialize_strategy(EveStrategy::from_deterministic(g, res.witness)));
      if (bound_json) {
        nlohmann::json j = {
            {"value", res.value},
            {"witness",
             {{"alice", res.witness.alice_response},
              {"bob", res.witness.bob_response}}}};
        out << j.dump(2) << "\n";
      } else {
        out << "classical bound: " << detail::format_fixed(res.value) << "\n";
        out << "alice responses:";
        for (std::size_t a : res.witness.alice_response) out << " " << a;
        out << "\nbob responses:";
        for (std::size_t b : res.witness.bob_response) out << " " << b;
        out << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(cmd_adv)) {
      detail::check_xi_flag(adv_xi_x, "--xi-x");
      detail::check_xi_flag(adv_xi_y, "--xi-y");
      const GameTable g = detail::load_game(adv_game);
      const KnowledgeBudget budget =
          KnowledgeBudget::for_game(g, adv_xi_x, adv_xi_y);
      const BoundResult res =
          AdversarialBoundSolver(g, adv_heights).solve(budget);
      BoundResult oracle_res;
      if (adv_oracle)
        oracle_res = coordinate_ascent_oracle(g, budget, adv_restarts, adv_seed);
      if (!adv_witness_path.empty())
        detail::write_file(adv_witness_path, serialize_strategy(res.witness));
      if (adv_json) {
        nlohmann::json j = {{"value", res.value},
                            {"xi_x", budget.xi_x},
                            {"xi_y", budget.xi_y},
                            {"entropy_x", budget.entropy_x},
                            {"entropy_y", budget.entropy_y},
                            {"heights", adv_heights},
                            {"diagnostics", detail::diagnostics_json(res.diagnostics)},
                            {"witness", detail::strategy_json(res.witness)}};
        if (adv_oracle) {
          j["oracle_value"] = oracle_res.value;
          j["oracle_gap"] = res.value - oracle_res.value;
          j["oracle_diagnostics"] = detail::diagnostics_json(oracle_res.diagnostics);
        }
        out << j.dump(2) << "\n";
      } else {
        detail::print_bound_result(out, res);
        if (adv_oracle) {
          out << "oracle value: " << detail::format_fixed(oracle_res.value)
              << "\n";
          out << "lp - oracle gap: "
              << detail::format_fixed(res.value - oracle_res.value) << "\n";
        }
      }
      return 0;
    }

    if (app.got_subcommand(cmd_sweep)) {
      const GameTable g = detail::load_game(sweep_game);
      SweepOptions opt;
      opt.steps = sweep_steps;
      opt.heights = sweep_heights;
      opt.two_param = sweep_two_param;
      const std::string csv = curve_csv(sweep_curve(g, opt));
      if (sweep_out_path.empty())
        out << csv;
      else
        detail::write_file(sweep_out_path, csv);
      return 0;
    }

    if (app.got_subcommand(cmd_sym)) {
      const GameTable g = detail::load_game(sym_game);
      const SymmetryReport rep = check_symmetry(g);
      if (sym_json) {
        nlohmann::json j = {{"shape_compatible", rep.shape_compatible},
                            {"transpose_invariant", rep.transpose_invariant}};
        if (rep.has_difference)
          j["first_difference"] = {{"x", rep.diff_x},       {"a", rep.diff_a},
                                   {"y", rep.diff_y},       {"b", rep.diff_b},
                                   {"value", rep.value_forward},
                                   {"transposed", rep.value_transposed}};
        else
          j["first_difference"] = nullptr;
        out << j.dump(2) << "\n";
      } else {
        out << "shape compatible: " << detail::yn(rep.shape_compatible) << "\n";
        out << "transpose invariant: " << detail::yn(rep.transpose_invariant)
            << "\n";
        if (rep.has_difference)
          out << "first difference: coeff(" << rep.diff_x << "," << rep.diff_a
              << "," << rep.diff_y << "," << rep.diff_b << ") = "
              << detail::format_fixed(rep.value_forward) << ", transposed = "
              << detail::format_fixed(rep.value_transposed) << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(cmd_sim)) {
      detail::check_xi_flag(sim_xi_x, "--xi-x");
      detail::check_xi_flag(sim_xi_y, "--xi-y");
      const GameTable g = detail::load_game(sim_game);
      const KnowledgeBudget budget =
          KnowledgeBudget::for_game(g, sim_xi_x, sim_xi_y);
      const BoundResult res =
          AdversarialBoundSolver(g, sim_heights).solve(budget);
      const SimulationReport rep = simulate(g, res.witness, sim_shots, sim_seed);
      if (sim_json) {
        nlohmann::json j = {{"analytic_value", res.value},
                            {"empirical_value", rep.empirical_value},
                            {"stderr", rep.stderr_value},
                            {"setting_freq_a", rep.setting_freq_a},
                            {"setting_freq_b", rep.setting_freq_b},
                            {"shots", rep.shots},
                            {"seed", rep.seed}};
        out << j.dump(2) << "\n";
      } else {
        out << "analytic value: " << detail::format_fixed(res.value) << "\n";
        out << "empirical value: " << detail::format_fixed(rep.empirical_value)
            << " +/- " << detail::format_fixed(rep.stderr_value) << "\n";
        out << "setting freq A:";
        for (double v : rep.setting_freq_a)
          out << " " << detail::format_fixed(v);
        out << " (marginal:";
        for (double v : g.marginals_a()) out << " " << detail::format_fixed(v);
        out << ")\nsetting freq B:";
        for (double v : rep.setting_freq_b)
          out << " " << detail::format_fixed(v);
        out << " (marginal:";
        for (double v : g.marginals_b()) out << " " << detail::format_fixed(v);
        out << ")\nshots: " << rep.shots << "\nseed: " << rep.seed << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(cmd_builtin)) {
      if (builtin_list) {
        for (const GameMetadata& meta : builtin_games())
          out << meta.name << ": " << meta.description << "\n";
        return 0;
      }
      if (builtin_name.empty())
        throw LookupError("builtin needs a game name (or --list)");
      const GameTable g = builtin_game(builtin_name);
      for (const GameMetadata& meta : builtin_games())
        if (meta.name == builtin_name)
          out << "# " << meta.name << ": " << meta.description << "\n";
      out << serialize_game(g);
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace bellasym
