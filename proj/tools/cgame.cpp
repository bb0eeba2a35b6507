// cgame: command-line front end for the coordgame library.
//
// Exit codes: 0 success / equilibrium verified or found, 1 negative answer,
// 2 input or structure error, 3 search budget exceeded.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coordgame/coordgame.hpp"

using namespace coordgame;

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kInputError = 2;
constexpr int kBudgetExceeded = 3;

EquilibriumQuery parse_level(const std::string& level) {
  if (level == "nash") return {EquilibriumKind::nash, 1};
  if (level == "strong") return {EquilibriumKind::strong, 0};
  if (level.rfind("k=", 0) == 0) {
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(level.substr(2), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != level.size() - 2) throw InputError("bad level '" + level + "'");
    return {EquilibriumKind::k, k};
  }
  throw InputError("unknown level '" + level + "', expected nash, strong or k=<int>");
}

std::vector<ScriptedMove> parse_script(const Game& game, const std::string& text) {
  std::vector<ScriptedMove> moves;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InputError("script move '" + item + "' is not <node>:<colour>");
    const auto node = game.node_of(std::stoull(item.substr(0, colon)));
    const auto colour = game.colours().find(item.substr(colon + 1));
    if (!node || !colour) throw InputError("script move '" + item + "' names an unknown node or colour");
    moves.push_back({*node, *colour});
  }
  return moves;
}

void print_payoff_line(const Game& game, const Colouring& s) {
  const auto values = payoffs(game, s);
  Payoff sw = 0;
  std::cout << colouring_tuple(game, s) << " payoffs";
  for (Payoff p : values) {
    std::cout << ' ' << p;
    sw += p;
  }
  std::cout << " sw " << sw << '\n';
}

void print_step(const Game& game, const DeviationStep& step) {
  std::cout << "deviation";
  for (const auto& m : step.members) {
    std::cout << ' ' << game.external_id(m.node) << ':' << game.colours().token(m.from) << "->"
              << game.colours().token(m.to) << '(' << (m.delta > 0 ? "+" : "") << m.delta << ')';
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordination games on weighted directed graphs"};
  app.require_subcommand(1);

  std::string game_path;
  std::string colouring_path;
  std::uint64_t budget_limit = Budget{}.max_colourings;
  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--budget", budget_limit, "Maximum candidate colourings an exhaustive search may examine");
  };

  auto* payoff_cmd = app.add_subcommand("payoff", "Payoff of every node and the social welfare");
  payoff_cmd->add_option("game", game_path)->required();
  payoff_cmd->add_option("colouring", colouring_path)->required();

  std::string level = "nash";
  auto* check_cmd = app.add_subcommand("check", "Check whether a colouring is an equilibrium");
  check_cmd->add_option("game", game_path)->required();
  check_cmd->add_option("colouring", colouring_path)->required();
  check_cmd->add_option("--level", level, "nash, strong or k=<int>");
  add_budget(check_cmd);

  std::string kind = "nash";
  auto* enumerate_cmd = app.add_subcommand("enumerate", "List colourings of the requested kind");
  enumerate_cmd->add_option("game", game_path)->required();
  enumerate_cmd->add_option("--kind", kind, "all, nash, strong or k=<int>");
  add_budget(enumerate_cmd);

  std::string method = "auto";
  bool solve_trace = false;
  auto* solve_cmd = app.add_subcommand("solve", "Compute a strong equilibrium");
  solve_cmd->add_option("game", game_path)->required();
  solve_cmd->add_option("--method", method, "auto, dag, cycle, scc, two-colour or brute");
  solve_cmd->add_flag("--trace", solve_trace, "Print the improvement path when the solver produces one");
  add_budget(solve_cmd);

  std::string mode = "unilateral";
  std::string policy = "first";
  std::size_t max_steps = 1000;
  std::uint64_t seed = 0;
  std::size_t max_coalition = 0;
  std::string script;
  bool trace = false;
  auto* dynamics_cmd = app.add_subcommand("dynamics", "Run an improvement path");
  dynamics_cmd->add_option("game", game_path)->required();
  dynamics_cmd->add_option("start", colouring_path)->required();
  dynamics_cmd->add_option("--mode", mode, "unilateral or coalition");
  dynamics_cmd->add_option("--policy", policy, "first, random or scripted");
  dynamics_cmd->add_option("--max-steps", max_steps);
  dynamics_cmd->add_option("--seed", seed);
  dynamics_cmd->add_option("--max-coalition", max_coalition, "0 admits coalitions of any size");
  dynamics_cmd->add_option("--script", script, "Moves <node>:<colour>,... replayed cyclically");
  dynamics_cmd->add_flag("--trace", trace);
  add_budget(dynamics_cmd);

  std::string cnf_path;
  bool expand = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "Build the game for a 3-CNF formula");
  reduce_cmd->add_option("cnf", cnf_path)->required();
  reduce_cmd->add_flag("--expand-weights", expand, "Replace weighted edges by unit-weight relay nodes");

  auto* poly_cmd = app.add_subcommand("to-polymatrix", "Translate to a 0/1 polymatrix game");
  poly_cmd->add_option("game", game_path)->required();

  auto* extract_cmd = app.add_subcommand("extract", "Read the truth assignment off a reduced game's equilibrium");
  extract_cmd->add_option("game", game_path)->required();
  extract_cmd->add_option("colouring", colouring_path)->required();

  auto* classify_cmd = app.add_subcommand("classify", "Report the structural classes the graph belongs to");
  classify_cmd->add_option("game", game_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    const Budget budget{budget_limit};
    if (reduce_cmd->parsed()) {
      const auto reduced = sat_to_game(parse_dimacs(read_file(cnf_path)));
      if (expand) {
        std::cout << emit_game(expand_weights(reduced.game).game, &reduced.roles);
      } else {
        std::cout << emit_game(reduced.game, &reduced.roles);
      }
      return kYes;
    }

    const std::string game_text = read_file(game_path);
    const Game game = parse_game(game_text);

    if (payoff_cmd->parsed()) {
      const auto s = parse_colouring(game, read_file(colouring_path));
      const auto values = payoffs(game, s);
      Payoff sw = 0;
      for (NodeId v = 0; v < game.num_nodes(); ++v) {
        std::cout << game.external_id(v) << ' ' << game.colours().token(s[v]) << ' ' << values[v] << '\n';
        sw += values[v];
      }
      std::cout << "sw " << sw << '\n';
      return kYes;
    }

    if (check_cmd->parsed()) {
      const auto s = parse_colouring(game, read_file(colouring_path));
      const auto query = parse_level(level);
      const std::size_t k = query.kind == EquilibriumKind::nash     ? 1
                            : query.kind == EquilibriumKind::strong ? game.num_nodes()
                                                                    : query.k;
      if (k < 1 || k > game.num_nodes()) {
        throw InputError("coalition bound k=" + std::to_string(k) + " outside 1.." +
                         std::to_string(game.num_nodes()));
      }
      const auto witness = find_profitable_deviation(game, s, k, budget);
      std::cout << level << ' ' << (witness ? "no" : "yes") << '\n';
      if (witness) print_step(game, *witness);
      return witness ? kNo : kYes;
    }

    if (enumerate_cmd->parsed()) {
      std::size_t listed = 0;
      if (kind == "all") {
        for_each_colouring(
            game,
            [&](const Colouring& s) {
              print_payoff_line(game, s);
              ++listed;
              return false;
            },
            budget);
      } else {
        for (const auto& s : find_all(game, parse_level(kind), budget)) {
          print_payoff_line(game, s);
          ++listed;
        }
      }
      return listed ? kYes : kNo;
    }

    if (solve_cmd->parsed()) {
      const auto result = solve(game, parse_method(method), budget);
      std::cout << "# method " << to_string(result.method) << '\n';
      if (!result.colouring) {
        std::cout << "# no strong equilibrium\n";
        return kNo;
      }
      if (solve_trace && result.path) write_trace(std::cout, game, *result.path);
      std::cout << emit_colouring(game, *result.colouring);
      return kYes;
    }

    if (dynamics_cmd->parsed()) {
      Scheduler sched;
      if (mode == "unilateral") sched.mode = DeviationMode::unilateral;
      else if (mode == "coalition") sched.mode = DeviationMode::coalition;
      else throw InputError("unknown mode '" + mode + "'");
      if (policy == "first") sched.policy = SelectionPolicy::first_by_tiebreak;
      else if (policy == "random") sched.policy = SelectionPolicy::random;
      else if (policy == "scripted") sched.policy = SelectionPolicy::scripted;
      else throw InputError("unknown policy '" + policy + "'");
      sched.seed = seed;
      sched.max_coalition = max_coalition;
      if (!script.empty()) sched.script = parse_script(game, script);
      const auto start = parse_colouring(game, read_file(colouring_path));
      const auto path = run_path(game, start, sched, max_steps, budget);
      if (trace) write_trace(std::cout, game, path);
      std::cout << "status " << to_string(path.status) << '\n' << "steps " << path.steps.size() << '\n';
      std::cout << emit_colouring(game, path.last);
      return path.status == PathStatus::converged_equilibrium ? kYes : kNo;
    }

    if (poly_cmd->parsed()) {
      std::cout << emit_polymatrix(game, to_polymatrix(game));
      return kYes;
    }

    if (extract_cmd->parsed()) {
      const auto roles = parse_roles(game_text);
      const auto s = parse_colouring(game, read_file(colouring_path));
      const auto assignment = extract_assignment(game, roles, s);
      for (std::size_t j = 0; j < assignment.size(); ++j) {
        std::cout << 'x' << (j + 1) << ' ' << (assignment[j] ? "true" : "false") << '\n';
      }
      return kYes;
    }

    if (classify_cmd->parsed()) {
      const auto r = classify(game);
      std::cout << std::boolalpha << "is_dag " << r.is_dag << '\n'
                << "is_single_simple_cycle " << r.is_single_simple_cycle << '\n'
                << "all_sccs_simple_cycles " << r.all_sccs_simple_cycles << '\n'
                << "uses_at_most_two_colours " << r.uses_at_most_two_colours << '\n'
                << "is_colour_complete " << r.is_colour_complete << '\n';
      return kYes;
    }
  } catch (const ResourceError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const StructureError& e) {
    std::cerr << "structure error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
