#pragma once

// Picks a solver by name or by graph structure.

#include <optional>
#include <string>
#include <string_view>

#include "coordgame/dynamics.hpp"
#include "coordgame/oracle.hpp"
#include "coordgame/solvers.hpp"

namespace coordgame {

enum class Method { automatic, dag, cycle, scc, two_colour, brute };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::dag: return "dag";
    case Method::cycle: return "cycle";
    case Method::scc: return "scc";
    case Method::two_colour: return "two-colour";
    case Method::brute: return "brute";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (Method m : {Method::automatic, Method::dag, Method::cycle, Method::scc, Method::two_colour, Method::brute}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown method '" + std::string(name) + "'");
}

// First applicable of dag, cycle, scc, two-colour; brute force otherwise.
inline Method pick_method(const Game& game) {
  const auto report = classify(game);
  if (report.is_dag) return Method::dag;
  const bool unit = game.has_unit_weights();
  if (report.is_single_simple_cycle && unit) return Method::cycle;
  if (report.all_sccs_simple_cycles && unit) return Method::scc;
  if (report.uses_at_most_two_colours) return Method::two_colour;
  return Method::brute;
}

struct SolveResult {
  Method method;
  std::optional<Colouring> colouring;  // empty only when brute force finds no strong equilibrium
  std::optional<Path> path;
};

inline SolveResult solve(const Game& game, Method method, const Budget& budget = {}) {
  if (method == Method::automatic) method = pick_method(game);
  SolveResult result{method, std::nullopt, std::nullopt};
  switch (method) {
    case Method::automatic:
    case Method::dag:
      result.colouring = solve_dag(game);
      break;
    case Method::cycle:
      result.colouring = solve_cycle_strong(game);
      break;
    case Method::scc: {
      auto solution = solve_scc(game);
      result.colouring = std::move(solution.colouring);
      result.path = std::move(solution.path);
      break;
    }
    case Method::two_colour: {
      auto solution = solve_two_colour(game);
      result.colouring = std::move(solution.colouring);
      result.path = std::move(solution.path);
      break;
    }
    case Method::brute:
      result.colouring = find_first(game, {EquilibriumKind::strong}, budget);
      break;
  }
  return result;
}

}  // namespace coordgame
