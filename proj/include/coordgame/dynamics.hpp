#pragma once

// Improvement and coalitional improvement paths, the lexicographic potential
// for DAG games, and topological ordering.

#include <algorithm>
#include <cstring>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "coordgame/equilibrium.hpp"
#include "coordgame/game.hpp"

namespace coordgame {

// ---------------------------------------------------------------------------
// Topological order

// Nodes of a directed cycle; each node has an edge to the next and the last
// has an edge back to the first.
struct CycleWitness {
  std::vector<NodeId> nodes;
};

using TopologicalResult = std::variant<std::vector<NodeId>, CycleWitness>;

// Kahn's algorithm, always releasing the lowest-id ready node first.
inline TopologicalResult topological_order(const Game& game) {
  const std::size_t n = game.num_nodes();
  std::vector<std::size_t> indegree(n);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < n; ++i) {
    indegree[i] = game.in_arcs(i).size();
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const Arc& arc : game.out_arcs(v)) {
      if (--indegree[arc.node] == 0) ready.push(arc.node);
    }
  }
  if (order.size() == n) return order;

  // Every leftover node keeps an in-neighbour among the leftovers, so walking
  // backwards must eventually repeat a node.
  std::vector<char> leftover(n, 1);
  for (NodeId v : order) leftover[v] = 0;
  NodeId v = static_cast<NodeId>(std::find(leftover.begin(), leftover.end(), 1) - leftover.begin());
  std::vector<std::size_t> seen_at(n, n);
  std::vector<NodeId> walk;
  while (seen_at[v] == n) {
    seen_at[v] = walk.size();
    walk.push_back(v);
    for (const Arc& arc : game.in_arcs(v)) {
      if (leftover[arc.node]) {
        v = arc.node;
        break;
      }
    }
  }
  CycleWitness witness{{walk.begin() + static_cast<std::ptrdiff_t>(seen_at[v]), walk.end()}};
  std::reverse(witness.nodes.begin(), witness.nodes.end());
  return witness;
}

// ---------------------------------------------------------------------------
// Lexicographic potential

// (p_{order[0]}(s), ..., p_{order[n-1]}(s)). The order must place every edge
// source before its target; otherwise the vector is not a potential and the
// call is rejected.
inline std::vector<Payoff> lex_potential(const Game& game, const std::vector<NodeId>& order,
                                         const Colouring& s) {
  const std::size_t n = game.num_nodes();
  if (order.size() != n) throw InputError("order is not a permutation of the nodes");
  std::vector<std::size_t> rank(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (order[r] >= n || rank[order[r]] != n) throw InputError("order is not a permutation of the nodes");
    rank[order[r]] = r;
  }
  for (const Edge& e : game.edges()) {
    if (rank[e.src] > rank[e.dst]) {
      throw InputError("order puts node " + std::to_string(game.external_id(e.dst)) +
                       " before its in-neighbour " + std::to_string(game.external_id(e.src)));
    }
  }
  validate_colouring(game, s);
  std::vector<Payoff> result(n);
  for (std::size_t r = 0; r < n; ++r) result[r] = detail::payoff_unchecked(game, s, order[r]);
  return result;
}

// a >_lex b
inline bool lex_greater(const std::vector<Payoff>& a, const std::vector<Payoff>& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// ---------------------------------------------------------------------------
// Improvement paths

enum class DeviationMode { unilateral, coalition };
enum class SelectionPolicy { first_by_tiebreak, random, scripted };

struct ScriptedMove {
  NodeId node;
  ColourId colour;
};

struct Scheduler {
  DeviationMode mode = DeviationMode::unilateral;
  SelectionPolicy policy = SelectionPolicy::first_by_tiebreak;
  std::uint64_t seed = 0;
  // Largest admitted coalition in coalition mode; 0 means all players.
  std::size_t max_coalition = 0;
  // Unilateral moves replayed cyclically under SelectionPolicy::scripted.
  std::vector<ScriptedMove> script;
};

enum class PathStatus { converged_equilibrium, revisited_state, step_budget_exhausted };

inline std::string_view to_string(PathStatus status) {
  switch (status) {
    case PathStatus::converged_equilibrium: return "converged-equilibrium";
    case PathStatus::revisited_state: return "revisited-state";
    case PathStatus::step_budget_exhausted: return "step-budget-exhausted";
  }
  return "unknown";
}

struct Path {
  Colouring start;
  std::vector<DeviationStep> steps;
  PathStatus status = PathStatus::converged_equilibrium;
  Colouring last;

  // Colouring after the first t steps.
  Colouring colouring_at(std::size_t t) const {
    Colouring s = start;
    for (std::size_t k = 0; k < t && k < steps.size(); ++k) apply_step(steps[k], s);
    return s;
  }
};

namespace detail {

inline std::string encode(const Colouring& s) {
  std::string key(s.size() * sizeof(ColourId), '\0');
  if (!s.empty()) std::memcpy(key.data(), s.data(), key.size());
  return key;
}

inline std::optional<DeviationStep> first_unilateral(const Game& game, const Colouring& s) {
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    const auto values = colour_payoffs(game, s, i);
    const Payoff current = payoff_unchecked(game, s, i);
    auto best = std::max_element(values.begin(), values.end());  // first maximum = lowest id
    if (*best > current) {
      const ColourId target = game.colour_set(i)[best - values.begin()];
      return DeviationStep{{{i, s[i], target, static_cast<std::int64_t>(*best - current)}}};
    }
  }
  return std::nullopt;
}

inline std::optional<DeviationStep> random_unilateral(const Game& game, const Colouring& s,
                                                      std::mt19937_64& rng) {
  std::vector<MemberChange> moves;
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    const auto values = colour_payoffs(game, s, i);
    const Payoff current = payoff_unchecked(game, s, i);
    auto set = game.colour_set(i);
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (values[k] > current) {
        moves.push_back({i, s[i], set[k], static_cast<std::int64_t>(values[k] - current)});
      }
    }
  }
  if (moves.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  return DeviationStep{{moves[pick(rng)]}};
}

inline std::optional<DeviationStep> random_coalition(const Game& game, const Colouring& s,
                                                     std::size_t max_size, const Budget& budget,
                                                     std::mt19937_64& rng) {
  check_budget(deviation_count(game, max_size), budget, "coalition search");
  std::vector<Payoff> base(game.num_nodes());
  for (NodeId i = 0; i < game.num_nodes(); ++i) base[i] = payoff_unchecked(game, s, i);
  for (std::size_t size = 1; size <= max_size; ++size) {
    std::vector<DeviationStep> found;
    for_each_deviation(game, s, size, size, [&](std::span<const NodeId> coalition, const Colouring& t) {
      DeviationStep step;
      for (NodeId m : coalition) {
        const Payoff after = payoff_unchecked(game, t, m);
        if (after <= base[m]) return false;
        step.members.push_back({m, s[m], t[m], static_cast<std::int64_t>(after - base[m])});
      }
      found.push_back(std::move(step));
      return false;
    });
    if (!found.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, found.size() - 1);
      return std::move(found[pick(rng)]);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Follows profitable deviations admitted by the scheduler until an
// equilibrium for that scheduler, a repeated colouring, or max_steps steps.
inline Path run_path(const Game& game, const Colouring& start, const Scheduler& sched,
                     std::size_t max_steps, const Budget& budget = {}) {
  if (max_steps < 1) throw InputError("max_steps must be at least 1");
  validate_colouring(game, start);
  const std::size_t max_size =
      sched.max_coalition == 0 ? game.num_nodes() : std::min(sched.max_coalition, game.num_nodes());
  if (sched.policy == SelectionPolicy::scripted) {
    if (sched.mode != DeviationMode::unilateral) throw InputError("scripted schedules are unilateral");
    if (sched.script.empty()) throw InputError("scripted schedule without moves");
    for (const auto& move : sched.script) {
      validate_node(game, move.node);
      if (!game.offers(move.node, move.colour)) throw InputError("scripted colour not offered");
    }
  }

  std::mt19937_64 rng(sched.seed);
  std::size_t script_cursor = 0;
  auto next_step = [&](const Colouring& s) -> std::optional<DeviationStep> {
    if (sched.mode == DeviationMode::coalition) {
      if (sched.policy == SelectionPolicy::random) {
        return detail::random_coalition(game, s, max_size, budget, rng);
      }
      return find_profitable_deviation(game, s, max_size, budget);
    }
    switch (sched.policy) {
      case SelectionPolicy::first_by_tiebreak: return detail::first_unilateral(game, s);
      case SelectionPolicy::random: return detail::random_unilateral(game, s, rng);
      case SelectionPolicy::scripted: {
        if (is_nash(game, s)) return std::nullopt;
        const auto& move = sched.script[script_cursor++ % sched.script.size()];
        Colouring after = s;
        after[move.node] = move.colour;
        auto step = make_step(game, s, after);
        if (!step.profitable()) {
          throw InputError("scripted move of node " + std::to_string(game.external_id(move.node)) +
                           " is not a profitable deviation");
        }
        return step;
      }
    }
    return std::nullopt;
  };

  Path path{start, {}, PathStatus::converged_equilibrium, start};
  Colouring s = start;
  std::unordered_set<std::string> visited;
  visited.insert(detail::encode(s));
  while (true) {
    auto step = next_step(s);
    if (!step) {
      path.status = PathStatus::converged_equilibrium;
      break;
    }
    if (path.steps.size() == max_steps) {
      path.status = PathStatus::step_budget_exhausted;
      break;
    }
    apply_step(*step, s);
    path.steps.push_back(std::move(*step));
    if (!visited.insert(detail::encode(s)).second) {
      path.status = PathStatus::revisited_state;
      break;
    }
  }
  path.last = std::move(s);
  return path;
}

// One line per step: index, coalition (external ids), colour changes,
// per-member payoff deltas, social welfare before and after.
inline void write_trace(std::ostream& out, const Game& game, const Path& path) {
  Colouring s = path.start;
  Payoff welfare = social_welfare(game, s);
  std::vector<NodeId> affected;
  for (std::size_t t = 0; t < path.steps.size(); ++t) {
    const auto& step = path.steps[t];
    affected.clear();
    for (const auto& m : step.members) {
      affected.push_back(m.node);
      for (const Arc& arc : game.out_arcs(m.node)) affected.push_back(arc.node);
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    std::int64_t change = 0;
    for (NodeId v : affected) change -= static_cast<std::int64_t>(detail::payoff_unchecked(game, s, v));
    apply_step(step, s);
    for (NodeId v : affected) change += static_cast<std::int64_t>(detail::payoff_unchecked(game, s, v));
    const Payoff after = static_cast<Payoff>(static_cast<std::int64_t>(welfare) + change);

    out << "step " << (t + 1) << " coalition ";
    for (std::size_t k = 0; k < step.members.size(); ++k) {
      out << (k ? "," : "") << game.external_id(step.members[k].node);
    }
    out << " changes";
    for (const auto& m : step.members) {
      out << ' ' << game.external_id(m.node) << ':' << game.colours().token(m.from) << "->"
          << game.colours().token(m.to);
    }
    out << " deltas ";
    for (std::size_t k = 0; k < step.members.size(); ++k) {
      out << (k ? "," : "") << (step.members[k].delta > 0 ? "+" : "") << step.members[k].delta;
    }
    out << " sw " << welfare << "->" << after << '\n';
    welfare = after;
  }
}

}  // namespace coordgame
