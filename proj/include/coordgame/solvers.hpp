#pragma once

// Structural solvers: DAGs, single simple cycles, graphs whose strongly
// connected components are simple cycles, and two-colour games. Every solver
// returns a strong equilibrium; the cycle, SCC and two-colour solvers also
// return the coalitional improvement path that reaches it.

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coordgame/dynamics.hpp"
#include "coordgame/equilibrium.hpp"
#include "coordgame/game.hpp"

namespace coordgame {

// ---------------------------------------------------------------------------
// Strongly connected components

enum class ComponentKind { singleton, simple_cycle, other };

// Components are stored in a topological order of the condensation; the
// component at index c carries label c + 1.
struct SccDecomposition {
  std::vector<std::vector<NodeId>> components;  // members ascending
  std::vector<ComponentKind> kinds;
  std::vector<std::size_t> node_label;  // label of each node's component

  std::size_t label(std::size_t component) const { return component + 1; }
};

namespace detail {

// Tarjan's algorithm with an explicit call stack.
inline std::vector<std::vector<NodeId>> tarjan_sccs(const Game& game) {
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  const std::size_t n = game.num_nodes();
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  struct Frame {
    NodeId node;
    std::size_t next_arc;
  };
  std::vector<Frame> frames;
  std::vector<std::vector<NodeId>> sccs;
  std::size_t counter = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      const NodeId v = frames.back().node;
      auto arcs = game.out_arcs(v);
      if (frames.back().next_arc < arcs.size()) {
        const NodeId w = arcs[frames.back().next_arc++].node;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<NodeId> component;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        sccs.push_back(std::move(component));
      }
      frames.pop_back();
      if (!frames.empty()) {
        const NodeId parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  // Tarjan emits components in reverse topological order.
  std::reverse(sccs.begin(), sccs.end());
  return sccs;
}

}  // namespace detail

inline SccDecomposition decompose_scc(const Game& game) {
  SccDecomposition dec;
  dec.components = detail::tarjan_sccs(game);
  dec.node_label.assign(game.num_nodes(), 0);
  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    for (NodeId v : dec.components[c]) dec.node_label[v] = dec.label(c);
  }
  dec.kinds.reserve(dec.components.size());
  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    const auto& members = dec.components[c];
    if (members.size() == 1) {
      dec.kinds.push_back(ComponentKind::singleton);
      continue;
    }
    bool cycle = true;
    for (NodeId v : members) {
      std::size_t inside_in = 0;
      std::size_t inside_out = 0;
      for (const Arc& arc : game.in_arcs(v)) inside_in += dec.node_label[arc.node] == dec.label(c);
      for (const Arc& arc : game.out_arcs(v)) inside_out += dec.node_label[arc.node] == dec.label(c);
      if (inside_in != 1 || inside_out != 1) {
        cycle = false;
        break;
      }
    }
    dec.kinds.push_back(cycle ? ComponentKind::simple_cycle : ComponentKind::other);
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Classification

struct StructureReport {
  bool is_dag = false;
  bool is_single_simple_cycle = false;
  bool all_sccs_simple_cycles = false;
  bool uses_at_most_two_colours = false;
  bool is_colour_complete = false;
};

inline std::vector<ColourId> colours_in_use(const Game& game) {
  std::vector<ColourId> used;
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    for (ColourId c : game.colour_set(i)) used.push_back(c);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

// For every colour x, each weakly connected component of the subgraph induced
// by the nodes offering x must contain both directed edges between every pair
// of its members.
inline bool is_colour_complete(const Game& game) {
  const std::size_t n = game.num_nodes();
  std::vector<NodeId> parent(n);
  auto find = [&](NodeId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (ColourId x : colours_in_use(game)) {
    for (NodeId v = 0; v < n; ++v) parent[v] = v;
    for (const Edge& e : game.edges()) {
      if (game.offers(e.src, x) && game.offers(e.dst, x)) parent[find(e.src)] = find(e.dst);
    }
    std::vector<std::size_t> members(n, 0);
    std::vector<std::size_t> inner_edges(n, 0);
    for (NodeId v = 0; v < n; ++v) {
      if (game.offers(v, x)) ++members[find(v)];
    }
    for (const Edge& e : game.edges()) {
      if (game.offers(e.src, x) && game.offers(e.dst, x)) ++inner_edges[find(e.src)];
    }
    for (NodeId r = 0; r < n; ++r) {
      if (members[r] > 1 && inner_edges[r] != members[r] * (members[r] - 1)) return false;
    }
  }
  return true;
}

inline StructureReport classify(const Game& game) {
  StructureReport report;
  report.is_dag = std::holds_alternative<std::vector<NodeId>>(topological_order(game));
  const auto dec = decompose_scc(game);
  report.all_sccs_simple_cycles =
      std::none_of(dec.kinds.begin(), dec.kinds.end(), [](ComponentKind k) { return k == ComponentKind::other; });
  report.is_single_simple_cycle = dec.components.size() == 1 && dec.kinds[0] == ComponentKind::simple_cycle;
  report.uses_at_most_two_colours = colours_in_use(game).size() <= 2;
  report.is_colour_complete = is_colour_complete(game);
  return report;
}

// ---------------------------------------------------------------------------
// DAG solver

// Each node, in topological order, takes its lowest-id best response to the
// already fixed in-neighbours. The result is a Nash equilibrium, and on a DAG
// every Nash equilibrium is strong.
inline Colouring solve_dag(const Game& game) {
  const auto topo = topological_order(game);
  const auto* order = std::get_if<std::vector<NodeId>>(&topo);
  if (!order) throw StructureError("solve_dag: graph has a directed cycle");
  Colouring s = lowest_colouring(game);
  for (NodeId v : *order) {
    const auto values = detail::colour_payoffs(game, s, v);
    s[v] = game.colour_set(v)[std::max_element(values.begin(), values.end()) - values.begin()];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Simple cycles

namespace detail {

// A simple cycle with unit edge weights viewed position by position: the
// predecessor of position t is t-1 (position 0 follows the last one).
// Bonuses may include contributions from frozen external in-neighbours.
struct CycleInstance {
  std::vector<NodeId> nodes;
  std::vector<std::size_t> offsets{0};
  std::vector<ColourId> colours;
  std::vector<Weight> bonuses;
  std::vector<Weight> max_bonus;

  std::size_t size() const { return nodes.size(); }
  std::size_t prev(std::size_t t) const { return t == 0 ? nodes.size() - 1 : t - 1; }

  std::span<const ColourId> set(std::size_t t) const {
    return {colours.data() + offsets[t], colours.data() + offsets[t + 1]};
  }
  std::span<const Weight> bonus(std::size_t t) const {
    return {bonuses.data() + offsets[t], bonuses.data() + offsets[t + 1]};
  }
  std::optional<Weight> bonus_of(std::size_t t, ColourId c) const {
    auto s = set(t);
    auto it = std::lower_bound(s.begin(), s.end(), c);
    if (it == s.end() || *it != c) return std::nullopt;
    return bonus(t)[it - s.begin()];
  }
  bool in_max_bonus_set(std::size_t t, ColourId c) const {
    auto b = bonus_of(t, c);
    return b && *b == max_bonus[t];
  }

  void add_position(NodeId node, std::span<const ColourId> set_colours, std::span<const Weight> set_bonuses) {
    nodes.push_back(node);
    colours.insert(colours.end(), set_colours.begin(), set_colours.end());
    bonuses.insert(bonuses.end(), set_bonuses.begin(), set_bonuses.end());
    offsets.push_back(colours.size());
    max_bonus.push_back(*std::max_element(set_bonuses.begin(), set_bonuses.end()));
  }
};

struct CycleUpdate {
  std::size_t position;
  ColourId from;
  ColourId to;
  std::int64_t delta;
  int phase;
};

// Three-phase best-response procedure. Every update moves the considered
// player to a best response with maximal bonus; it takes at most 3n updates
// and stops at a Nash equilibrium.
inline std::vector<CycleUpdate> three_phase(const CycleInstance& cyc, std::vector<ColourId>& col) {
  const std::size_t n = cyc.size();
  auto pay = [&](std::size_t t, ColourId c) -> Payoff {
    return cyc.bonus_of(t, c).value() + (col[cyc.prev(t)] == c ? 1 : 0);
  };
  auto best_pay = [&](std::size_t t) -> Payoff {
    return cyc.max_bonus[t] + (cyc.in_max_bonus_set(t, col[cyc.prev(t)]) ? 1 : 0);
  };
  auto best_colour = [&](std::size_t t) -> ColourId {
    const ColourId pred = col[cyc.prev(t)];
    if (cyc.in_max_bonus_set(t, pred)) return pred;
    auto s = cyc.set(t);
    auto b = cyc.bonus(t);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (b[k] == cyc.max_bonus[t]) return s[k];
    }
    throw std::logic_error("empty max-bonus set");
  };

  std::vector<CycleUpdate> updates;
  // Returns true when t already best-responds.
  auto consider = [&](std::size_t t, int phase) {
    const Payoff current = pay(t, col[t]);
    const Payoff best = best_pay(t);
    if (current == best) return true;
    const ColourId to = best_colour(t);
    updates.push_back({t, col[t], to, static_cast<std::int64_t>(best - current), phase});
    col[t] = to;
    return false;
  };

  for (std::size_t t = 0; t + 1 < n; ++t) consider(t, 1);
  if (pay(n - 1, col[n - 1]) == best_pay(n - 1)) return updates;

  std::size_t t = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (consider(t, 2)) return updates;
    t = (t + 1) % n;
  }

  for (std::size_t p = 0; p < n; ++p) {
    if (!cyc.in_max_bonus_set(p, col[p])) throw std::logic_error("phase 3 entered outside max-bonus sets");
  }
  std::size_t phase3_updates = 0;
  while (!consider(t, 3)) {
    if (++phase3_updates > n) throw std::logic_error("phase 3 exceeded n updates");
    t = (t + 1) % n;
  }
  return updates;
}

// Lowest-id colour lying in every position's max-bonus set, if any. Starts
// from the position with the fewest colours and intersects sorted lists, so
// the cost is linear in the total size of the colour sets.
inline std::optional<ColourId> max_bonus_intersection(const CycleInstance& cyc) {
  std::size_t smallest = 0;
  for (std::size_t t = 1; t < cyc.size(); ++t) {
    if (cyc.set(t).size() < cyc.set(smallest).size()) smallest = t;
  }
  auto max_set = [&](std::size_t t) {
    std::vector<ColourId> out;
    auto s = cyc.set(t);
    auto b = cyc.bonus(t);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (b[k] == cyc.max_bonus[t]) out.push_back(s[k]);
    }
    return out;
  };
  std::vector<ColourId> candidates = max_set(smallest);
  std::vector<ColourId> scratch;
  for (std::size_t t = 0; t < cyc.size() && !candidates.empty(); ++t) {
    if (t == smallest) continue;
    auto s = cyc.set(t);
    auto b = cyc.bonus(t);
    scratch.clear();
    std::size_t k = 0;
    for (ColourId c : candidates) {
      while (k < s.size() && s[k] < c) ++k;
      if (k < s.size() && s[k] == c && b[k] == cyc.max_bonus[t]) scratch.push_back(c);
    }
    candidates.swap(scratch);
  }
  if (candidates.empty()) return std::nullopt;
  return candidates.front();
}

// Node order of a single simple cycle starting at node 0, or nullopt.
inline std::optional<std::vector<NodeId>> single_cycle_order(const Game& game) {
  const std::size_t n = game.num_nodes();
  if (n < 2) return std::nullopt;
  for (NodeId v = 0; v < n; ++v) {
    if (game.in_arcs(v).size() != 1 || game.out_arcs(v).size() != 1) return std::nullopt;
  }
  std::vector<NodeId> order{0};
  for (NodeId v = game.out_arcs(0)[0].node; v != 0; v = game.out_arcs(v)[0].node) {
    if (order.size() == n) return std::nullopt;
    order.push_back(v);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

inline std::vector<NodeId> require_unit_cycle(const Game& game, const char* who) {
  auto order = single_cycle_order(game);
  if (!order) throw StructureError(std::string(who) + ": graph is not a single simple cycle");
  if (!game.has_unit_weights()) throw StructureError(std::string(who) + ": cycle edges must have weight 1");
  return *order;
}

inline CycleInstance cycle_instance(const Game& game, const std::vector<NodeId>& order) {
  CycleInstance cyc;
  cyc.nodes.reserve(order.size());
  for (NodeId v : order) cyc.add_position(v, game.colour_set(v), game.bonuses(v));
  return cyc;
}

inline DeviationStep single_move(NodeId node, ColourId from, ColourId to, std::int64_t delta) {
  return DeviationStep{{{node, from, to, delta}}};
}

}  // namespace detail

struct CycleSolution {
  Colouring colouring;
  Path path;
  std::vector<int> phases;  // phase (1, 2 or 3) of each path step
};

// Three-phase improvement path on a single simple cycle with unit weights.
// Default start: every node on its lowest-id colour.
inline CycleSolution solve_cycle(const Game& game, std::optional<Colouring> start = std::nullopt) {
  const auto order = detail::require_unit_cycle(game, "solve_cycle");
  Colouring s = start ? std::move(*start) : lowest_colouring(game);
  validate_colouring(game, s);
  const auto cyc = detail::cycle_instance(game, order);
  std::vector<ColourId> col(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) col[t] = s[order[t]];

  CycleSolution result;
  result.path.start = s;
  for (const auto& u : detail::three_phase(cyc, col)) {
    const NodeId v = order[u.position];
    result.path.steps.push_back(detail::single_move(v, u.from, u.to, u.delta));
    result.phases.push_back(u.phase);
    s[v] = u.to;
  }
  result.path.status = PathStatus::converged_equilibrium;
  result.path.last = s;
  result.colouring = std::move(s);
  return result;
}

// Linear-time strong equilibrium on a single simple cycle: the monochromatic
// colouring in the lowest colour shared by every max-bonus set when one
// exists, otherwise the three-phase Nash equilibrium (which is then strong).
inline Colouring solve_cycle_strong(const Game& game) {
  const auto order = detail::require_unit_cycle(game, "solve_cycle_strong");
  const auto cyc = detail::cycle_instance(game, order);
  if (auto shared = detail::max_bonus_intersection(cyc)) {
    return Colouring(game.num_nodes(), *shared);
  }
  std::vector<ColourId> col(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) col[t] = cyc.set(t).front();
  detail::three_phase(cyc, col);
  Colouring s(game.num_nodes());
  for (std::size_t t = 0; t < order.size(); ++t) s[order[t]] = col[t];
  return s;
}

// ---------------------------------------------------------------------------
// Components whose SCCs are simple cycles

// The game restricted to `component`, with each member's bonus for colour a
// raised by the weight of its in-edges from outside the component whose source
// has colour a in s. External ids are preserved.
inline Game induced_game(const Game& game, std::span<const NodeId> component, const Colouring& s) {
  validate_colouring(game, s);
  std::vector<char> inside(game.num_nodes(), 0);
  for (NodeId v : component) inside.at(v) = 1;
  GameBuilder builder;
  for (std::size_t c = 0; c < game.colours().size(); ++c) {
    builder.declare_colour(game.colours().token(static_cast<ColourId>(c)));
  }
  for (NodeId v : component) {
    builder.add_node(game.external_id(v));
    auto set = game.colour_set(v);
    builder.set_colours(game.external_id(v), std::vector<ColourId>(set.begin(), set.end()));
    std::vector<Weight> bonus(game.bonuses(v).begin(), game.bonuses(v).end());
    for (const Arc& arc : game.in_arcs(v)) {
      if (inside[arc.node]) continue;
      if (auto slot = game.colour_slot(v, s[arc.node])) bonus[*slot] += arc.weight;
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (bonus[k] != 0) builder.set_bonus(game.external_id(v), set[k], bonus[k]);
    }
  }
  for (NodeId v : component) {
    for (const Arc& arc : game.out_arcs(v)) {
      if (inside[arc.node]) builder.add_edge(game.external_id(v), game.external_id(arc.node), arc.weight);
    }
  }
  return std::move(builder).build();
}

struct SccSolution {
  Colouring colouring;
  Path path;
};

// Walks the components in label order. A singleton moves to its lowest-id
// best response when it is not already best-responding. A cycle runs the
// three-phase procedure under induced bonuses and, if the resulting Nash
// equilibrium leaves every member below its maximum while all max-bonus sets
// share a colour, finishes with the coalition step to that monochromatic
// colouring. The concatenated steps form a coalitional improvement path of
// the whole game ending in a strong equilibrium.
inline SccSolution solve_scc(const Game& game, std::optional<Colouring> start = std::nullopt) {
  const auto dec = decompose_scc(game);
  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    if (dec.kinds[c] == ComponentKind::other) {
      throw StructureError("solve_scc: the strongly connected component of node " +
                           std::to_string(game.external_id(dec.components[c].front())) +
                           " is not a simple cycle");
    }
  }
  if (!game.has_unit_weights()) {
    throw StructureError(
        "solve_scc: weighted edges are not supported (best-response dynamics on weighted cycles need "
        "not terminate)");
  }
  Colouring s = start ? std::move(*start) : lowest_colouring(game);
  validate_colouring(game, s);

  SccSolution result;
  result.path.start = s;
  auto& steps = result.path.steps;

  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    const auto& members = dec.components[c];
    const std::size_t label = dec.label(c);

    if (dec.kinds[c] == ComponentKind::singleton) {
      const NodeId v = members.front();
      const auto values = detail::colour_payoffs(game, s, v);
      const Payoff current = detail::payoff_unchecked(game, s, v);
      auto best = std::max_element(values.begin(), values.end());
      if (*best > current) {
        const ColourId to = game.colour_set(v)[best - values.begin()];
        steps.push_back(detail::single_move(v, s[v], to, static_cast<std::int64_t>(*best - current)));
        s[v] = to;
      }
      continue;
    }

    std::vector<NodeId> order{members.front()};
    while (true) {
      NodeId next = order.back();
      for (const Arc& arc : game.out_arcs(order.back())) {
        if (dec.node_label[arc.node] == label) next = arc.node;
      }
      if (next == order.front()) break;
      order.push_back(next);
    }

    detail::CycleInstance cyc;
    cyc.nodes.reserve(order.size());
    std::vector<Weight> induced;
    for (NodeId v : order) {
      induced.assign(game.bonuses(v).begin(), game.bonuses(v).end());
      for (const Arc& arc : game.in_arcs(v)) {
        if (dec.node_label[arc.node] == label) continue;
        if (auto slot = game.colour_slot(v, s[arc.node])) induced[*slot] += arc.weight;
      }
      cyc.add_position(v, game.colour_set(v), induced);
    }

    std::vector<ColourId> col(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) col[t] = s[order[t]];
    for (const auto& u : detail::three_phase(cyc, col)) {
      const NodeId v = order[u.position];
      steps.push_back(detail::single_move(v, u.from, u.to, u.delta));
      s[v] = u.to;
    }

    const auto shared = detail::max_bonus_intersection(cyc);
    if (!shared) continue;
    DeviationStep joint;
    bool all_below_max = true;
    for (std::size_t t = 0; t < order.size() && all_below_max; ++t) {
      const Payoff current = cyc.bonus_of(t, col[t]).value() + (col[cyc.prev(t)] == col[t] ? 1 : 0);
      const Payoff maximum = cyc.max_bonus[t] + 1;
      all_below_max = current < maximum;
      if (col[t] != *shared) {
        joint.members.push_back({order[t], col[t], *shared, static_cast<std::int64_t>(maximum - current)});
      }
    }
    if (!all_below_max || joint.members.empty()) continue;
    std::sort(joint.members.begin(), joint.members.end(),
              [](const MemberChange& a, const MemberChange& b) { return a.node < b.node; });
    apply_step(joint, s);
    steps.push_back(std::move(joint));
  }

  result.path.status = PathStatus::converged_equilibrium;
  result.path.last = s;
  result.colouring = std::move(s);
  return result;
}

// ---------------------------------------------------------------------------
// Two-colour games

struct TwoColourSolution {
  Colouring colouring;
  Path path;
};

namespace detail {

// Largest set of nodes not yet on `target` that all strictly gain when the
// whole set switches to `target`. Found by repeatedly discarding candidates
// that do not gain; with non-negative weights no profitable switching
// coalition is ever discarded. Empty when none exists.
inline std::vector<NodeId> switching_coalition(const Game& game, const Colouring& s, ColourId target) {
  const std::size_t n = game.num_nodes();
  std::vector<char> alive(n, 0);
  std::vector<NodeId> candidates;
  for (NodeId v = 0; v < n; ++v) {
    if (s[v] != target && game.offers(v, target)) {
      alive[v] = 1;
      candidates.push_back(v);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId v : candidates) {
      if (!alive[v]) continue;
      Payoff switched = game.bonus(v, target);
      for (const Arc& arc : game.in_arcs(v)) {
        if (alive[arc.node] || s[arc.node] == target) switched += arc.weight;
      }
      if (switched <= payoff_unchecked(game, s, v)) {
        alive[v] = 0;
        changed = true;
      }
    }
  }
  std::vector<NodeId> result;
  for (NodeId v : candidates) {
    if (alive[v]) result.push_back(v);
  }
  return result;
}

}  // namespace detail

// First only switches to the lower-id colour ("blue") while some coalition
// profits from doing so, then only to the other colour ("red"). The final
// colouring is a strong equilibrium.
inline TwoColourSolution solve_two_colour(const Game& game, std::optional<Colouring> start = std::nullopt) {
  const auto used = colours_in_use(game);
  if (used.size() > 2) {
    throw StructureError("solve_two_colour: " + std::to_string(used.size()) + " colours in use");
  }
  Colouring s = start ? std::move(*start) : lowest_colouring(game);
  validate_colouring(game, s);
  TwoColourSolution result;
  result.path.start = s;
  for (ColourId target : used) {
    while (true) {
      const auto coalition = detail::switching_coalition(game, s, target);
      if (coalition.empty()) break;
      Colouring after = s;
      for (NodeId v : coalition) after[v] = target;
      auto step = make_step(game, s, after);
      if (!step.profitable()) throw std::logic_error("switching coalition is not profitable");
      s = std::move(after);
      result.path.steps.push_back(std::move(step));
    }
  }
  result.path.status = PathStatus::converged_equilibrium;
  result.path.last = s;
  result.colouring = std::move(s);
  return result;
}

}  // namespace coordgame
