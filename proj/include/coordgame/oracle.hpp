#pragma once

// Brute-force ground truth over the full product of colour sets. Intended for
// small games; every search is guarded by a budget.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "coordgame/equilibrium.hpp"
#include "coordgame/game.hpp"
#include "coordgame/reductions.hpp"

namespace coordgame {

// Visits colourings in lexicographic order: node 0 is the most significant
// position, colours ascend by id. The visitor returns true to stop.
template <class Visitor>
bool for_each_colouring(const Game& game, Visitor&& visit, const Budget& budget = {}) {
  check_budget(colouring_count(game), budget, "colouring enumeration");
  const std::size_t n = game.num_nodes();
  std::vector<std::size_t> digits(n, 0);
  Colouring s = lowest_colouring(game);
  while (true) {
    if (visit(static_cast<const Colouring&>(s))) return true;
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      auto set = game.colour_set(static_cast<NodeId>(pos));
      if (++digits[pos] < set.size()) {
        s[pos] = set[digits[pos]];
        break;
      }
      digits[pos] = 0;
      s[pos] = set[0];
      if (pos == 0) return false;
    }
  }
}

inline std::vector<Colouring> enumerate_colourings(const Game& game, const Budget& budget = {}) {
  std::vector<Colouring> all;
  for_each_colouring(
      game,
      [&](const Colouring& s) {
        all.push_back(s);
        return false;
      },
      budget);
  return all;
}

enum class EquilibriumKind { nash, k, strong };

struct EquilibriumQuery {
  EquilibriumKind kind = EquilibriumKind::nash;
  std::size_t k = 1;  // coalition bound when kind == k
};

inline bool satisfies(const Game& game, const Colouring& s, const EquilibriumQuery& query,
                      const Budget& budget = {}) {
  // Every k-equilibrium is a Nash equilibrium, so the cheap test runs first.
  if (!is_nash(game, s)) return false;
  switch (query.kind) {
    case EquilibriumKind::nash:
      return true;
    case EquilibriumKind::k:
      return is_k_equilibrium(game, s, query.k, budget);
    case EquilibriumKind::strong:
      return is_strong(game, s, budget);
  }
  return false;
}

inline std::vector<Colouring> find_all(const Game& game, const EquilibriumQuery& query,
                                       const Budget& budget = {}) {
  if (query.kind == EquilibriumKind::k && (query.k < 1 || query.k > game.num_nodes())) {
    throw InputError("coalition bound k=" + std::to_string(query.k) + " outside 1.." +
                     std::to_string(game.num_nodes()));
  }
  std::vector<Colouring> found;
  for_each_colouring(
      game,
      [&](const Colouring& s) {
        if (satisfies(game, s, query, budget)) found.push_back(s);
        return false;
      },
      budget);
  return found;
}

inline std::optional<Colouring> find_first(const Game& game, const EquilibriumQuery& query,
                                           const Budget& budget = {}) {
  std::optional<Colouring> found;
  for_each_colouring(
      game,
      [&](const Colouring& s) {
        if (!satisfies(game, s, query, budget)) return false;
        found = s;
        return true;
      },
      budget);
  return found;
}

// The payoff node i can guarantee itself: the minimum, over all colourings of
// the other nodes, of i's best-response payoff.
inline Payoff securable_payoff(const Game& game, NodeId i, const Budget& budget = {}) {
  validate_node(game, i);
  Payoff worst = static_cast<Payoff>(-1);
  for_each_colouring(
      game,
      [&](const Colouring& s) {
        const auto values = detail::colour_payoffs(game, s, i);
        worst = std::min(worst, *std::max_element(values.begin(), values.end()));
        return false;
      },
      budget);
  return worst;
}

// Standalone gadget check: no Nash equilibrium exists, and each of the three
// core nodes can secure payoff at least 2.
inline bool verify_no_ne_gadget(Truth x, Truth y, Truth z) {
  const auto gadget = build_gadget(1, x, y, z);
  if (find_first(gadget.game, {EquilibriumKind::nash}).has_value()) return false;
  for (ExternalId core : {gadget.nodes.a, gadget.nodes.b, gadget.nodes.c}) {
    if (securable_payoff(gadget.game, *gadget.game.node_of(core)) < 2) return false;
  }
  return true;
}

}  // namespace coordgame
