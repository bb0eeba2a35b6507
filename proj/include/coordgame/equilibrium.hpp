#pragma once

// Nash, k- and strong equilibrium predicates. The coalition checks are
// exhaustive and guarded by a budget on the number of candidate deviations.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coordgame/game.hpp"

namespace coordgame {

struct Budget {
  std::uint64_t max_colourings = 10'000'000;
};

namespace detail {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

}  // namespace detail

// Size of the product of all colour sets (saturating).
inline std::uint64_t colouring_count(const Game& game) {
  std::uint64_t total = 1;
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    total = detail::saturating_mul(total, game.colour_set(i).size());
  }
  return total;
}

// Number of deviations s -> s' with 1 <= |K| <= max_size from any fixed s:
// the elementary symmetric sums of (|A(i)| - 1) up to degree max_size.
inline std::uint64_t deviation_count(const Game& game, std::size_t max_size) {
  std::vector<std::uint64_t> e(max_size + 1, 0);
  e[0] = 1;
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    const std::uint64_t d = game.colour_set(i).size() - 1;
    if (d == 0) continue;
    for (std::size_t j = max_size; j >= 1; --j) {
      e[j] = detail::saturating_add(e[j], detail::saturating_mul(e[j - 1], d));
    }
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= max_size; ++j) total = detail::saturating_add(total, e[j]);
  return total;
}

inline void check_budget(std::uint64_t needed, const Budget& budget, const char* what) {
  if (needed > budget.max_colourings) {
    throw ResourceError(std::string(what) + " needs " +
                        (needed == detail::kSaturated ? std::string("more than 2^64")
                                                      : std::to_string(needed)) +
                        " candidate colourings, budget is " + std::to_string(budget.max_colourings));
  }
}

inline bool is_nash(const Game& game, const Colouring& s) {
  validate_colouring(game, s);
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    const auto values = detail::colour_payoffs(game, s, i);
    const Payoff current = detail::payoff_unchecked(game, s, i);
    for (Payoff v : values) {
      if (v > current) return false;
    }
  }
  return true;
}

// Visits every deviation of a coalition with min_size <= |K| <= max_size.
// Order: coalition size ascending, coalitions lexicographically, then target
// colours odometer-style (first member most significant, colour id
// ascending). The visitor gets (coalition, candidate) and returns true to
// stop; the function returns whether it was stopped.
template <class Visitor>
bool for_each_deviation(const Game& game, const Colouring& s, std::size_t min_size,
                        std::size_t max_size, Visitor&& visit) {
  std::vector<NodeId> movable;
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    if (game.colour_set(i).size() > 1) movable.push_back(i);
  }
  max_size = std::min(max_size, movable.size());
  min_size = std::max<std::size_t>(min_size, 1);

  Colouring candidate = s;
  std::vector<NodeId> coalition;
  std::vector<std::vector<ColourId>> alternatives;
  std::vector<std::size_t> digits;

  for (std::size_t size = min_size; size <= max_size; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t k = 0; k < size; ++k) pick[k] = k;
    while (true) {
      coalition.assign(size, 0);
      alternatives.assign(size, {});
      for (std::size_t k = 0; k < size; ++k) {
        coalition[k] = movable[pick[k]];
        for (ColourId c : game.colour_set(coalition[k])) {
          if (c != s[coalition[k]]) alternatives[k].push_back(c);
        }
      }
      digits.assign(size, 0);
      while (true) {
        for (std::size_t k = 0; k < size; ++k) candidate[coalition[k]] = alternatives[k][digits[k]];
        if (visit(std::span<const NodeId>(coalition), static_cast<const Colouring&>(candidate))) {
          return true;
        }
        bool exhausted = true;
        for (std::size_t pos = size; pos-- > 0;) {
          if (++digits[pos] < alternatives[pos].size()) {
            exhausted = false;
            break;
          }
          digits[pos] = 0;
        }
        if (exhausted) break;
      }
      for (NodeId m : coalition) candidate[m] = s[m];

      // next combination in lexicographic order
      std::size_t k = size;
      while (k > 0 && pick[k - 1] == movable.size() - size + (k - 1)) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t j = k; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return false;
}

// First profitable deviation of a coalition of at most max_size players in
// for_each_deviation order, if any.
inline std::optional<DeviationStep> find_profitable_deviation(const Game& game, const Colouring& s,
                                                              std::size_t max_size,
                                                              const Budget& budget = {}) {
  validate_colouring(game, s);
  check_budget(deviation_count(game, max_size), budget, "coalition search");
  std::vector<Payoff> base(game.num_nodes());
  for (NodeId i = 0; i < game.num_nodes(); ++i) base[i] = detail::payoff_unchecked(game, s, i);

  std::optional<DeviationStep> found;
  for_each_deviation(game, s, 1, max_size, [&](std::span<const NodeId> coalition, const Colouring& t) {
    for (NodeId m : coalition) {
      if (detail::payoff_unchecked(game, t, m) <= base[m]) return false;
    }
    DeviationStep step;
    for (NodeId m : coalition) {
      step.members.push_back({m, s[m], t[m],
                              static_cast<std::int64_t>(detail::payoff_unchecked(game, t, m)) -
                                  static_cast<std::int64_t>(base[m])});
    }
    found = std::move(step);
    return true;
  });
  return found;
}

// True iff no coalition of at most k players can profitably deviate from s.
inline bool is_k_equilibrium(const Game& game, const Colouring& s, std::size_t k,
                             const Budget& budget = {}) {
  if (k < 1 || k > game.num_nodes()) {
    throw InputError("coalition bound k=" + std::to_string(k) + " outside 1.." +
                     std::to_string(game.num_nodes()));
  }
  return !find_profitable_deviation(game, s, k, budget).has_value();
}

inline bool is_strong(const Game& game, const Colouring& s, const Budget& budget = {}) {
  return is_k_equilibrium(game, s, game.num_nodes(), budget);
}

}  // namespace coordgame
