#pragma once

// Coordination games on weighted directed graphs: the game model, payoffs and
// unilateral deviations.
//
// A node's payoff is the total weight of its in-edges whose source picked the
// same colour, plus the node's bonus for that colour.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coordgame/error.hpp"

namespace coordgame {

using NodeId = std::uint32_t;
using ExternalId = std::uint64_t;
using Weight = std::uint64_t;
using Payoff = std::uint64_t;

enum class ColourId : std::uint32_t {};

constexpr std::uint32_t index_of(ColourId c) { return static_cast<std::uint32_t>(c); }

// One colour per node, indexed by dense node id.
using Colouring = std::vector<ColourId>;

inline bool is_valid_colour_token(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
           (ch >= '0' && ch <= '9') || ch == '_';
  });
}

// Interns colour tokens to dense ids in first-declaration order.
class ColourTable {
 public:
  ColourId intern(std::string_view token) {
    if (auto found = find(token)) return *found;
    if (!is_valid_colour_token(token)) {
      throw InputError("invalid colour token '" + std::string(token) + "'");
    }
    const auto id = static_cast<ColourId>(tokens_.size());
    tokens_.emplace_back(token);
    ids_.emplace(tokens_.back(), id);
    return id;
  }

  std::optional<ColourId> find(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(ColourId c) const { return tokens_.at(index_of(c)); }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, ColourId> ids_;
};

struct Edge {
  NodeId src;
  NodeId dst;
  Weight weight;
};

// Adjacency entry: the node at the other end and the edge weight.
struct Arc {
  NodeId node;
  Weight weight;
};

class GameBuilder;

// Immutable after construction. Dense node ids are assigned in ascending
// external-id order; colour sets are sorted by colour id.
class Game {
 public:
  std::size_t num_nodes() const { return external_ids_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const ColourTable& colours() const { return colours_; }

  std::span<const ColourId> colour_set(NodeId i) const {
    return {set_colours_.data() + set_offsets_[i], set_colours_.data() + set_offsets_[i + 1]};
  }
  // Parallel to colour_set(i).
  std::span<const Weight> bonuses(NodeId i) const {
    return {set_bonuses_.data() + set_offsets_[i], set_bonuses_.data() + set_offsets_[i + 1]};
  }

  // Position of c inside colour_set(i), if offered.
  std::optional<std::size_t> colour_slot(NodeId i, ColourId c) const {
    auto set = colour_set(i);
    auto it = std::lower_bound(set.begin(), set.end(), c);
    if (it == set.end() || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - set.begin());
  }
  bool offers(NodeId i, ColourId c) const { return colour_slot(i, c).has_value(); }

  // Bonus of node i for colour c; zero when c is not offered.
  Weight bonus(NodeId i, ColourId c) const {
    auto slot = colour_slot(i, c);
    return slot ? bonuses(i)[*slot] : 0;
  }

  std::span<const Arc> in_arcs(NodeId i) const {
    return {in_arcs_.data() + in_offsets_[i], in_arcs_.data() + in_offsets_[i + 1]};
  }
  std::span<const Arc> out_arcs(NodeId i) const {
    return {out_arcs_.data() + out_offsets_[i], out_arcs_.data() + out_offsets_[i + 1]};
  }

  // Sorted by (src, dst); parallel edges already merged.
  std::span<const Edge> edges() const { return edges_; }

  ExternalId external_id(NodeId i) const { return external_ids_.at(i); }
  std::optional<NodeId> node_of(ExternalId id) const {
    auto it = std::lower_bound(external_ids_.begin(), external_ids_.end(), id);
    if (it == external_ids_.end() || *it != id) return std::nullopt;
    return static_cast<NodeId>(it - external_ids_.begin());
  }

  bool has_unit_weights() const {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight == 1; });
  }
  bool has_zero_bonuses() const {
    return std::all_of(set_bonuses_.begin(), set_bonuses_.end(), [](Weight b) { return b == 0; });
  }

 private:
  friend class GameBuilder;
  Game() = default;

  ColourTable colours_;
  std::vector<ExternalId> external_ids_;
  std::vector<std::size_t> set_offsets_;
  std::vector<ColourId> set_colours_;
  std::vector<Weight> set_bonuses_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<Arc> in_arcs_;
  std::vector<std::size_t> out_offsets_;
  std::vector<Arc> out_arcs_;
};

// Accumulates nodes, colour sets, bonuses and edges keyed by external id, then
// validates everything in build().
class GameBuilder {
 public:
  ColourId declare_colour(std::string_view token) { return colours_.intern(token); }
  const ColourTable& colours() const { return colours_; }

  void add_node(ExternalId id) {
    if (!index_.emplace(id, nodes_.size()).second) {
      throw InputError("duplicate node " + std::to_string(id));
    }
    nodes_.push_back({id, {}, {}, false});
  }

  bool has_node(ExternalId id) const { return index_.contains(id); }

  void set_colours(ExternalId id, std::vector<ColourId> colours) {
    auto& node = lookup(id);
    if (node.has_set) throw InputError("colour set of node " + std::to_string(id) + " given twice");
    if (colours.empty()) throw InputError("empty colour set for node " + std::to_string(id));
    std::sort(colours.begin(), colours.end());
    if (std::adjacent_find(colours.begin(), colours.end()) != colours.end()) {
      throw InputError("repeated colour in set of node " + std::to_string(id));
    }
    for (ColourId c : colours) {
      if (index_of(c) >= colours_.size()) throw InputError("undeclared colour id");
    }
    node.colours = std::move(colours);
    node.has_set = true;
  }

  void set_colours(ExternalId id, std::span<const std::string_view> tokens) {
    std::vector<ColourId> ids;
    ids.reserve(tokens.size());
    for (auto token : tokens) ids.push_back(colours_.intern(token));
    set_colours(id, std::move(ids));
  }

  void set_bonus(ExternalId id, ColourId c, Weight value) {
    auto& node = lookup(id);
    if (!node.has_set) {
      throw InputError("bonus for node " + std::to_string(id) + " before its colour set");
    }
    if (!std::binary_search(node.colours.begin(), node.colours.end(), c)) {
      throw InputError("bonus colour not in the colour set of node " + std::to_string(id));
    }
    for (auto& [colour, bonus] : node.bonuses) {
      if (colour == c) throw InputError("duplicate bonus for node " + std::to_string(id));
    }
    node.bonuses.emplace_back(c, value);
  }

  // Duplicate (src, dst) pairs are merged by summing weights.
  void add_edge(ExternalId src, ExternalId dst, Weight weight = 1) {
    if (src == dst) throw InputError("self loop on node " + std::to_string(src));
    lookup(src);
    lookup(dst);
    raw_edges_.push_back({src, dst, weight});
  }

  Game build() && {
    Game game;
    const std::size_t n = nodes_.size();
    if (n == 0) throw InputError("game has no nodes");

    std::vector<std::size_t> by_external(n);
    for (std::size_t k = 0; k < n; ++k) by_external[k] = k;
    std::sort(by_external.begin(), by_external.end(),
              [&](std::size_t a, std::size_t b) { return nodes_[a].id < nodes_[b].id; });
    std::vector<NodeId> dense(n);
    for (std::size_t k = 0; k < n; ++k) dense[by_external[k]] = static_cast<NodeId>(k);

    game.colours_ = std::move(colours_);
    game.external_ids_.reserve(n);
    game.set_offsets_.reserve(n + 1);
    game.set_offsets_.push_back(0);
    for (std::size_t k = 0; k < n; ++k) {
      auto& node = nodes_[by_external[k]];
      if (!node.has_set) throw InputError("node " + std::to_string(node.id) + " has no colour set");
      game.external_ids_.push_back(node.id);
      for (ColourId c : node.colours) {
        game.set_colours_.push_back(c);
        Weight b = 0;
        for (auto& [colour, bonus] : node.bonuses) {
          if (colour == c) b = bonus;
        }
        game.set_bonuses_.push_back(b);
      }
      game.set_offsets_.push_back(game.set_colours_.size());
    }

    std::vector<Edge> edges;
    edges.reserve(raw_edges_.size());
    for (const auto& e : raw_edges_) {
      edges.push_back({dense[index_.at(e.src)], dense[index_.at(e.dst)], e.weight});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    for (const auto& e : edges) {
      if (!game.edges_.empty() && game.edges_.back().src == e.src && game.edges_.back().dst == e.dst) {
        game.edges_.back().weight += e.weight;
      } else {
        game.edges_.push_back(e);
      }
    }

    game.in_offsets_.assign(n + 1, 0);
    game.out_offsets_.assign(n + 1, 0);
    for (const auto& e : game.edges_) {
      ++game.out_offsets_[e.src + 1];
      ++game.in_offsets_[e.dst + 1];
    }
    for (std::size_t k = 0; k < n; ++k) {
      game.out_offsets_[k + 1] += game.out_offsets_[k];
      game.in_offsets_[k + 1] += game.in_offsets_[k];
    }
    game.in_arcs_.resize(game.edges_.size());
    game.out_arcs_.resize(game.edges_.size());
    auto in_fill = game.in_offsets_;
    auto out_fill = game.out_offsets_;
    for (const auto& e : game.edges_) {
      game.out_arcs_[out_fill[e.src]++] = {e.dst, e.weight};
      game.in_arcs_[in_fill[e.dst]++] = {e.src, e.weight};
    }

    *this = GameBuilder();
    return game;
  }

 private:
  struct PendingNode {
    ExternalId id;
    std::vector<ColourId> colours;
    std::vector<std::pair<ColourId, Weight>> bonuses;
    bool has_set;
  };
  struct PendingEdge {
    ExternalId src;
    ExternalId dst;
    Weight weight;
  };

  PendingNode& lookup(ExternalId id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("undeclared node " + std::to_string(id));
    return nodes_[it->second];
  }

  ColourTable colours_;
  std::vector<PendingNode> nodes_;
  std::unordered_map<ExternalId, std::size_t> index_;
  std::vector<PendingEdge> raw_edges_;
};

// ---------------------------------------------------------------------------
// Payoffs

namespace detail {

// Payoff of node i if it picks colour c while everyone else keeps s.
inline Payoff payoff_as(const Game& game, const Colouring& s, NodeId i, ColourId c) {
  Payoff total = game.bonus(i, c);
  for (const Arc& arc : game.in_arcs(i)) {
    if (s[arc.node] == c) total += arc.weight;
  }
  return total;
}

inline Payoff payoff_unchecked(const Game& game, const Colouring& s, NodeId i) {
  return payoff_as(game, s, i, s[i]);
}

// Payoff of every colour in i's set against s_{-i}, parallel to colour_set(i).
inline std::vector<Payoff> colour_payoffs(const Game& game, const Colouring& s, NodeId i) {
  auto set = game.colour_set(i);
  auto bonus = game.bonuses(i);
  std::vector<Payoff> result(bonus.begin(), bonus.end());
  for (const Arc& arc : game.in_arcs(i)) {
    auto it = std::lower_bound(set.begin(), set.end(), s[arc.node]);
    if (it != set.end() && *it == s[arc.node]) result[it - set.begin()] += arc.weight;
  }
  return result;
}

}  // namespace detail

inline void validate_node(const Game& game, NodeId i) {
  if (i >= game.num_nodes()) throw InputError("node index " + std::to_string(i) + " out of range");
}

inline void validate_colouring(const Game& game, const Colouring& s) {
  if (s.size() != game.num_nodes()) {
    throw InputError("colouring has " + std::to_string(s.size()) + " entries, game has " +
                     std::to_string(game.num_nodes()) + " nodes");
  }
  for (NodeId i = 0; i < s.size(); ++i) {
    if (!game.offers(i, s[i])) {
      throw InputError("node " + std::to_string(game.external_id(i)) +
                       " is coloured outside its colour set");
    }
  }
}

inline Payoff payoff(const Game& game, const Colouring& s, NodeId i) {
  validate_node(game, i);
  if (s.size() != game.num_nodes() || !game.offers(i, s[i])) {
    throw InputError("invalid colouring for payoff of node " + std::to_string(game.external_id(i)));
  }
  return detail::payoff_unchecked(game, s, i);
}

inline std::vector<Payoff> payoffs(const Game& game, const Colouring& s) {
  validate_colouring(game, s);
  std::vector<Payoff> result(game.num_nodes());
  for (NodeId i = 0; i < game.num_nodes(); ++i) result[i] = detail::payoff_unchecked(game, s, i);
  return result;
}

inline Payoff social_welfare(const Game& game, const Colouring& s) {
  Payoff total = 0;
  for (Payoff p : payoffs(game, s)) total += p;
  return total;
}

// All payoff-maximising colours of node i against s_{-i}, ascending colour id.
inline std::vector<ColourId> best_responses(const Game& game, const Colouring& s, NodeId i) {
  validate_node(game, i);
  validate_colouring(game, s);
  auto values = detail::colour_payoffs(game, s, i);
  const Payoff best = *std::max_element(values.begin(), values.end());
  std::vector<ColourId> result;
  auto set = game.colour_set(i);
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (values[k] == best) result.push_back(set[k]);
  }
  return result;
}

// A colouring with each node on the lowest-id colour of its set.
inline Colouring lowest_colouring(const Game& game) {
  Colouring s(game.num_nodes());
  for (NodeId i = 0; i < game.num_nodes(); ++i) s[i] = game.colour_set(i).front();
  return s;
}

// ---------------------------------------------------------------------------
// Deviations

struct MemberChange {
  NodeId node;
  ColourId from;
  ColourId to;
  std::int64_t delta;  // payoff(after) - payoff(before)
};

// A deviation of coalition K = {i : before[i] != after[i]}, stored restricted
// to K. Members are in ascending node order.
struct DeviationStep {
  std::vector<MemberChange> members;

  std::vector<NodeId> coalition() const {
    std::vector<NodeId> k;
    k.reserve(members.size());
    for (const auto& m : members) k.push_back(m.node);
    return k;
  }
  bool profitable() const {
    return !members.empty() &&
           std::all_of(members.begin(), members.end(), [](const MemberChange& m) { return m.delta > 0; });
  }
};

inline DeviationStep make_step(const Game& game, const Colouring& before, const Colouring& after) {
  validate_colouring(game, before);
  validate_colouring(game, after);
  DeviationStep step;
  for (NodeId i = 0; i < before.size(); ++i) {
    if (before[i] == after[i]) continue;
    const auto gain = static_cast<std::int64_t>(detail::payoff_unchecked(game, after, i)) -
                      static_cast<std::int64_t>(detail::payoff_unchecked(game, before, i));
    step.members.push_back({i, before[i], after[i], gain});
  }
  return step;
}

inline void apply_step(const DeviationStep& step, Colouring& s) {
  for (const auto& m : step.members) s[m.node] = m.to;
}

inline void revert_step(const DeviationStep& step, Colouring& s) {
  for (const auto& m : step.members) s[m.node] = m.from;
}

struct DeviationCheck {
  bool profitable = false;
  std::vector<NodeId> coalition;
};

// Identical colourings are not a deviation: reports false with an empty
// coalition.
inline DeviationCheck is_profitable_deviation(const Game& game, const Colouring& before,
                                              const Colouring& after) {
  const auto step = make_step(game, before, after);
  return {step.profitable(), step.coalition()};
}

}  // namespace coordgame
