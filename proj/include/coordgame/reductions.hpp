#pragma once

// Game constructions: the 3-SAT reduction with its no-equilibrium gadget,
// replacing weighted edges by unit-weight relay nodes, and the translation to
// a 0/1 polymatrix game.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coordgame/equilibrium.hpp"
#include "coordgame/game.hpp"

namespace coordgame {

// ---------------------------------------------------------------------------
// CNF formulas

enum class Truth : std::uint8_t { top, bot };

inline const char* truth_token(Truth t) { return t == Truth::top ? "top" : "bot"; }

struct Literal {
  std::uint32_t var;  // 1-based
  bool negated;

  bool operator==(const Literal&) const = default;
};

// Colour a literal's variable node must show for the literal to be true.
inline Truth is_pos(Literal l) { return l.negated ? Truth::bot : Truth::top; }

using Clause = std::array<Literal, 3>;

struct CnfFormula {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;
};

// DIMACS CNF restricted to clauses of exactly three literals. Lines starting
// with 'c' are comments; a lone '%' ends the clause section.
inline CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula formula;
  bool have_header = false;
  std::uint64_t declared_clauses = 0;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& what) -> InputError {
    return InputError("cnf line " + std::to_string(line_no) + ": " + what);
  };

  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream in(line);
    std::string first;
    if (!(in >> first)) continue;
    if (first[0] == 'c') continue;
    if (first == "%") break;
    if (first == "p") {
      if (have_header) throw fail("second problem line");
      std::string format;
      long long vars = -1;
      long long clauses = -1;
      std::string extra;
      if (!(in >> format >> vars >> clauses) || format != "cnf" || vars < 0 || clauses < 0 || (in >> extra)) {
        throw fail("malformed header, expected 'p cnf <vars> <clauses>'");
      }
      formula.num_vars = static_cast<std::uint32_t>(vars);
      declared_clauses = static_cast<std::uint64_t>(clauses);
      have_header = true;
      continue;
    }
    if (!have_header) throw fail("clause before the 'p cnf' header");

    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      long long value = 0;
      std::size_t used = 0;
      try {
        value = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw fail("bad literal '" + token + "'");
      if (value == 0) {
        if (pending.size() != 3) {
          throw fail("clause has " + std::to_string(pending.size()) + " literals, expected 3");
        }
        formula.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
        continue;
      }
      const long long var = value < 0 ? -value : value;
      if (var > formula.num_vars) {
        throw fail("variable " + std::to_string(var) + " outside 1.." + std::to_string(formula.num_vars));
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back({static_cast<std::uint32_t>(var), value < 0});
    }
  }
  if (!have_header) throw InputError("cnf: missing 'p cnf' header");
  if (!pending.empty()) {
    throw InputError("cnf line " + std::to_string(pending_line) + ": clause not terminated by 0");
  }
  if (formula.clauses.size() != declared_clauses) {
    throw InputError("cnf: header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(formula.clauses.size()));
  }
  return formula;
}

inline std::string emit_dimacs(const CnfFormula& formula) {
  std::ostringstream out;
  out << "p cnf " << formula.num_vars << ' ' << formula.clauses.size() << '\n';
  for (const Clause& clause : formula.clauses) {
    for (const Literal& l : clause) out << (l.negated ? "-" : "") << l.var << ' ';
    out << "0\n";
  }
  return out.str();
}

// assignment[j - 1] is the value of variable j.
inline bool evaluate(const CnfFormula& formula, const std::vector<bool>& assignment) {
  if (assignment.size() != formula.num_vars) throw InputError("assignment size does not match formula");
  return std::all_of(formula.clauses.begin(), formula.clauses.end(), [&](const Clause& clause) {
    return std::any_of(clause.begin(), clause.end(),
                       [&](const Literal& l) { return assignment[l.var - 1] != l.negated; });
  });
}

// ---------------------------------------------------------------------------
// Gadget

struct ReductionColours {
  ColourId top, bot, r, g, b;
};

// Declares the five colours in a fixed order so ids are stable.
inline ReductionColours declare_reduction_colours(GameBuilder& builder) {
  ReductionColours c{};
  c.top = builder.declare_colour("top");
  c.bot = builder.declare_colour("bot");
  c.r = builder.declare_colour("R");
  c.g = builder.declare_colour("G");
  c.b = builder.declare_colour("B");
  return c;
}

// Offsets of the nine gadget nodes relative to its first id.
enum class GadgetRole : std::uint8_t { a, b, c, relay_rg, relay_rb, relay_gb, leaf_r, leaf_b, leaf_g };
constexpr std::size_t kGadgetSize = 9;

struct GadgetNodes {
  ExternalId a, b, c;
};

inline ExternalId gadget_node(ExternalId first, GadgetRole role) {
  return first + static_cast<ExternalId>(role);
}

// Core triangle A -> B -> C -> A with unit edges; each core node also feeds a
// two-colour relay that forwards to the next core node with weight 2, and a
// single-colour leaf gives each core node another weight-2 edge.
inline GadgetNodes add_gadget(GameBuilder& builder, const ReductionColours& col, ExternalId first, Truth x,
                              Truth y, Truth z) {
  auto truth = [&](Truth t) { return t == Truth::top ? col.top : col.bot; };
  auto id = [&](GadgetRole role) { return gadget_node(first, role); };
  auto node = [&](GadgetRole role, std::vector<ColourId> set) {
    builder.add_node(id(role));
    builder.set_colours(id(role), std::move(set));
  };
  using R = GadgetRole;
  node(R::a, {col.r, col.g, truth(x)});
  node(R::b, {col.r, col.b, truth(y)});
  node(R::c, {col.g, col.b, truth(z)});
  node(R::relay_rg, {col.r, col.g});
  node(R::relay_rb, {col.r, col.b});
  node(R::relay_gb, {col.g, col.b});
  node(R::leaf_r, {col.r});
  node(R::leaf_b, {col.b});
  node(R::leaf_g, {col.g});

  builder.add_edge(id(R::a), id(R::b), 1);
  builder.add_edge(id(R::b), id(R::c), 1);
  builder.add_edge(id(R::c), id(R::a), 1);
  builder.add_edge(id(R::a), id(R::relay_rg), 1);
  builder.add_edge(id(R::b), id(R::relay_rb), 1);
  builder.add_edge(id(R::c), id(R::relay_gb), 1);
  builder.add_edge(id(R::relay_rg), id(R::b), 2);
  builder.add_edge(id(R::relay_rb), id(R::c), 2);
  builder.add_edge(id(R::relay_gb), id(R::a), 2);
  builder.add_edge(id(R::leaf_r), id(R::a), 2);
  builder.add_edge(id(R::leaf_b), id(R::b), 2);
  builder.add_edge(id(R::leaf_g), id(R::c), 2);
  return {id(R::a), id(R::b), id(R::c)};
}

struct Gadget {
  Game game;
  GadgetNodes nodes;
};

// Standalone gadget number i (1-based); its nodes get ids 9(i-1)+1 .. 9i.
inline Gadget build_gadget(std::size_t i, Truth x, Truth y, Truth z) {
  if (i < 1) throw InputError("gadget index must be at least 1");
  GameBuilder builder;
  const auto col = declare_reduction_colours(builder);
  const auto nodes = add_gadget(builder, col, kGadgetSize * (i - 1) + 1, x, y, z);
  return {std::move(builder).build(), nodes};
}

// ---------------------------------------------------------------------------
// 3-SAT reduction

enum class RoleKind : std::uint8_t { x, a, b, c };

inline char role_letter(RoleKind kind) { return "XABC"[static_cast<int>(kind)]; }

struct NodeRole {
  ExternalId node;
  RoleKind kind;
  std::size_t index;  // variable j or clause i, 1-based

  bool operator==(const NodeRole&) const = default;
};

struct RoleMap {
  std::vector<NodeRole> roles;

  std::optional<ExternalId> find(RoleKind kind, std::size_t index) const {
    for (const auto& r : roles) {
      if (r.kind == kind && r.index == index) return r.node;
    }
    return std::nullopt;
  }
};

struct ReducedGame {
  Game game;
  RoleMap roles;
};

// Variable node X_j gets id j. Gadget i occupies ids n + 9(i-1) + 1 .. n + 9i
// in GadgetRole order. Each literal adds a weight-4 edge from its variable
// node to the matching core node.
inline ReducedGame sat_to_game(const CnfFormula& formula) {
  GameBuilder builder;
  const auto col = declare_reduction_colours(builder);
  RoleMap roles;
  const std::size_t n = formula.num_vars;
  for (std::size_t j = 1; j <= n; ++j) {
    builder.add_node(j);
    builder.set_colours(j, {col.top, col.bot});
    roles.roles.push_back({j, RoleKind::x, j});
  }
  for (std::size_t i = 1; i <= formula.clauses.size(); ++i) {
    const Clause& clause = formula.clauses[i - 1];
    for (const Literal& l : clause) {
      if (l.var < 1 || l.var > n) throw InputError("literal variable out of range");
    }
    const auto nodes = add_gadget(builder, col, n + kGadgetSize * (i - 1) + 1, is_pos(clause[0]),
                                  is_pos(clause[1]), is_pos(clause[2]));
    roles.roles.push_back({nodes.a, RoleKind::a, i});
    roles.roles.push_back({nodes.b, RoleKind::b, i});
    roles.roles.push_back({nodes.c, RoleKind::c, i});
    builder.add_edge(clause[0].var, nodes.a, 4);
    builder.add_edge(clause[1].var, nodes.b, 4);
    builder.add_edge(clause[2].var, nodes.c, 4);
  }
  return {std::move(builder).build(), std::move(roles)};
}

// Truth assignment read off the variable nodes (result[j - 1] for x_j).
// Only meaningful at a Nash equilibrium, so anything else is refused.
inline std::vector<bool> extract_assignment(const Game& game, const RoleMap& roles, const Colouring& s) {
  validate_colouring(game, s);
  if (!is_nash(game, s)) throw InputError("colouring is not a Nash equilibrium; no assignment is implied");
  std::size_t num_vars = 0;
  for (const auto& r : roles.roles) {
    if (r.kind == RoleKind::x) num_vars = std::max(num_vars, r.index);
  }
  std::vector<bool> assignment(num_vars, false);
  for (const auto& r : roles.roles) {
    if (r.kind != RoleKind::x) continue;
    const auto v = game.node_of(r.node);
    if (!v) throw InputError("role map names missing node " + std::to_string(r.node));
    const std::string& token = game.colours().token(s[*v]);
    if (token != "top" && token != "bot") {
      throw InputError("variable node " + std::to_string(r.node) + " has colour " + token);
    }
    assignment[r.index - 1] = token == "top";
  }
  return assignment;
}

// ---------------------------------------------------------------------------
// Weight expansion

// Original nodes keep their dense ids 0..num_original-1; replica nodes follow.
// origin[v] is v itself for originals and the copied source for replicas.
struct ExpandedGame {
  Game game;
  std::vector<NodeId> origin;
  std::size_t num_original = 0;
};

// Each edge i -> j of weight w >= 2 becomes w replica nodes with colour set
// A(i) and unit edges i -> replica -> j. Unit edges pass through and
// weight-0 edges are dropped. Replica ids continue after the largest
// external id, allocated in (src, dst) edge order.
inline ExpandedGame expand_weights(const Game& game) {
  GameBuilder builder;
  for (std::size_t c = 0; c < game.colours().size(); ++c) {
    builder.declare_colour(game.colours().token(static_cast<ColourId>(c)));
  }
  std::vector<NodeId> origin;
  for (NodeId v = 0; v < game.num_nodes(); ++v) {
    const ExternalId id = game.external_id(v);
    builder.add_node(id);
    auto set = game.colour_set(v);
    builder.set_colours(id, std::vector<ColourId>(set.begin(), set.end()));
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (game.bonuses(v)[k] != 0) builder.set_bonus(id, set[k], game.bonuses(v)[k]);
    }
    origin.push_back(v);
  }
  ExternalId next = game.external_id(static_cast<NodeId>(game.num_nodes() - 1)) + 1;
  for (const Edge& e : game.edges()) {
    const ExternalId src = game.external_id(e.src);
    const ExternalId dst = game.external_id(e.dst);
    if (e.weight == 0) continue;
    if (e.weight == 1) {
      builder.add_edge(src, dst, 1);
      continue;
    }
    auto set = game.colour_set(e.src);
    for (Weight t = 0; t < e.weight; ++t) {
      builder.add_node(next);
      builder.set_colours(next, std::vector<ColourId>(set.begin(), set.end()));
      builder.add_edge(src, next, 1);
      builder.add_edge(next, dst, 1);
      origin.push_back(e.src);
      ++next;
    }
  }
  return {std::move(builder).build(), std::move(origin), game.num_nodes()};
}

// Every replica copies the colour of the node it stands in for.
inline Colouring canonical_extension(const ExpandedGame& expanded, const Colouring& s) {
  if (s.size() != expanded.num_original) throw InputError("colouring size does not match original game");
  Colouring out(expanded.origin.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = s[expanded.origin[v]];
  return out;
}

inline Colouring project(const ExpandedGame& expanded, const Colouring& s) {
  if (s.size() != expanded.origin.size()) throw InputError("colouring size does not match expanded game");
  return Colouring(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(expanded.num_original));
}

// ---------------------------------------------------------------------------
// Polymatrix translation

// Partial payoffs a^{ij}(c, d) stored sparsely: only entries equal to 1 are
// kept, grouped by player i.
struct PolymatrixGame {
  struct Entry {
    NodeId j;
    ColourId own;
    ColourId other;
  };

  std::size_t num_players = 0;
  std::vector<std::vector<ColourId>> strategies;
  std::vector<std::size_t> offsets{0};
  std::vector<Entry> entries;

  std::span<const Entry> entries_of(NodeId i) const {
    return {entries.data() + offsets[i], entries.data() + offsets[i + 1]};
  }

  int partial(NodeId i, NodeId j, ColourId own, ColourId other) const {
    for (const Entry& e : entries_of(i)) {
      if (e.j == j && e.own == own && e.other == other) return 1;
    }
    return 0;
  }

  Payoff payoff(const Colouring& s, NodeId i) const {
    Payoff total = 0;
    for (const Entry& e : entries_of(i)) total += s[i] == e.own && s[e.j] == e.other;
    return total;
  }
};

// a^{ij}(c, c) = 1 for every in-neighbour j of i and every colour c both can
// pick; all other entries are 0. Strategy sets are the colour sets.
inline PolymatrixGame to_polymatrix(const Game& game) {
  if (!game.has_unit_weights()) throw StructureError("to_polymatrix: edge weights must all be 1");
  if (!game.has_zero_bonuses()) throw StructureError("to_polymatrix: bonuses must all be 0");
  PolymatrixGame pm;
  pm.num_players = game.num_nodes();
  for (NodeId i = 0; i < game.num_nodes(); ++i) {
    auto set = game.colour_set(i);
    pm.strategies.emplace_back(set.begin(), set.end());
    for (const Arc& arc : game.in_arcs(i)) {
      for (ColourId c : set) {
        if (game.offers(arc.node, c)) pm.entries.push_back({arc.node, c, c});
      }
    }
    pm.offsets.push_back(pm.entries.size());
  }
  return pm;
}

}  // namespace coordgame
