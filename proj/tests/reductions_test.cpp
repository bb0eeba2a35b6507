#include <gtest/gtest.h>

#include "support/generators.hpp"

namespace coordgame {
namespace {

using testing::load_game;

TEST(Dimacs, SingleClause) {
  const auto f = parse_dimacs("c example\np cnf 3 1\n1 -2 3 0\n");
  EXPECT_EQ(f.num_vars, 3u);
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_EQ(f.clauses[0], (Clause{Literal{1, false}, Literal{2, true}, Literal{3, false}}));
}

TEST(Dimacs, TwoClauseFile) {
  const auto f = parse_dimacs(read_file(testing::data_path("two_clause.cnf")));
  EXPECT_EQ(f.num_vars, 5u);
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[1], (Clause{Literal{3, true}, Literal{4, false}, Literal{5, true}}));
}

TEST(Dimacs, ClausesMaySpanLines) {
  const auto f = parse_dimacs("p cnf 2 2\n1 2\n-1 0 2 -2\n1 0\n");
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[1], (Clause{Literal{2, false}, Literal{2, true}, Literal{1, false}}));
  EXPECT_EQ(parse_dimacs(emit_dimacs(f)).clauses, f.clauses);
}

TEST(Dimacs, Errors) {
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 -1 2 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf x 1\n1 2 1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 2 1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("1 2 1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 2 1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 1\n"), InputError);
  EXPECT_THROW(parse_dimacs(""), InputError);
}

TEST(Evaluate, ClauseSemantics) {
  const auto f = parse_dimacs("p cnf 2 1\n1 -2 1 0\n");
  EXPECT_TRUE(evaluate(f, {true, true}));
  EXPECT_TRUE(evaluate(f, {false, false}));
  EXPECT_FALSE(evaluate(f, {false, true}));
}

TEST(GadgetShape, NineNodesTwelveEdges) {
  const auto gadget = build_gadget(2, Truth::top, Truth::bot, Truth::top);
  const Game& g = gadget.game;
  EXPECT_EQ(g.num_nodes(), 9u);
  EXPECT_EQ(g.num_edges(), 12u);
  EXPECT_EQ(gadget.nodes.a, 10u);
  auto tokens = [&](ExternalId id) {
    std::vector<std::string> out;
    for (ColourId c : g.colour_set(*g.node_of(id))) out.push_back(g.colours().token(c));
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(tokens(gadget.nodes.a), (std::vector<std::string>{"G", "R", "top"}));
  EXPECT_EQ(tokens(gadget.nodes.b), (std::vector<std::string>{"B", "R", "bot"}));
  EXPECT_EQ(tokens(gadget.nodes.c), (std::vector<std::string>{"B", "G", "top"}));
  Weight total = 0;
  for (const Edge& e : g.edges()) total += e.weight;
  EXPECT_EQ(total, 3u * 1 + 3u * 1 + 3u * 2 + 3u * 2);
  // Each core node: one unit edge from its core predecessor and two weight-2
  // edges (relay and leaf).
  for (ExternalId core : {gadget.nodes.a, gadget.nodes.b, gadget.nodes.c}) {
    std::vector<Weight> in;
    for (const Arc& arc : g.in_arcs(*g.node_of(core))) in.push_back(arc.weight);
    std::sort(in.begin(), in.end());
    EXPECT_EQ(in, (std::vector<Weight>{1, 2, 2}));
  }
}

TEST(SatToGame, TwoClauseExample) {
  const auto f = parse_dimacs(read_file(testing::data_path("two_clause.cnf")));
  const auto reduced = sat_to_game(f);
  EXPECT_EQ(reduced.game.num_nodes(), 5u + 18u);
  EXPECT_EQ(reduced.game.num_edges(), 2u * 12u + 6u);
  // Second clause is (-x3 or x4 or -x5).
  const auto a2 = *reduced.roles.find(RoleKind::a, 2);
  const auto c2 = *reduced.roles.find(RoleKind::c, 2);
  EXPECT_EQ(a2, 5u + 9u + 1u);
  const Game& g = reduced.game;
  auto weight_from = [&](ExternalId src, ExternalId dst) {
    for (const Arc& arc : g.out_arcs(*g.node_of(src))) {
      if (g.external_id(arc.node) == dst) return arc.weight;
    }
    return Weight{0};
  };
  EXPECT_EQ(weight_from(3, a2), 4u);
  EXPECT_EQ(weight_from(5, c2), 4u);
  EXPECT_TRUE(g.offers(*g.node_of(a2), *g.colours().find("bot")));
  EXPECT_FALSE(g.offers(*g.node_of(a2), *g.colours().find("top")));
}

TEST(SatToGame, UnsatisfiableFormulaHasNoNash) {
  const auto f = parse_dimacs(read_file(testing::data_path("unsat.cnf")));
  EXPECT_FALSE(testing::brute_force_sat(f));
  EXPECT_TRUE(find_all(sat_to_game(f).game, {EquilibriumKind::nash}).empty());
}

TEST(SatToGame, SatisfiableClauseHasNashThatSatisfiesIt) {
  const auto f = parse_dimacs("p cnf 3 1\n1 -2 3 0\n");
  const auto reduced = sat_to_game(f);
  const auto nash = find_all(reduced.game, {EquilibriumKind::nash});
  ASSERT_FALSE(nash.empty());
  for (const auto& s : nash) EXPECT_TRUE(evaluate(f, extract_assignment(reduced.game, reduced.roles, s)));
}

TEST(Extract, SingleVariableClause) {
  const auto f = parse_dimacs("p cnf 1 1\n1 1 1 0\n");
  const auto reduced = sat_to_game(f);
  const auto nash = find_all(reduced.game, {EquilibriumKind::nash});
  ASSERT_FALSE(nash.empty());
  for (const auto& s : nash) {
    EXPECT_EQ(reduced.game.colours().token(s[*reduced.game.node_of(1)]), "top");
    EXPECT_EQ(extract_assignment(reduced.game, reduced.roles, s), std::vector<bool>{true});
  }
}

TEST(Extract, RefusesNonEquilibrium) {
  const auto reduced = sat_to_game(parse_dimacs("p cnf 1 1\n1 1 1 0\n"));
  // x1 false leaves the only clause unsatisfied.
  Colouring s = lowest_colouring(reduced.game);
  s[*reduced.game.node_of(1)] = *reduced.game.colours().find("bot");
  ASSERT_FALSE(is_nash(reduced.game, s));
  EXPECT_THROW(extract_assignment(reduced.game, reduced.roles, s), InputError);
}

TEST(ExpandWeights, SingleHeavyEdge) {
  const Game g = parse_game("node 1\nnode 2\nset 1 a b\nset 2 a\nedge 1 2 3\n");
  const auto ex = expand_weights(g);
  EXPECT_EQ(ex.game.num_nodes(), 5u);
  EXPECT_EQ(ex.game.num_edges(), 6u);
  EXPECT_TRUE(ex.game.has_unit_weights());
  for (NodeId v = 2; v < 5; ++v) {
    EXPECT_EQ(ex.origin[v], 0u);
    EXPECT_EQ(ex.game.external_id(v), v + 1);
    EXPECT_EQ(ex.game.colour_set(v).size(), 2u);
  }
}

TEST(ExpandWeights, UnitGameUnchanged) {
  const Game g = load_game("nine_node.game");
  const auto ex = expand_weights(g);
  EXPECT_EQ(emit_game(ex.game), emit_game(g));
  for (NodeId v = 0; v < g.num_nodes(); ++v) EXPECT_EQ(ex.origin[v], v);
}

TEST(ExpandWeights, ZeroWeightEdgesDropped) {
  const Game g = parse_game("node 1\nnode 2\nset 1 a\nset 2 a\nedge 1 2 0\n");
  EXPECT_EQ(expand_weights(g).game.num_edges(), 0u);
}

TEST(ExpandWeights, NashCorrespondsUnderCanonicalExtension) {
  testing::Rng rng(71);
  for (int round = 0; round < 60; ++round) {
    const Game g = testing::random_game(rng, testing::uniform(rng, 1, 4), {2, 1, 0}, 0.4, 3);
    const auto ex = expand_weights(g);
    for (const auto& s : enumerate_colourings(g)) {
      const auto t = canonical_extension(ex, s);
      EXPECT_EQ(is_nash(g, s), is_nash(ex.game, t));
      for (NodeId v = 0; v < g.num_nodes(); ++v) EXPECT_EQ(payoff(g, s, v), payoff(ex.game, t, v));
      EXPECT_EQ(project(ex, t), s);
    }
  }
}

TEST(Polymatrix, TwoCycleEntries) {
  const Game g = load_game("two_cycle.game");
  const auto pm = to_polymatrix(g);
  const ColourId a = *g.colours().find("a");
  const ColourId b = *g.colours().find("b");
  const ColourId c = *g.colours().find("c");
  EXPECT_EQ(pm.partial(0, 1, c, c), 1);
  EXPECT_EQ(pm.partial(1, 0, c, c), 1);
  EXPECT_EQ(pm.partial(0, 1, a, b), 0);
  EXPECT_EQ(pm.partial(0, 1, a, c), 0);
  EXPECT_EQ(pm.partial(1, 0, b, a), 0);
  EXPECT_EQ(pm.entries.size(), 2u);
}

TEST(Polymatrix, NoEdgesNoEntries) {
  const auto pm = to_polymatrix(parse_game("node 1\nnode 2\nset 1 a b\nset 2 a\n"));
  EXPECT_TRUE(pm.entries.empty());
  EXPECT_EQ(pm.payoff({ColourId{0}, ColourId{0}}, 0), 0u);
}

TEST(Polymatrix, RefusesWeightsAndBonuses) {
  EXPECT_THROW(to_polymatrix(parse_game("node 1\nnode 2\nset 1 a\nset 2 a\nedge 1 2 2\n")), StructureError);
  EXPECT_THROW(to_polymatrix(parse_game("node 1\nset 1 a b\nbonus 1 a 1\n")), StructureError);
}

TEST(Polymatrix, PayoffsMatchAtEveryColouring) {
  testing::Rng rng(72);
  for (int round = 0; round < 100; ++round) {
    const Game g = testing::random_game(rng, testing::uniform(rng, 1, 6), {3, 0, 0}, 0.4, 1);
    const auto pm = to_polymatrix(g);
    for_each_colouring(g, [&](const Colouring& s) {
      for (NodeId v = 0; v < g.num_nodes(); ++v) EXPECT_EQ(pm.payoff(s, v), payoff(g, s, v));
      return false;
    });
  }
}

}  // namespace
}  // namespace coordgame
