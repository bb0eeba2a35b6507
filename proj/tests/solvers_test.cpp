#include <gtest/gtest.h>

#include <set>

#include "support/generators.hpp"

namespace coordgame {
namespace {

using testing::colouring_from_tokens;
using testing::load_game;

void expect_valid_path(const Game& g, const Path& path) {
  Colouring s = path.start;
  for (const auto& step : path.steps) {
    Colouring next = s;
    apply_step(step, next);
    const auto recomputed = make_step(g, s, next);
    ASSERT_EQ(recomputed.coalition(), step.coalition());
    ASSERT_TRUE(recomputed.profitable());
    for (std::size_t k = 0; k < step.members.size(); ++k) {
      EXPECT_EQ(recomputed.members[k].delta, step.members[k].delta);
    }
    s = next;
  }
  EXPECT_EQ(s, path.last);
}

// Reachability-based SCCs as an independent reference.
std::set<std::set<NodeId>> reference_sccs(const Game& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (NodeId v = 0; v < n; ++v) {
    reach[v][v] = 1;
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (const Arc& a : g.out_arcs(u)) {
        if (!reach[v][a.node]) {
          reach[v][a.node] = 1;
          stack.push_back(a.node);
        }
      }
    }
  }
  std::set<std::set<NodeId>> sccs;
  for (NodeId v = 0; v < n; ++v) {
    std::set<NodeId> comp;
    for (NodeId u = 0; u < n; ++u) {
      if (reach[v][u] && reach[u][v]) comp.insert(u);
    }
    sccs.insert(comp);
  }
  return sccs;
}

TEST(Classify, NineNodeExample) {
  const auto r = classify(load_game("nine_node.game"));
  EXPECT_FALSE(r.is_dag);
  EXPECT_FALSE(r.is_single_simple_cycle);
  // Nodes 4, 5 and 6 close further cycles through 1, 2 and 3, so the only
  // non-trivial component is {1..6} and node 2 has two in-neighbours in it.
  EXPECT_FALSE(r.all_sccs_simple_cycles);
  EXPECT_FALSE(r.uses_at_most_two_colours);
  EXPECT_FALSE(r.is_colour_complete);
  const auto sccs = reference_sccs(load_game("nine_node.game"));
  EXPECT_TRUE(sccs.count({0, 1, 2, 3, 4, 5}));
}

TEST(Classify, CompleteGraphIsColourComplete) {
  const Game g = parse_game(
      "node 1\nnode 2\nnode 3\nset 1 a b\nset 2 a b\nset 3 a b\n"
      "edge 1 2\nedge 2 1\nedge 1 3\nedge 3 1\nedge 2 3\nedge 3 2\n");
  const auto r = classify(g);
  EXPECT_TRUE(r.is_colour_complete);
  EXPECT_FALSE(r.is_dag);
  EXPECT_FALSE(r.all_sccs_simple_cycles);
  EXPECT_TRUE(r.uses_at_most_two_colours);
}

TEST(Classify, SingleNode) {
  const auto r = classify(parse_game("node 1\nset 1 a\n"));
  EXPECT_TRUE(r.is_dag);
  EXPECT_FALSE(r.is_single_simple_cycle);
  EXPECT_TRUE(r.all_sccs_simple_cycles);
  EXPECT_TRUE(r.uses_at_most_two_colours);
  EXPECT_TRUE(r.is_colour_complete);
}

TEST(Classify, CyclesAndMissingReverseEdges) {
  const auto two = classify(load_game("two_cycle.game"));
  EXPECT_TRUE(two.is_single_simple_cycle);
  EXPECT_TRUE(two.is_colour_complete);
  const auto three = classify(load_game("rotation.game"));
  EXPECT_TRUE(three.is_single_simple_cycle);
  EXPECT_FALSE(three.is_colour_complete);
}

TEST(Scc, MatchesReachabilityAndLabelsEdgesForward) {
  testing::Rng rng(41);
  for (int round = 0; round < 200; ++round) {
    const Game g = testing::random_game(rng, testing::uniform(rng, 1, 10), {2, 0, 0}, 0.18, 1);
    const auto dec = decompose_scc(g);
    std::set<std::set<NodeId>> got;
    for (const auto& c : dec.components) got.insert(std::set<NodeId>(c.begin(), c.end()));
    EXPECT_EQ(got, reference_sccs(g));
    for (const Edge& e : g.edges()) EXPECT_LE(dec.node_label[e.src], dec.node_label[e.dst]);
    for (std::size_t c = 0; c < dec.components.size(); ++c) {
      const auto& members = dec.components[c];
      bool simple = members.size() >= 2;
      for (NodeId v : members) {
        std::size_t in = 0, out = 0;
        for (const Arc& a : g.in_arcs(v)) in += dec.node_label[a.node] == dec.label(c);
        for (const Arc& a : g.out_arcs(v)) out += dec.node_label[a.node] == dec.label(c);
        simple = simple && in == 1 && out == 1;
      }
      const auto expected = members.size() == 1 ? ComponentKind::singleton
                            : simple            ? ComponentKind::simple_cycle
                                                : ComponentKind::other;
      EXPECT_EQ(dec.kinds[c], expected);
    }
  }
}

TEST(Scc, DeepChainDoesNotRecurse) {
  GameBuilder b;
  const std::size_t n = 200000;
  for (ExternalId id = 1; id <= n; ++id) {
    b.add_node(id);
    b.set_colours(id, std::vector<ColourId>{b.declare_colour("a")});
    if (id > 1) b.add_edge(id - 1, id);
  }
  b.add_edge(n, 1);
  const auto dec = decompose_scc(std::move(b).build());
  ASSERT_EQ(dec.components.size(), 1u);
  EXPECT_EQ(dec.kinds[0], ComponentKind::simple_cycle);
}

TEST(SolveDag, ChainCopiesSingleColour) {
  const Game g = parse_game("node 1\nnode 2\nset 1 a\nset 2 a b\nedge 1 2\n");
  EXPECT_EQ(solve_dag(g), colouring_from_tokens(g, {"a", "a"}));
}

TEST(SolveDag, IsolatedNodesPickLargestBonus) {
  const Game g = parse_game(
      "colours a b c\nnode 1\nnode 2\nset 1 a b c\nset 2 a b c\n"
      "bonus 1 c 2\nbonus 1 b 2\nbonus 2 a 1\n");
  EXPECT_EQ(solve_dag(g), colouring_from_tokens(g, {"b", "a"}));
}

TEST(SolveDag, RejectsCycles) { EXPECT_THROW(solve_dag(load_game("two_cycle.game")), StructureError); }

TEST(SolveDag, RandomOutputsAreStrong) {
  testing::Rng rng(42);
  for (int round = 0; round < 150; ++round) {
    const Game g = testing::random_dag(rng, testing::uniform(rng, 1, 7), {3, 2, 0}, 0.4, 3);
    EXPECT_TRUE(is_strong(g, solve_dag(g)));
  }
}

TEST(SolveCycle, TwoCycleAlreadyNash) {
  const Game g = load_game("two_cycle.game");
  const auto start = colouring_from_tokens(g, {"a", "b"});
  const auto result = solve_cycle(g, start);
  EXPECT_EQ(result.colouring, start);
  EXPECT_TRUE(result.path.steps.empty());
}

TEST(SolveCycle, ThreeCycleFromRotationStart) {
  const Game g = load_game("rotation.game");
  const auto result = solve_cycle(g, colouring_from_tokens(g, {"a", "b", "b"}));
  EXPECT_EQ(result.colouring, colouring_from_tokens(g, {"b", "b", "b"}));
  EXPECT_TRUE(is_nash(g, result.colouring));
  ASSERT_EQ(result.path.steps.size(), 1u);
  EXPECT_EQ(result.phases[0], 1);
}

TEST(SolveCycle, BonusDoesNotForceMoveWhenAlreadyBestResponding) {
  const Game g = parse_game(
      "colours a b\nnode 1\nnode 2\nnode 3\nset 1 a b\nset 2 a b\nset 3 a b\n"
      "bonus 1 a 1\nbonus 2 a 1\nbonus 3 a 1\nedge 1 2\nedge 2 3\nedge 3 1\n");
  const auto bbb = colouring_from_tokens(g, {"b", "b", "b"});
  // At (b,b,b) each player already earns 1 from its predecessor, as much as
  // switching to a would give, so the procedure stops immediately.
  const auto result = solve_cycle(g, bbb);
  EXPECT_EQ(result.colouring, bbb);
  EXPECT_TRUE(is_nash(g, result.colouring));
  EXPECT_EQ(solve_cycle_strong(g), colouring_from_tokens(g, {"a", "a", "a"}));
}

TEST(SolveCycle, RejectsOtherShapes) {
  EXPECT_THROW(solve_cycle(load_game("chain.game")), StructureError);
  EXPECT_THROW(solve_cycle(load_game("nine_node.game")), StructureError);
  const Game weighted = parse_game("node 1\nnode 2\nset 1 a\nset 2 a\nedge 1 2 2\nedge 2 1\n");
  EXPECT_THROW(solve_cycle(weighted), StructureError);
  EXPECT_THROW(solve_cycle_strong(weighted), StructureError);
}

// At most 3n updates, each strictly profitable; phase-3 updates copy the
// predecessor.
TEST(SolveCycle, ThreePhaseStructureOnRandomCycles) {
  testing::Rng rng(43);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = testing::uniform(rng, 2, 10);
    const Game g = testing::random_cycle(rng, n, {3, 2, 0});
    const auto result = solve_cycle(g, testing::random_colouring(rng, g));
    EXPECT_LE(result.path.steps.size(), 3 * n);
    EXPECT_TRUE(is_nash(g, result.colouring));
    expect_valid_path(g, result.path);
    Colouring s = result.path.start;
    for (std::size_t t = 0; t < result.path.steps.size(); ++t) {
      const auto& m = result.path.steps[t].members.at(0);
      EXPECT_EQ(result.path.steps[t].members.size(), 1u);
      if (result.phases[t] == 3) {
        const NodeId pred = g.in_arcs(m.node)[0].node;
        EXPECT_EQ(m.to, s[pred]);
      }
      apply_step(result.path.steps[t], s);
    }
  }
}

TEST(SolveCycleStrong, TwoCycleSharedColour) {
  const Game g = load_game("two_cycle.game");
  EXPECT_EQ(solve_cycle_strong(g), colouring_from_tokens(g, {"c", "c"}));
}

TEST(SolveCycleStrong, SingleSharedColour) {
  for (std::size_t n : {2, 5, 17}) {
    GameBuilder b;
    const ColourId a = b.declare_colour("a");
    for (ExternalId id = 1; id <= n; ++id) {
      b.add_node(id);
      b.set_colours(id, std::vector<ColourId>{a});
    }
    for (ExternalId id = 1; id <= n; ++id) b.add_edge(id, id % n + 1);
    const Game g = std::move(b).build();
    EXPECT_EQ(solve_cycle_strong(g), Colouring(n, a));
  }
}

TEST(SolveCycleStrong, DisjointSetsFallBackToNash) {
  const Game g = parse_game("node 1\nnode 2\nnode 3\nset 1 a\nset 2 b c\nset 3 d\nedge 1 2\nedge 2 3\nedge 3 1\n");
  const auto s = solve_cycle_strong(g);
  EXPECT_EQ(s, solve_cycle(g).colouring);
  EXPECT_TRUE(is_strong(g, s));
}

TEST(SolveCycleStrong, DominatesNashPayoffsAndIsStrong) {
  testing::Rng rng(44);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = testing::uniform(rng, 2, 8);
    const Game g = testing::random_cycle(rng, n, {3, 2, 0});
    const auto strong = solve_cycle_strong(g);
    const auto nash = solve_cycle(g).colouring;
    const auto ps = payoffs(g, strong);
    const auto pn = payoffs(g, nash);
    for (NodeId v = 0; v < n; ++v) EXPECT_GE(ps[v], pn[v]);
    EXPECT_TRUE(is_strong(g, strong));
    const bool mono = std::all_of(strong.begin(), strong.end(), [&](ColourId c) { return c == strong[0]; });
    if (mono && strong != nash) {
      for (NodeId v = 0; v < n; ++v) {
        auto b = g.bonuses(v);
        EXPECT_EQ(ps[v], *std::max_element(b.begin(), b.end()) + 1);
      }
    }
  }
}

TEST(SolveScc, AgreesWithDagSolverOnDags) {
  testing::Rng rng(45);
  for (int round = 0; round < 150; ++round) {
    const Game g = testing::random_dag(rng, testing::uniform(rng, 1, 9), {3, 2, 0}, 0.35, 1);
    const auto result = solve_scc(g);
    EXPECT_EQ(result.colouring, solve_dag(g));
    expect_valid_path(g, result.path);
  }
}

// On one cycle solve_scc runs the three-phase path and only then moves to the
// shared colour if that joint move is profitable. It matches
// solve_cycle_strong whenever that move is available or not needed.
TEST(SolveScc, SingleCycleMatchesStrongSolverWhenReachable) {
  testing::Rng rng(46);
  std::size_t compared = 0;
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = testing::uniform(rng, 2, 8);
    const Game g = testing::random_cycle(rng, n, {3, 2, 0});
    const auto scc = solve_scc(g);
    EXPECT_TRUE(is_strong(g, scc.colouring));
    expect_valid_path(g, scc.path);
    const auto nash = solve_cycle(g).colouring;
    const auto strong = solve_cycle_strong(g);
    const auto pn = payoffs(g, nash);
    bool all_below = true;
    for (NodeId v = 0; v < n; ++v) {
      auto b = g.bonuses(v);
      all_below = all_below && pn[v] < *std::max_element(b.begin(), b.end()) + 1;
    }
    if (strong == nash || all_below) {
      EXPECT_EQ(scc.colouring, strong);
      ++compared;
    }
  }
  EXPECT_GT(compared, 100u);
}

TEST(SolveScc, RandomCycleSccGraphsAreStrong) {
  testing::Rng rng(47);
  for (int round = 0; round < 200; ++round) {
    const Game g = testing::random_cycle_scc(rng, testing::uniform(rng, 1, 10), {3, 2, 0}, 0.25);
    ASSERT_TRUE(classify(g).all_sccs_simple_cycles);
    const auto result = solve_scc(g, testing::random_colouring(rng, g));
    EXPECT_TRUE(is_strong(g, result.colouring));
    expect_valid_path(g, result.path);
  }
}

// Member payoffs in the induced game equal the full-game payoffs.
TEST(SolveScc, InducedGameCarriesExternalMatches) {
  testing::Rng rng(48);
  for (int round = 0; round < 100; ++round) {
    const Game g = testing::random_cycle_scc(rng, testing::uniform(rng, 2, 10), {3, 2, 0}, 0.4);
    const Colouring s = testing::random_colouring(rng, g);
    const auto dec = decompose_scc(g);
    for (const auto& comp : dec.components) {
      const Game sub = induced_game(g, comp, s);
      Colouring local(comp.size());
      for (std::size_t k = 0; k < comp.size(); ++k) {
        local[*sub.node_of(g.external_id(comp[k]))] = s[comp[k]];
      }
      for (std::size_t k = 0; k < comp.size(); ++k) {
        EXPECT_EQ(payoff(sub, local, *sub.node_of(g.external_id(comp[k]))), payoff(g, s, comp[k]));
      }
    }
  }
}

TEST(SolveScc, RejectsUnsupportedGraphs) {
  EXPECT_THROW(solve_scc(load_game("nine_node.game")), StructureError);
  const Game weighted = parse_game("node 1\nnode 2\nset 1 a\nset 2 a\nedge 1 2 3\n");
  EXPECT_THROW(solve_scc(weighted), StructureError);
}

TEST(SolveTwoColour, SingleColourEverywhere) {
  const Game g = parse_game("node 1\nnode 2\nset 1 blue\nset 2 blue\nedge 1 2\n");
  const auto result = solve_two_colour(g);
  EXPECT_EQ(result.colouring, colouring_from_tokens(g, {"blue", "blue"}));
  EXPECT_TRUE(result.path.steps.empty());
}

TEST(SolveTwoColour, SymmetricTwoCycle) {
  const Game g = parse_game("colours blue red\nnode 1\nnode 2\nset 1 blue red\nset 2 blue red\nedge 1 2\nedge 2 1\n");
  const auto result = solve_two_colour(g, colouring_from_tokens(g, {"blue", "red"}));
  EXPECT_EQ(result.colouring, colouring_from_tokens(g, {"blue", "blue"}));
  ASSERT_EQ(result.path.steps.size(), 1u);
  EXPECT_EQ(result.path.steps[0].coalition(), std::vector<NodeId>{1});
  for (const auto& s : enumerate_colourings(g)) {
    EXPECT_EQ(is_strong(g, s), s == colouring_from_tokens(g, {"blue", "blue"}) ||
                                   s == colouring_from_tokens(g, {"red", "red"}));
  }
}

TEST(SolveTwoColour, RejectsThreeColours) {
  EXPECT_THROW(solve_two_colour(load_game("nine_node.game")), StructureError);
}

TEST(SolveTwoColour, RandomGamesAreStrongAndPhasesGrow) {
  testing::Rng rng(49);
  for (int round = 0; round < 200; ++round) {
    const Game g = testing::random_game(rng, testing::uniform(rng, 1, 10), {2, 2, 0}, 0.3, 3);
    const auto result = solve_two_colour(g, testing::random_colouring(rng, g));
    EXPECT_TRUE(is_strong(g, result.colouring));
    expect_valid_path(g, result.path);
    Colouring s = result.path.start;
    bool red_phase = false;
    for (const auto& step : result.path.steps) {
      const ColourId target = step.members[0].to;
      for (const auto& m : step.members) EXPECT_EQ(m.to, target);
      if (index_of(target) == 1) red_phase = true;
      if (red_phase) {
        EXPECT_EQ(index_of(target), 1u);
      }
      const auto before = std::count(s.begin(), s.end(), target);
      apply_step(step, s);
      EXPECT_GT(std::count(s.begin(), s.end(), target), before);
    }
  }
}

// The elimination finds a profitable switching coalition exactly when one
// exists among all subsets of the candidates.
TEST(SolveTwoColour, EliminationAgreesWithSubsetSearch) {
  testing::Rng rng(50);
  for (int round = 0; round < 300; ++round) {
    const Game g = testing::random_game(rng, testing::uniform(rng, 1, 8), {2, 2, 0}, 0.35, 3);
    const Colouring s = testing::random_colouring(rng, g);
    for (ColourId target : colours_in_use(g)) {
      const auto coalition = detail::switching_coalition(g, s, target);
      if (!coalition.empty()) {
        Colouring t = s;
        for (NodeId v : coalition) t[v] = target;
        EXPECT_TRUE(make_step(g, s, t).profitable());
        continue;
      }
      std::vector<NodeId> candidates;
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (s[v] != target && g.offers(v, target)) candidates.push_back(v);
      }
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << candidates.size()); ++mask) {
        Colouring t = s;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
          if ((mask >> k) & 1) t[candidates[k]] = target;
        }
        EXPECT_FALSE(make_step(g, s, t).profitable());
      }
    }
  }
}

TEST(Solve, AutoPicksFirstApplicableMethod) {
  EXPECT_EQ(solve(load_game("chain.game"), Method::automatic).method, Method::dag);
  EXPECT_EQ(solve(load_game("two_cycle.game"), Method::automatic).method, Method::cycle);
  const Game sccs = parse_game("node 1\nnode 2\nnode 3\nset 1 a\nset 2 a b c\nset 3 b c\nedge 1 2\nedge 2 3\nedge 3 2\n");
  EXPECT_EQ(solve(sccs, Method::automatic).method, Method::scc);
  const Game two = parse_game(
      "node 1\nnode 2\nnode 3\nset 1 a b\nset 2 a b\nset 3 a b\n"
      "edge 1 2\nedge 2 1\nedge 1 3\nedge 3 1\nedge 2 3\n");
  EXPECT_EQ(solve(two, Method::automatic).method, Method::two_colour);
  const auto brute = solve(load_game("nine_node.game"), Method::automatic);
  EXPECT_EQ(brute.method, Method::brute);
  EXPECT_FALSE(brute.colouring.has_value());
}

}  // namespace
}  // namespace coordgame
