#pragma once

// Text formats: games, colourings, role maps and polymatrix dumps.
//
// Game file, one directive per line, '#' starts a comment:
//   colours <c1> <c2> ...        optional; fixes colour-id order
//   node <id>
//   set <id> <c1> <c2> ...
//   bonus <id> <colour> <value>
//   edge <src> <dst> [<weight>]  weight defaults to 1; repeats are summed
// Reduced games carry "# role <id> X|A|B|C <index>" comment lines.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coordgame/game.hpp"
#include "coordgame/reductions.hpp"

namespace coordgame {

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) words.push_back(line.substr(start, pos - start));
  }
  return words;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

inline std::uint64_t parse_natural(std::string_view word, const char* what) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || end != word.data() + word.size()) {
    throw InputError(std::string("bad ") + what + " '" + std::string(word) + "'");
  }
  return value;
}

inline ExternalId parse_node_id(std::string_view word) {
  const auto id = parse_natural(word, "node id");
  if (id == 0) throw InputError("node ids must be positive");
  return id;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> words;
};

inline std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++number;
    auto words = split_words(strip_comment(text.substr(pos, end - pos)));
    if (!words.empty()) lines.push_back({number, std::move(words)});
    pos = end + 1;
  }
  return lines;
}

template <class F>
void at_line(std::size_t number, F&& action) {
  try {
    action();
  } catch (const InputError& e) {
    throw InputError("line " + std::to_string(number) + ": " + e.what());
  }
}

}  // namespace detail

// Directives may appear in any order; they are applied colours first, then
// nodes, sets, bonuses and edges.
inline Game parse_game(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::vector<const detail::Line*> colours, nodes, sets, bonuses, edges;
  for (const auto& line : lines) {
    const auto& head = line.words[0];
    if (head == "colours") colours.push_back(&line);
    else if (head == "node") nodes.push_back(&line);
    else if (head == "set") sets.push_back(&line);
    else if (head == "bonus") bonuses.push_back(&line);
    else if (head == "edge") edges.push_back(&line);
    else throw InputError("line " + std::to_string(line.number) + ": unknown directive '" + std::string(head) + "'");
  }

  GameBuilder builder;
  if (colours.size() > 1) throw InputError("line " + std::to_string(colours[1]->number) + ": second colours line");
  const bool declared = !colours.empty();
  if (declared) {
    const auto& line = *colours[0];
    detail::at_line(line.number, [&] {
      if (line.words.size() < 2) throw InputError("colours line lists no colours");
      for (std::size_t k = 1; k < line.words.size(); ++k) {
        if (builder.colours().find(line.words[k])) {
          throw InputError("colour '" + std::string(line.words[k]) + "' declared twice");
        }
        builder.declare_colour(line.words[k]);
      }
    });
  }
  for (const auto* line : nodes) {
    detail::at_line(line->number, [&] {
      if (line->words.size() != 2) throw InputError("expected 'node <id>'");
      builder.add_node(detail::parse_node_id(line->words[1]));
    });
  }
  for (const auto* line : sets) {
    detail::at_line(line->number, [&] {
      if (line->words.size() < 3) throw InputError("expected 'set <id> <colour> ...'");
      const auto id = detail::parse_node_id(line->words[1]);
      if (!builder.has_node(id)) throw InputError("undeclared node " + std::to_string(id));
      std::vector<ColourId> set;
      for (std::size_t k = 2; k < line->words.size(); ++k) {
        const auto token = line->words[k];
        auto found = builder.colours().find(token);
        if (!found && declared) throw InputError("colour '" + std::string(token) + "' not in the colours line");
        set.push_back(found ? *found : builder.declare_colour(token));
      }
      builder.set_colours(id, std::move(set));
    });
  }
  for (const auto* line : bonuses) {
    detail::at_line(line->number, [&] {
      if (line->words.size() != 4) throw InputError("expected 'bonus <id> <colour> <value>'");
      const auto id = detail::parse_node_id(line->words[1]);
      auto colour = builder.colours().find(line->words[2]);
      if (!colour) throw InputError("unknown colour '" + std::string(line->words[2]) + "'");
      builder.set_bonus(id, *colour, detail::parse_natural(line->words[3], "bonus"));
    });
  }
  for (const auto* line : edges) {
    detail::at_line(line->number, [&] {
      if (line->words.size() != 3 && line->words.size() != 4) {
        throw InputError("expected 'edge <src> <dst> [<weight>]'");
      }
      const Weight w = line->words.size() == 4 ? detail::parse_natural(line->words[3], "weight") : 1;
      builder.add_edge(detail::parse_node_id(line->words[1]), detail::parse_node_id(line->words[2]), w);
    });
  }
  return std::move(builder).build();
}

// Canonical text: colours line, role comments, then per node (ascending id)
// its node/set/bonus lines, then edges sorted by (src, dst) with explicit
// weights. Equal games give byte-equal output.
inline std::string emit_game(const Game& game, const RoleMap* roles = nullptr) {
  std::ostringstream out;
  out << "colours";
  for (std::size_t c = 0; c < game.colours().size(); ++c) {
    out << ' ' << game.colours().token(static_cast<ColourId>(c));
  }
  out << '\n';
  if (roles) {
    auto sorted = roles->roles;
    std::sort(sorted.begin(), sorted.end(), [](const NodeRole& a, const NodeRole& b) { return a.node < b.node; });
    for (const auto& r : sorted) {
      out << "# role " << r.node << ' ' << role_letter(r.kind) << ' ' << r.index << '\n';
    }
  }
  for (NodeId v = 0; v < game.num_nodes(); ++v) {
    const auto id = game.external_id(v);
    out << "node " << id << '\n' << "set " << id;
    for (ColourId c : game.colour_set(v)) out << ' ' << game.colours().token(c);
    out << '\n';
    auto set = game.colour_set(v);
    for (std::size_t k = 0; k < set.size(); ++k) {
      if (game.bonuses(v)[k] != 0) {
        out << "bonus " << id << ' ' << game.colours().token(set[k]) << ' ' << game.bonuses(v)[k] << '\n';
      }
    }
  }
  for (const Edge& e : game.edges()) {
    out << "edge " << game.external_id(e.src) << ' ' << game.external_id(e.dst) << ' ' << e.weight << '\n';
  }
  return out.str();
}

inline RoleMap parse_roles(std::string_view text) {
  RoleMap roles;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++number;
    const auto words = detail::split_words(text.substr(pos, end - pos));
    pos = end + 1;
    if (words.size() < 2 || words[0] != "#" || words[1] != "role") continue;
    detail::at_line(number, [&] {
      if (words.size() != 5 || words[3].size() != 1) throw InputError("expected '# role <id> X|A|B|C <index>'");
      const auto kind = std::string_view("XABC").find(words[3][0]);
      if (kind == std::string_view::npos) throw InputError("unknown role '" + std::string(words[3]) + "'");
      const auto index = detail::parse_natural(words[4], "role index");
      if (index == 0) throw InputError("role indices are 1-based");
      roles.roles.push_back({detail::parse_node_id(words[2]), static_cast<RoleKind>(kind), index});
    });
  }
  return roles;
}

// Lines "<node-id> <colour>", exactly one per node.
inline Colouring parse_colouring(const Game& game, std::string_view text) {
  Colouring s(game.num_nodes());
  std::vector<char> seen(game.num_nodes(), 0);
  for (const auto& line : detail::split_lines(text)) {
    detail::at_line(line.number, [&] {
      if (line.words.size() != 2) throw InputError("expected '<node-id> <colour>'");
      const auto id = detail::parse_node_id(line.words[0]);
      const auto v = game.node_of(id);
      if (!v) throw InputError("unknown node " + std::to_string(id));
      if (seen[*v]) throw InputError("node " + std::to_string(id) + " coloured twice");
      const auto colour = game.colours().find(line.words[1]);
      if (!colour || !game.offers(*v, *colour)) {
        throw InputError("colour '" + std::string(line.words[1]) + "' not in the set of node " + std::to_string(id));
      }
      s[*v] = *colour;
      seen[*v] = 1;
    });
  }
  for (NodeId v = 0; v < game.num_nodes(); ++v) {
    if (!seen[v]) throw InputError("colouring misses node " + std::to_string(game.external_id(v)));
  }
  return s;
}

inline std::string emit_colouring(const Game& game, const Colouring& s) {
  validate_colouring(game, s);
  std::ostringstream out;
  for (NodeId v = 0; v < game.num_nodes(); ++v) {
    out << game.external_id(v) << ' ' << game.colours().token(s[v]) << '\n';
  }
  return out.str();
}

// Compact single-line form "c1 c2 ..." in node order.
inline std::string colouring_tuple(const Game& game, const Colouring& s) {
  std::string out;
  for (NodeId v = 0; v < s.size(); ++v) {
    if (v) out += ' ';
    out += game.colours().token(s[v]);
  }
  return out;
}

// "players <n>", one "strategies <id> ..." line per player, then one
// "a <i> <j> <own> <other> 1" line per non-zero partial payoff.
inline std::string emit_polymatrix(const Game& game, const PolymatrixGame& pm) {
  std::ostringstream out;
  out << "players " << pm.num_players << '\n';
  for (NodeId i = 0; i < pm.num_players; ++i) {
    out << "strategies " << game.external_id(i);
    for (ColourId c : pm.strategies[i]) out << ' ' << game.colours().token(c);
    out << '\n';
  }
  for (NodeId i = 0; i < pm.num_players; ++i) {
    for (const auto& e : pm.entries_of(i)) {
      out << "a " << game.external_id(i) << ' ' << game.external_id(e.j) << ' ' << game.colours().token(e.own)
          << ' ' << game.colours().token(e.other) << " 1\n";
    }
  }
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace coordgame
