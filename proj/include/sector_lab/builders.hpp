#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/words.hpp"

namespace sector_lab {

/// Cycle graph C_n: vertices v0..v{n-1}, edge e_i from v_i to v_{i+1 mod n}.
inline ConfigComplex build_cycle(int n) {
  if (n < 3) fail(ErrorCode::invalid_parameter, "cycle needs n >= 3");
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    edges.push_back({i, (i + 1) % n, 1.0, "e" + std::to_string(i)});
  }
  return ConfigComplex(std::move(labels), {}, std::move(edges), {});
}

/// The closed walk going once around C_n in the direction of its edges.
inline PathWord cycle_loop(const ConfigComplex& cycle, int start = 0) {
  const int n = cycle.vertex_count();
  std::vector<Step> steps;
  for (int i = 0; i < n; ++i) steps.push_back({(start + i) % n, true});
  return PathWord(cycle, start, steps);
}

/// C_n with one extra face running `power` times around the cycle, so that the
/// fundamental group becomes Z_power.
inline ConfigComplex build_cycle_quotient(int n, int power) {
  if (power < 1) fail(ErrorCode::invalid_parameter, "quotient power must be >= 1");
  auto base = build_cycle(n);
  std::vector<Step> walk;
  for (int k = 0; k < power; ++k)
    for (int i = 0; i < n; ++i) walk.push_back({i, true});
  return base.with_faces({walk}, {"wrap" + std::to_string(power)});
}

/// Parses a word such as "a b^-1", "(ab)3", "a2 b2" or "abab ab" over the given
/// generator names; "1" is the empty word. When every name is one character, consecutive letters are
/// separate generators; otherwise names are maximal runs of [A-Za-z_].
inline Word parse_word(const std::string& text, const std::vector<std::string>& names) {
  bool single = std::all_of(names.begin(), names.end(), [](const std::string& s) { return s.size() == 1; });
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
  std::size_t pos = 0;
  auto is_ident = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };

  auto parse_exponent = [&]() -> int {
    std::size_t save = pos;
    if (pos < text.size() && text[pos] == '^') ++pos;
    bool neg = false;
    if (pos < text.size() && text[pos] == '-') {
      neg = true;
      ++pos;
    }
    std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (digits == pos) {
      if (save != pos) fail(ErrorCode::parse_error, "malformed exponent in '" + text + "'");
      return 1;
    }
    int e = std::stoi(text.substr(digits, pos - digits));
    return neg ? -e : e;
  };

  std::function<Word(bool)> parse_seq = [&](bool nested) -> Word {
    Word out;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.') {
        ++pos;
        continue;
      }
      if (c == ')') {
        if (!nested) fail(ErrorCode::parse_error, "unbalanced ')' in '" + text + "'");
        ++pos;
        return out;
      }
      Word factor;
      if (c == '1' && (pos + 1 == text.size() || !std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
        ++pos;  // identity
      } else if (c == '(') {
        ++pos;
        factor = parse_seq(true);
      } else if (is_ident(c)) {
        std::string name;
        if (single) {
          name = std::string(1, c);
          ++pos;
        } else {
          while (pos < text.size() && is_ident(text[pos])) name += text[pos++];
        }
        auto it = index.find(name);
        if (it == index.end())
          fail(ErrorCode::invalid_parameter, "relator references unknown generator '" + name + "'");
        factor = {letter_of(it->second)};
      } else {
        fail(ErrorCode::parse_error, std::string("unexpected character '") + c + "' in '" + text + "'");
      }
      Word p = power(factor, parse_exponent());
      out.insert(out.end(), p.begin(), p.end());
    }
    if (nested) fail(ErrorCode::parse_error, "unbalanced '(' in '" + text + "'");
    return out;
  };
  return parse_seq(false);
}

/// One vertex, one loop edge per generator, one face per relator. Each face is
/// traversed so that its holonomy word (later steps on the left) spells the
/// relator as written.
inline ConfigComplex build_presentation_complex(const std::vector<std::string>& generators,
                                                const std::vector<Word>& relators) {
  std::vector<Edge> edges;
  std::set<std::string> seen;
  for (const auto& g : generators) {
    if (g.empty() || !seen.insert(g).second)
      fail(ErrorCode::invalid_parameter, "generator names must be unique and non-empty");
    edges.push_back({0, 0, 1.0, g});
  }
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> face_labels;
  for (const Word& r : relators) {
    if (r.empty()) fail(ErrorCode::invalid_parameter, "empty relator");
    std::vector<Step> walk;
    for (auto it = r.rbegin(); it != r.rend(); ++it) {
      int g = letter_generator(*it);
      if (*it == 0 || g >= static_cast<int>(generators.size()))
        fail(ErrorCode::invalid_parameter, "relator references an undeclared generator");
      walk.push_back({g, *it > 0});
    }
    faces.push_back(std::move(walk));
    face_labels.push_back("r" + std::to_string(face_labels.size()));
  }
  return ConfigComplex({"v0"}, {}, std::move(edges), std::move(faces), std::move(face_labels));
}

inline ConfigComplex build_presentation_complex(const std::vector<std::string>& generators,
                                                const std::vector<std::string>& relators) {
  std::vector<Word> words;
  for (const auto& r : relators) words.push_back(parse_word(r, generators));
  return build_presentation_complex(generators, words);
}

/// Removed rectangle of cells: cells x..x+w-1 by y..y+h-1.
struct Hole {
  int x = 0, y = 0, w = 1, h = 1;
};

/// width × height vertices, one square face per retained cell. Holes must sit
/// strictly inside the grid and be separated by at least one cell; their
/// interior vertices and edges are removed along with their cells.
inline ConfigComplex build_grid_with_holes(int width, int height, const std::vector<Hole>& holes = {}) {
  if (width < 2 || height < 2) fail(ErrorCode::invalid_parameter, "grid needs at least 2x2 vertices");
  for (const auto& h : holes) {
    if (h.w < 1 || h.h < 1) fail(ErrorCode::invalid_parameter, "hole must have positive size");
    if (h.x < 1 || h.y < 1 || h.x + h.w > width - 2 || h.y + h.h > height - 2)
      fail(ErrorCode::invalid_parameter, "hole must lie strictly inside the grid");
  }
  for (std::size_t i = 0; i < holes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = holes[i];
      const auto& b = holes[j];
      bool apart = a.x + a.w < b.x || b.x + b.w < a.x || a.y + a.h < b.y || b.y + b.h < a.y;
      if (!apart) fail(ErrorCode::invalid_parameter, "holes overlap or touch");
    }
  auto in_hole_cell = [&](int cx, int cy) {
    for (const auto& h : holes)
      if (cx >= h.x && cx < h.x + h.w && cy >= h.y && cy < h.y + h.h) return true;
    return false;
  };
  auto inside_open = [&](double px, double py) {
    for (const auto& h : holes)
      if (px > h.x && px < h.x + h.w && py > h.y && py < h.y + h.h) return true;
    return false;
  };

  std::vector<int> id(static_cast<std::size_t>(width * height), -1);
  std::vector<std::string> labels;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (inside_open(x, y)) continue;
      id[y * width + x] = static_cast<int>(labels.size());
      labels.push_back("v" + std::to_string(x) + "_" + std::to_string(y));
    }
  std::vector<Edge> edges;
  std::map<std::pair<int, int>, int> horiz, vert;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width && !inside_open(x + 0.5, y) && id[y * width + x] >= 0 && id[y * width + x + 1] >= 0) {
        horiz[{x, y}] = static_cast<int>(edges.size());
        edges.push_back({id[y * width + x], id[y * width + x + 1], 1.0, "h" + std::to_string(x) + "_" + std::to_string(y)});
      }
      if (y + 1 < height && !inside_open(x, y + 0.5) && id[y * width + x] >= 0 && id[(y + 1) * width + x] >= 0) {
        vert[{x, y}] = static_cast<int>(edges.size());
        edges.push_back({id[y * width + x], id[(y + 1) * width + x], 1.0, "u" + std::to_string(x) + "_" + std::to_string(y)});
      }
    }
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> face_labels;
  for (int y = 0; y + 1 < height; ++y)
    for (int x = 0; x + 1 < width; ++x) {
      if (in_hole_cell(x, y)) continue;
      // counter-clockwise: bottom, right side, top (backwards), left side (backwards)
      faces.push_back({{horiz.at({x, y}), true},
                       {vert.at({x + 1, y}), true},
                       {horiz.at({x, y + 1}), false},
                       {vert.at({x, y}), false}});
      face_labels.push_back("c" + std::to_string(x) + "_" + std::to_string(y));
    }
  return ConfigComplex(std::move(labels), {}, std::move(edges), std::move(faces), std::move(face_labels));
}

/// Star K_{1,legs} with every leg subdivided into `leg_length` edges.
inline ConfigComplex build_star(int legs, int leg_length) {
  if (legs < 1 || leg_length < 1) fail(ErrorCode::invalid_parameter, "star needs legs >= 1 and leg length >= 1");
  std::vector<std::string> labels{"c"};
  std::vector<Edge> edges;
  for (int l = 0; l < legs; ++l) {
    int prev = 0;
    for (int k = 1; k <= leg_length; ++k) {
      int v = static_cast<int>(labels.size());
      labels.push_back("l" + std::to_string(l) + "_" + std::to_string(k));
      edges.push_back({prev, v, 1.0, "s" + std::to_string(l) + "_" + std::to_string(k)});
      prev = v;
    }
  }
  return ConfigComplex(std::move(labels), {}, std::move(edges), {});
}

/// Unordered configuration space of two distinct particles on a graph. A move
/// slides one particle along a base edge while the other sits at a vertex not
/// incident to that edge; two moves along vertex-disjoint edges commute and
/// span a square face.
inline ConfigComplex build_two_particle_space(const ConfigComplex& base) {
  if (base.face_count() != 0) fail(ErrorCode::invalid_parameter, "two-particle builder expects a graph without faces");
  const int n = base.vertex_count();
  for (const auto& e : base.edges())
    if (e.tail == e.head) fail(ErrorCode::invalid_parameter, "two-particle builder expects a graph without loops");

  std::map<std::pair<int, int>, int> config;
  std::vector<std::string> labels;
  std::vector<double> measure;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      config[{a, b}] = static_cast<int>(labels.size());
      labels.push_back(base.vertex_label(a) + "|" + base.vertex_label(b));
      measure.push_back(base.measure(a) * base.measure(b));
    }
  auto cfg = [&](int a, int b) { return config.at({std::min(a, b), std::max(a, b)}); };

  std::vector<Edge> edges;
  std::map<std::pair<int, int>, int> move;  // (base edge, stationary vertex) -> edge id
  for (int e = 0; e < base.edge_count(); ++e) {
    const auto& be = base.edge(e);
    for (int s = 0; s < n; ++s) {
      if (s == be.tail || s == be.head) continue;
      move[{e, s}] = static_cast<int>(edges.size());
      edges.push_back({cfg(be.tail, s), cfg(be.head, s), be.weight, be.label + "@" + base.vertex_label(s)});
    }
  }
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> face_labels;
  for (int e1 = 0; e1 < base.edge_count(); ++e1)
    for (int e2 = e1 + 1; e2 < base.edge_count(); ++e2) {
      const auto& a = base.edge(e1);
      const auto& b = base.edge(e2);
      if (a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head) continue;
      faces.push_back({{move.at({e1, b.tail}), true},
                       {move.at({e2, a.head}), true},
                       {move.at({e1, b.head}), false},
                       {move.at({e2, a.tail}), false}});
      face_labels.push_back("sq_" + a.label + "_" + b.label);
    }

  // Connectivity and degeneracy are checked here so the failure names the configuration space.
  const int nc = static_cast<int>(labels.size());
  if (edges.empty())
    fail(ErrorCode::disconnected_configuration_space,
         std::to_string(nc) + " configuration(s), 0 moves: particles cannot move");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nc));
  for (const auto& e : edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<bool> seen(static_cast<std::size_t>(nc), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        q.push(w);
      }
  }
  if (count != nc)
    fail(ErrorCode::disconnected_configuration_space,
         std::to_string(nc) + " configurations, " + std::to_string(edges.size()) + " moves, only " +
             std::to_string(count) + " reachable from " + labels[0]);
  return ConfigComplex(std::move(labels), std::move(measure), std::move(edges), std::move(faces),
                       std::move(face_labels));
}

}  // namespace sector_lab
