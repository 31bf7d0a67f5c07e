#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sector_lab/builders.hpp"
#include "sector_lab/characters.hpp"
#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/pi1.hpp"

namespace sector_lab {

using json = nlohmann::json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::parse_error, "expected an integer for " + what + ", got '" + s + "'");
  }
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::parse_error, "expected a number for " + what + ", got '" + s + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Complex files
//
//   [vertices]          label [measure]
//   [edges]             label tail head [weight]
//   [faces]             label step step ...   (step = edge+ or edge-)
//
// '#' starts a comment. Sections may appear in any order but vertices must
// precede the edges that use them, and edges the faces.

inline ConfigComplex parse_complex(std::istream& in) {
  std::vector<std::string> vlabels;
  std::vector<double> measure;
  std::map<std::string, int> vid, eid;
  std::vector<Edge> edges;
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> flabels;
  std::string section, line;
  int lineno = 0;
  auto where = [&]() { return " (line " + std::to_string(lineno) + ")"; };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::parse_error, "malformed section header" + where());
      section = line.substr(1, line.size() - 2);
      if (section != "vertices" && section != "edges" && section != "faces")
        fail(ErrorCode::parse_error, "unknown section [" + section + "]" + where());
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (section.empty()) fail(ErrorCode::parse_error, "content before the first section" + where());
    if (section == "vertices") {
      if (tok.size() > 2) fail(ErrorCode::parse_error, "vertex line takes a label and an optional measure" + where());
      if (vid.count(tok[0])) fail(ErrorCode::invalid_parameter, "duplicate vertex " + tok[0] + where());
      vid[tok[0]] = static_cast<int>(vlabels.size());
      vlabels.push_back(tok[0]);
      measure.push_back(tok.size() == 2 ? detail::parse_double(tok[1], "vertex measure") : 1.0);
    } else if (section == "edges") {
      if (tok.size() < 3 || tok.size() > 4) fail(ErrorCode::parse_error, "edge line is: label tail head [weight]" + where());
      if (eid.count(tok[0])) fail(ErrorCode::invalid_parameter, "duplicate edge " + tok[0] + where());
      auto t = vid.find(tok[1]), h = vid.find(tok[2]);
      if (t == vid.end() || h == vid.end()) fail(ErrorCode::invalid_parameter, "edge uses an unknown vertex" + where());
      eid[tok[0]] = static_cast<int>(edges.size());
      edges.push_back({t->second, h->second, tok.size() == 4 ? detail::parse_double(tok[3], "edge weight") : 1.0, tok[0]});
    } else {
      if (tok.size() < 2) fail(ErrorCode::parse_error, "face line needs a label and at least one step" + where());
      std::vector<Step> w;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto& t = tok[i];
        char dir = t.back();
        if (dir != '+' && dir != '-') fail(ErrorCode::parse_error, "face step must end in + or -: " + t + where());
        auto e = eid.find(t.substr(0, t.size() - 1));
        if (e == eid.end()) fail(ErrorCode::invalid_parameter, "face uses an unknown edge: " + t + where());
        w.push_back({e->second, dir == '+'});
      }
      faces.push_back(std::move(w));
      flabels.push_back(tok[0]);
    }
  }
  if (vlabels.empty()) fail(ErrorCode::parse_error, "complex has no vertices");
  return ConfigComplex(std::move(vlabels), std::move(measure), std::move(edges), std::move(faces), std::move(flabels));
}

inline ConfigComplex parse_complex_string(const std::string& text) {
  std::istringstream in(text);
  return parse_complex(in);
}

inline ConfigComplex read_complex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse_error, "cannot open complex file " + path);
  return parse_complex(in);
}

/// Canonical text form; parse_complex(write_complex(c)) reproduces c.
inline std::string write_complex(const ConfigComplex& cx) {
  std::ostringstream out;
  out << "[vertices]\n";
  for (int v = 0; v < cx.vertex_count(); ++v) out << cx.vertex_label(v) << ' ' << format_double(cx.measure(v)) << '\n';
  out << "[edges]\n";
  for (const auto& e : cx.edges())
    out << e.label << ' ' << cx.vertex_label(e.tail) << ' ' << cx.vertex_label(e.head) << ' ' << format_double(e.weight)
        << '\n';
  out << "[faces]\n";
  for (int f = 0; f < cx.face_count(); ++f) {
    out << cx.face_label(f);
    for (Step s : cx.face(f)) out << ' ' << cx.edge(s.edge).label << (s.forward ? '+' : '-');
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Complex presets
//
//   cycle:N                    cycle:N:quotient=P
//   grid:WxH                   grid:WxH:holes=x,y,w,h+x,y,w,h
//   present:a,b;a2,b2,(ab)3    generators ; relators
//   star:LEGS:LENGTH           pair:<preset>
//
// Anything else is read as a complex file.

inline ConfigComplex complex_from_preset(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "cycle") {
    auto parts = detail::split(rest, ':');
    int n = detail::parse_int(parts[0], "cycle length");
    if (parts.size() == 1) return build_cycle(n);
    if (parts.size() == 2 && parts[1].rfind("quotient=", 0) == 0)
      return build_cycle_quotient(n, detail::parse_int(parts[1].substr(9), "quotient power"));
    fail(ErrorCode::parse_error, "cycle preset is cycle:N or cycle:N:quotient=P");
  }
  if (kind == "grid") {
    auto parts = detail::split(rest, ':');
    auto x = parts[0].find('x');
    if (x == std::string::npos) fail(ErrorCode::parse_error, "grid preset needs WxH");
    int w = detail::parse_int(parts[0].substr(0, x), "grid width");
    int h = detail::parse_int(parts[0].substr(x + 1), "grid height");
    std::vector<Hole> holes;
    if (parts.size() == 2) {
      if (parts[1].rfind("holes=", 0) != 0) fail(ErrorCode::parse_error, "grid option must be holes=...");
      std::string hs = parts[1].substr(6);
      if (!hs.empty())
        for (const auto& item : detail::split(hs, '+')) {
          auto nums = detail::split(item, ',');
          if (nums.size() != 4) fail(ErrorCode::parse_error, "hole is x,y,w,h");
          holes.push_back({detail::parse_int(nums[0], "hole x"), detail::parse_int(nums[1], "hole y"),
                           detail::parse_int(nums[2], "hole w"), detail::parse_int(nums[3], "hole h")});
        }
    } else if (parts.size() > 2) {
      fail(ErrorCode::parse_error, "grid preset is grid:WxH[:holes=...]");
    }
    return build_grid_with_holes(w, h, holes);
  }
  if (kind == "present") {
    auto semi = rest.find(';');
    std::string gens = rest.substr(0, semi);
    std::string rels = semi == std::string::npos ? "" : rest.substr(semi + 1);
    std::vector<std::string> names;
    for (const auto& g : detail::split(gens, ',')) {
      auto t = detail::trim(g);
      if (t.empty()) fail(ErrorCode::parse_error, "empty generator name");
      names.push_back(t);
    }
    std::vector<std::string> relators;
    if (!detail::trim(rels).empty())
      for (const auto& r : detail::split(rels, ',')) relators.push_back(detail::trim(r));
    return build_presentation_complex(names, relators);
  }
  if (kind == "star") {
    auto parts = detail::split(rest, ':');
    if (parts.size() != 2) fail(ErrorCode::parse_error, "star preset is star:LEGS:LENGTH");
    return build_star(detail::parse_int(parts[0], "legs"), detail::parse_int(parts[1], "leg length"));
  }
  if (kind == "pair") return build_two_particle_space(complex_from_preset(rest));
  if (std::filesystem::exists(spec)) return read_complex_file(spec);
  fail(ErrorCode::parse_error, "unknown complex preset or missing file: " + spec);
}

// ---------------------------------------------------------------------------
// Representation files
//
//   {"dimension": 2,
//    "generators": {"a": [[[re, im], [re, im]], [[re, im], [re, im]]], ...}}
//
// Matrix entries may be plain numbers for real values.

inline cplx json_to_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::parse_error, "matrix entry must be a number or [re, im]");
}

inline UnitaryRep rep_from_json(const json& j, double tol = kDefaultTol) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("generators"))
    fail(ErrorCode::parse_error, "representation needs 'dimension' and 'generators'");
  int d = j.at("dimension").get<int>();
  std::vector<std::string> names;
  std::vector<Matrix> mats;
  for (const auto& [name, rows] : j.at("generators").items()) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) fail(ErrorCode::parse_error, "matrix for " + name + " needs d rows");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d)
        fail(ErrorCode::parse_error, "matrix row for " + name + " needs d entries");
      for (int c = 0; c < d; ++c) m(r, c) = json_to_complex(rows[r][c]);
    }
    names.push_back(name);
    mats.push_back(std::move(m));
  }
  return UnitaryRep(d, std::move(names), std::move(mats), tol);
}

inline json rep_to_json(const UnitaryRep& rep) {
  json gens = json::object();
  for (std::size_t g = 0; g < rep.generator_names().size(); ++g) {
    json rows = json::array();
    const Matrix& m = rep.image(static_cast<int>(g));
    for (int r = 0; r < rep.dim(); ++r) {
      json row = json::array();
      for (int c = 0; c < rep.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
      rows.push_back(row);
    }
    gens[rep.generator_names()[g]] = rows;
  }
  return {{"dimension", rep.dim()}, {"generators", gens}};
}

/// Representation by name for a presentation:
///   trivial | trivial:D | character:θ | character:θ1,θ2,... | irrep:K | <file.json>
/// character:θ sends every generator to exp(2πiθ); a list gives one phase
/// per generator. irrep:K indexes the character table of a finite backend.
inline UnitaryRep resolve_rep(const std::string& spec, const Pi1Presentation& pres, double tol = kDefaultTol) {
  const auto& names = pres.generator_names();
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "trivial") return UnitaryRep::trivial(names, arg.empty() ? 1 : detail::parse_int(arg, "dimension"));
  if (kind == "character") {
    auto parts = detail::split(arg, ',');
    if (parts.size() == 1) return UnitaryRep::character(names, detail::parse_double(parts[0], "phase"));
    if (parts.size() != names.size()) fail(ErrorCode::invalid_representation, "one phase per generator required");
    std::vector<Matrix> m;
    for (const auto& p : parts)
      m.push_back(Matrix::Constant(1, 1, std::polar(1.0, 2.0 * M_PI * detail::parse_double(p, "phase"))));
    return UnitaryRep(1, names, std::move(m), tol);
  }
  if (kind == "irrep") {
    const auto& g = pres.backend().finite_group();
    auto table = character_table(g);
    return irreducible_representation(g, table, detail::parse_int(arg, "irrep index"));
  }
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      fail(ErrorCode::parse_error, std::string("invalid representation JSON: ") + e.what());
    }
    return rep_from_json(j, tol);
  }
  fail(ErrorCode::parse_error, "unknown representation spec: " + spec);
}

/// Writes through a temporary file and a rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::parse_error, "cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace sector_lab
