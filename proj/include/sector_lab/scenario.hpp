#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sector_lab/builders.hpp"
#include "sector_lab/characters.hpp"
#include "sector_lab/cover.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/io.hpp"
#include "sector_lab/pi1.hpp"
#include "sector_lab/region.hpp"
#include "sector_lab/sectors.hpp"

namespace sector_lab {

struct Tolerances {
  double cocycle = 1e-12;
  double flatness = 1e-12;
  double homotopy = 1e-10;
  double fingerprint = 1e-10;
  double spectrum = 1e-10;
  double cluster = 1e-8;
  double conjugacy = 1e-10;
  double unitarity = 1e-10;
  double kesten_relative = 0.05;

  /// Overrides every tolerance whose default is the general 1e-10 level.
  void set_general(double t) { homotopy = fingerprint = spectrum = conjugacy = unitarity = t; }
};

struct Assertion {
  std::string step;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // how value is compared with bound
  std::string oracle;
};

struct RunResult {
  json summary;
  std::map<std::string, std::string> files;  // relative name -> content
  bool passed = true;
};

struct PresetInfo {
  std::string name;
  std::string description;
  json config;
};

inline const std::vector<std::string>& known_steps() {
  static const std::vector<std::string> steps{"pi1",      "holonomy-checks", "spectrum",      "sector-compare",
                                              "uniqueness", "identical-particles", "cover",    "cover-decompose",
                                              "amenability", "nonl2"};
  return steps;
}

inline std::vector<PresetInfo> preset_catalog() {
  std::vector<PresetInfo> out;
  out.push_back({"ab-circle", "C8 ring with an Aharonov-Bohm flux: theta sweep 0..15/16 against the closed-form spectrum",
                 json{{"name", "ab-circle"},
                      {"complex", "cycle:8"},
                      {"reps", {"character:0", "character:0.25", "character:0.5"}},
                      {"steps", {"pi1", "holonomy-checks", "spectrum", "sector-compare", "cover", "amenability"}},
                      {"options", {{"theta_sweep", 16}, {"expect_distinct", true}, {"expect_distinct_spectra", true}, {"cover_radius", 5},
                                   {"expect_backend", "free"}, {"expect_verdict", "amenable"}, {"kesten_min", 0.98}}}}});
  out.push_back({"identical-particles-s3",
                 "S3 presentation complex: boson, fermion and parastatistics sectors, full-cover decomposition",
                 json{{"name", "identical-particles-s3"},
                      {"complex", "present:a,b;a2,b2,(ab)3"},
                      {"reps", "irreps"},
                      {"steps", {"pi1", "holonomy-checks", "spectrum", "identical-particles", "cover-decompose",
                                 "amenability", "nonl2"}},
                      {"options", {{"expect_backend", "finite"}, {"expect_order", 6}, {"expect_verdict", "amenable"},
                                   {"nonl2", {{"rep", "irrep:2"}, {"support_radius", -1}, {"form", "trace"}, {"expect_dim", 4}}}}}}});
  out.push_back({"free-group-holes", "Plane with two holes: free fundamental group, Kesten evidence for non-amenability",
                 json{{"name", "free-group-holes"},
                      {"complex", "grid:9x7:holes=2,2,1,1+5,2,1,1"},
                      {"reps", {"trivial"}},
                      {"steps", {"pi1", "holonomy-checks", "amenability", "nonl2"}},
                      {"options", {{"expect_backend", "free"}, {"expect_verdict", "non-amenable"}, {"kesten_radius", 12},
                                   {"nonl2", {{"rep", "trivial"}, {"support_radius", 2}, {"form", "vector"}, {"expect_dim", 1}}}}}}});
  out.push_back({"von-neumann-uniqueness", "5x5 grid: random flat connections all reproduce the untwisted spectrum",
                 json{{"name", "von-neumann-uniqueness"},
                      {"complex", "grid:5x5"},
                      {"reps", {"trivial", "trivial:2"}},
                      {"steps", {"pi1", "holonomy-checks", "sector-compare", "uniqueness"}},
                      {"options", {{"uniqueness_dims", {1, 2, 3}}, {"uniqueness_samples", 4}}}}});
  out.push_back({"z4-quotient", "C8 with a face wrapping four times: Z4 sectors and the full-cover decomposition",
                 json{{"name", "z4-quotient"},
                      {"complex", "cycle:8:quotient=4"},
                      {"reps", "irreps"},
                      {"steps", {"pi1", "holonomy-checks", "spectrum", "sector-compare", "cover-decompose", "amenability"}},
                      {"options", {{"expect_backend", "cyclic-4"}, {"expect_distinct", true}, {"expect_verdict", "amenable"}}}}});
  out.push_back({"torus-z2", "One-vertex torus: free abelian rank 2, Kesten estimate tending to 1",
                 json{{"name", "torus-z2"},
                      {"complex", "present:a,b;aba^-1b^-1"},
                      {"reps", {"trivial", "character:0.25,0.5"}},
                      {"steps", {"pi1", "holonomy-checks", "spectrum", "amenability"}},
                      {"options", {{"expect_backend", "free-abelian"}, {"expect_verdict", "amenable"}, {"kesten_radius", 20},
                                   {"kesten_min", 0.98}}}}});
  out.push_back({"two-particle-ring", "Two hard-core particles on C6: the pair space has fundamental group Z",
                 json{{"name", "two-particle-ring"},
                      {"complex", "pair:cycle:6"},
                      {"reps", {"character:0", "character:0.5"}},
                      {"steps", {"pi1", "holonomy-checks", "spectrum", "sector-compare"}},
                      {"options", {{"expect_backend", "free"}, {"expect_distinct", true}, {"expect_distinct_spectra", true}}}}});
  return out;
}

inline std::optional<PresetInfo> find_preset(const std::string& name) {
  for (auto& p : preset_catalog())
    if (p.name == name) return p;
  return std::nullopt;
}

/// Executes a scenario description. Invalid configurations raise Error (the
/// caller maps them to a parse failure); numerical outcomes are recorded as
/// assertions.
class ScenarioRunner {
 public:
  ScenarioRunner(json cfg, std::filesystem::path base_dir = {}) : cfg_(std::move(cfg)), base_dir_(std::move(base_dir)) {
    if (!cfg_.is_object()) fail(ErrorCode::parse_error, "scenario must be a JSON object");
    for (const auto& [k, v] : cfg_.items())
      if (k != "name" && k != "description" && k != "complex" && k != "base" && k != "reps" && k != "steps" &&
          k != "tolerances" && k != "seed" && k != "options")
        fail(ErrorCode::parse_error, "unknown scenario key '" + k + "'");
    if (!cfg_.contains("name") || !cfg_["name"].is_string()) fail(ErrorCode::parse_error, "scenario needs a string 'name'");
    if (!cfg_.contains("complex") || !cfg_["complex"].is_string())
      fail(ErrorCode::parse_error, "scenario needs a string 'complex'");
    if (!cfg_.contains("steps") || !cfg_["steps"].is_array() || cfg_["steps"].empty())
      fail(ErrorCode::parse_error, "scenario needs a non-empty 'steps' list");
    std::vector<std::string> seen;
    for (const auto& s : cfg_["steps"]) {
      if (!s.is_string()) fail(ErrorCode::parse_error, "steps must be strings");
      auto name = s.get<std::string>();
      if (std::find(known_steps().begin(), known_steps().end(), name) == known_steps().end())
        fail(ErrorCode::parse_error, "unknown step '" + name + "'");
      if (std::find(seen.begin(), seen.end(), name) != seen.end()) fail(ErrorCode::parse_error, "duplicate step '" + name + "'");
      seen.push_back(name);
    }
    if (cfg_.contains("tolerances")) {
      const auto& t = cfg_["tolerances"];
      if (!t.is_object()) fail(ErrorCode::parse_error, "'tolerances' must be an object");
      std::map<std::string, double*> slots{{"cocycle", &tol_.cocycle},         {"flatness", &tol_.flatness},
                                           {"homotopy", &tol_.homotopy},       {"fingerprint", &tol_.fingerprint},
                                           {"spectrum", &tol_.spectrum},       {"cluster", &tol_.cluster},
                                           {"conjugacy", &tol_.conjugacy},     {"unitarity", &tol_.unitarity},
                                           {"kesten_relative", &tol_.kesten_relative}};
      for (const auto& [k, v] : t.items()) {
        auto it = slots.find(k);
        if (it == slots.end() || !v.is_number()) fail(ErrorCode::parse_error, "bad tolerance '" + k + "'");
        *it->second = v.get<double>();
      }
    }
    seed_ = cfg_.value("seed", 1);
    opts_ = cfg_.value("options", json::object());
    if (!opts_.is_object()) fail(ErrorCode::parse_error, "'options' must be an object");
  }

  Tolerances& tolerances() { return tol_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  RunResult run() {
    setup();
    for (const auto& s : cfg_["steps"]) {
      const auto name = s.get<std::string>();
      try {
        if (name == "pi1") step_pi1();
        else if (name == "holonomy-checks") step_holonomy();
        else if (name == "spectrum") step_spectrum();
        else if (name == "sector-compare") step_sector_compare();
        else if (name == "uniqueness") step_uniqueness();
        else if (name == "identical-particles") step_identical_particles();
        else if (name == "cover") step_cover();
        else if (name == "cover-decompose") step_cover_decompose();
        else if (name == "amenability") step_amenability();
        else if (name == "nonl2") step_nonl2();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::parse_error || e.code() == ErrorCode::invalid_parameter) throw;
        record(name, "completed", false, 0.0, 0.0, "no error", std::string("error: ") + e.what());
      }
    }
    RunResult out;
    json list = json::array();
    int failed = 0;
    for (const auto& a : assertions_) {
      list.push_back({{"step", a.step},
                      {"name", a.name},
                      {"passed", a.passed},
                      {"value", a.value},
                      {"bound", a.bound},
                      {"relation", a.relation},
                      {"oracle", a.oracle}});
      if (!a.passed) ++failed;
    }
    out.passed = failed == 0;
    out.summary = {{"scenario", cfg_["name"]},
                   {"complex", cfg_["complex"]},
                   {"seed", seed_},
                   {"assertions", list},
                   {"counts", {{"total", assertions_.size()}, {"failed", failed}}},
                   {"passed", out.passed},
                   {"results", results_}};
    if (!csv_.empty()) out.files["spectra.csv"] = "sector,index,eigenvalue,multiplicity\n" + csv_;
    out.files["summary.json"] = out.summary.dump(2) + "\n";
    return out;
  }

 private:
  struct Sector {
    std::string name;
    UnitaryRep rep;
  };

  // -- helpers ---------------------------------------------------------------

  void record(const std::string& step, const std::string& name, bool passed, double value, double bound,
              const std::string& relation, const std::string& oracle) {
    assertions_.push_back({step, name, passed, value, bound, relation, oracle});
  }
  void at_most(const std::string& step, const std::string& name, double value, double bound, const std::string& oracle) {
    record(step, name, std::isfinite(value) && value <= bound, value, bound, "<=", oracle);
  }
  void at_least(const std::string& step, const std::string& name, double value, double bound, const std::string& oracle) {
    record(step, name, std::isfinite(value) && value >= bound, value, bound, ">=", oracle);
  }
  void equal(const std::string& step, const std::string& name, double value, double expected, const std::string& oracle) {
    record(step, name, value == expected, value, expected, "==", oracle);
  }

  void add_csv(const std::string& sector, const std::vector<double>& values) {
    auto clusters = cluster_eigenvalues(values, tol_.cluster);
    std::size_t i = 0;
    for (const auto& c : clusters)
      for (int k = 0; k < c.multiplicity; ++k, ++i)
        csv_ += sector + "," + std::to_string(i) + "," + format_double(values[i]) + "," + std::to_string(c.multiplicity) + "\n";
  }

  static json spectrum_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
  }

  std::string resolve_path(const std::string& spec) const {
    if (spec.find(':') == std::string::npos && !base_dir_.empty() && !std::filesystem::exists(spec)) {
      auto p = base_dir_ / spec;
      if (std::filesystem::exists(p)) return p.string();
    }
    return spec;
  }

  void setup() {
    ConfigComplex cx = complex_from_preset(resolve_path(cfg_["complex"].get<std::string>()));
    int base = 0;
    if (cfg_.contains("base")) base = cx.vertex_id(cfg_["base"].get<std::string>());
    pres_.emplace(std::move(cx), base);
    const json reps = cfg_.value("reps", json::array());
    if (reps.is_string() && reps.get<std::string>() == "irreps") {
      const auto& g = pres_->backend().finite_group();
      table_ = character_table(g);
      for (int i = 0; i < table_->irrep_count(); ++i)
        sectors_.push_back({"irrep:" + std::to_string(i), irreducible_representation(g, *table_, i)});
    } else if (reps.is_array()) {
      for (const auto& r : reps) {
        if (!r.is_string()) fail(ErrorCode::parse_error, "rep specs must be strings");
        auto spec = r.get<std::string>();
        auto rep = resolve_rep(resolve_path(spec), *pres_, tol_.unitarity);
        rep.bind(*pres_);  // throws invalid-representation on a mismatch
        sectors_.push_back({spec, rep});
      }
    } else {
      fail(ErrorCode::parse_error, "'reps' must be a list of specs or \"irreps\"");
    }
  }

  Region probe_region() const { return star_region(pres_->complex(), pres_->base(), 1); }

  // -- steps -----------------------------------------------------------------

  void step_pi1() {
    const auto& p = *pres_;
    const auto& cx = p.complex();
    json rels = json::array();
    for (const auto& r : p.simplified_relators()) rels.push_back(format_word(r, p.generator_names()));
    auto ab = abelianize(p.generator_count(), p.simplified_relators());
    json order = p.has_backend() && p.backend().order() ? json(*p.backend().order()) : json(nullptr);
    results_["pi1"] = {{"vertices", cx.vertex_count()},
                       {"edges", cx.edge_count()},
                       {"faces", cx.face_count()},
                       {"betti", cx.cycle_rank()},
                       {"chords", p.chord_count()},
                       {"generators", p.generator_names()},
                       {"relators", rels},
                       {"backend", p.backend_guess()},
                       {"order", order},
                       {"abelianization", {{"free_rank", ab.free_rank}, {"torsion", ab.torsion}}}};
    equal("pi1", "chord count equals first Betti number", p.chord_count(), cx.cycle_rank(), "Euler count |E|-|V|+1");
    if (p.has_backend()) {
      int bad = 0;
      for (int f = 0; f < cx.face_count(); ++f) {
        PathWord w = face_walk(cx, f);
        PathWord based = then(then(p.delta(w.start()), w), p.delta(w.start()).reversed());
        if (!p.backend().is_identity(p.beta(based))) ++bad;
      }
      equal("pi1", "face relators reduce to the identity", bad, 0, "backend word problem");
    }
    if (opts_.contains("expect_backend"))
      record("pi1", "backend is " + opts_["expect_backend"].get<std::string>(), p.backend_guess() == opts_["expect_backend"],
             0.0, 0.0, "==", "group classification");
    if (opts_.contains("expect_order"))
      equal("pi1", "group order", order.is_null() ? -1.0 : order.get<double>(), opts_["expect_order"].get<double>(),
            "coset enumeration");
  }

  void step_holonomy() {
    const auto& p = *pres_;
    const auto& cx = p.complex();
    const int trials = opts_.value("cocycle_trials", 500);
    const int pairs = opts_.value("homotopy_pairs", 60);
    const int len = opts_.value("fingerprint_length", 6);
    std::mt19937_64 rng(seed_);
    json out = json::object();
    std::optional<Region> region;
    try {
      region = probe_region();
    } catch (const Error&) {
    }
    for (const auto& s : sectors_) {
      FlatConnection conn = cocycle_from_rep(p, s.rep);
      json r;
      r["face_defect"] = conn.face_defect();
      at_most("holonomy-checks", s.name + ": flatness", conn.face_defect(), tol_.flatness, "face holonomy vs identity");
      auto coc = verify_cocycle(cx, conn, trials, seed_ + 1, tol_.cocycle);
      r["cocycle"] = {{"trials", coc.trials}, {"max_deviation", coc.max_composition_deviation}};
      at_most("holonomy-checks", s.name + ": cocycle law over " + std::to_string(coc.trials) + " path pairs",
              coc.max_composition_deviation, tol_.cocycle, "transport of concatenation");
      auto hom = verify_homotopy_invariance(p, conn, pairs, seed_ + 2, tol_.homotopy);
      r["homotopy"] = {{"pairs", hom.pairs}, {"backend_checked", hom.backend_checked}, {"max_deviation", hom.max_deviation}};
      at_most("holonomy-checks", s.name + ": homotopy invariance over " + std::to_string(hom.pairs) + " loop pairs",
              hom.max_deviation, tol_.homotopy, "backend-equal loop words");
      equal("holonomy-checks", s.name + ": loop pairs equal in the backend", hom.backend_mismatches, 0, "backend word problem");

      GaugeField gauge = GaugeField::random(cx.vertex_count(), conn.dim(), rng);
      FlatConnection moved = gauge_transform(cx, conn, gauge);
      double fp = fingerprint_distance(equivalence_fingerprint(p, conn, len), equivalence_fingerprint(p, moved, len));
      r["fingerprint_gauge_shift"] = fp;
      at_most("holonomy-checks", s.name + ": fingerprint gauge invariance", fp, tol_.fingerprint, "trace conjugation invariance");

      FlatConnection fixed = tree_gauge_fixed(p, moved);
      double tree_defect = 0.0;
      for (int e = 0; e < cx.edge_count(); ++e)
        if (p.tree().tree_edge[e]) tree_defect = std::max(tree_defect, identity_defect(fixed.edge(e)));
      r["tree_gauge_defect"] = tree_defect;
      at_most("holonomy-checks", s.name + ": tree gauge trivializes tree edges", tree_defect, tol_.unitarity, "tree gauge");

      // Base-point change: conjugation by transport along a connecting path.
      double conj = 0.0;
      int y = cx.vertex_count() - 1;
      PathWord to_y = p.delta(y);
      for (int g = 0; g < p.generator_count(); ++g) {
        PathWord loop = p.generator_loop(g);
        PathWord moved_loop = then(then(to_y.reversed(), loop), to_y);
        Matrix w = transport(conn, to_y);
        conj = std::max(conj, (transport(conn, moved_loop) - w * transport(conn, loop) * w.adjoint()).norm());
      }
      r["base_point_conjugacy"] = conj;
      at_most("holonomy-checks", s.name + ": base-point conjugacy", conj, tol_.homotopy, "transport along connecting path");

      if (region) {
        if (region->small) {
          auto ls = ls_check(cx, conn, *region);
          r["ls_max_defect"] = ls.max_defect;
          record("holonomy-checks", s.name + ": locally trivial on the base star", ls.locally_trivial, ls.max_defect,
                 conn.tol(), "<=", "region tree trivialization");
        }
        double top = 0.0;
        for (int g = 0; g < p.generator_count(); ++g)
          top = std::max(top, topological_operator(cx, conn, p.generator_loop(g), *region).factorization_defect);
        r["topological_factorization_defect"] = top;
        at_most("holonomy-checks", s.name + ": topological operators factorize", top, tol_.homotopy,
                "local move product vs holonomy");
      }
      out[s.name] = r;
    }
    results_["holonomy"] = out;
  }

  /// θ when the complex is a bare cycle and the rep is a character.
  std::optional<double> cycle_phase(const FlatConnection& conn) const {
    const auto& cx = pres_->complex();
    if (cx.face_count() != 0 || cx.cycle_rank() != 1 || conn.dim() != 1) return std::nullopt;
    for (int v = 0; v < cx.vertex_count(); ++v)
      if (cx.degree(v) != 2 || cx.measure(v) != 1.0) return std::nullopt;
    for (const auto& e : cx.edges())
      if (e.weight != 1.0) return std::nullopt;
    cplx h = transport(conn, pres_->generator_loop(0))(0, 0);
    return std::arg(h) / (2.0 * M_PI);
  }

  void check_sector_spectrum(const std::string& name, const FlatConnection& conn, const std::vector<double>& values) {
    at_least("spectrum", name + ": positive semidefinite", values.front(), -1e-10, "min eigenvalue");
    if (auto theta = cycle_phase(conn)) {
      const int n = pres_->complex().vertex_count();
      std::vector<double> closed;
      for (int k = 0; k < n; ++k) closed.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * (k + *theta) / n));
      std::sort(closed.begin(), closed.end());
      at_most("spectrum", name + ": closed-form ring spectrum", spectrum_distance(values, closed), tol_.spectrum,
              "2-2cos(2pi(k+theta)/N)");
    }
  }

  void step_spectrum() {
    const auto& p = *pres_;
    json out = json::object();
    for (const auto& s : sectors_) {
      FlatConnection conn = cocycle_from_rep(p, s.rep);
      auto sp = spectrum(twisted_laplacian(p.complex(), conn), std::nullopt, 1e-8);
      out[s.name] = spectrum_json(sp.values);
      add_csv(s.name, sp.values);
      check_sector_spectrum(s.name, conn, sp.values);
    }
    const int sweep = opts_.value("theta_sweep", 0);
    if (sweep > 0) {
      if (p.generator_count() != 1) fail(ErrorCode::invalid_parameter, "theta sweep needs a single generator");
      json sw = json::object();
      for (int k = 0; k < sweep; ++k) {
        double theta = static_cast<double>(k) / sweep;
        std::string name = "theta=" + std::to_string(k) + "/" + std::to_string(sweep);
        FlatConnection conn = cocycle_from_rep(p, UnitaryRep::character(p.generator_names(), theta));
        auto sp = spectrum(twisted_laplacian(p.complex(), conn), std::nullopt, 1e-8);
        sw[name] = spectrum_json(sp.values);
        add_csv(name, sp.values);
        check_sector_spectrum(name, conn, sp.values);
      }
      results_["theta_sweep"] = sw;
    }
    results_["spectra"] = out;
  }

  void step_sector_compare() {
    std::vector<NamedRep> reps;
    for (const auto& s : sectors_) reps.push_back({s.name, s.rep, ""});
    auto rep = sector_compare(*pres_, reps, tol_.spectrum, opts_.value("fingerprint_length", 6));
    json out = {{"simply_connected", rep.simply_connected}};
    if (rep.simply_connected) {
      out["max_deviation_from_trivial"] = rep.max_deviation_from_trivial;
      at_most("sector-compare", "all sectors reproduce the untwisted spectrum", rep.max_deviation_from_trivial,
              tol_.spectrum, "untwisted dense diagonalization");
    }
    int same_fp = 0, same_spec = 0;
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j) {
        if (!rep.distinct[i][j]) ++same_fp;
        if (!rep.spectra_distinct[i][j]) ++same_spec;
      }
    if (opts_.value("expect_distinct", false))
      equal("sector-compare", "pairwise distinct fingerprints", same_fp, 0, "holonomy traces");
    if (opts_.value("expect_distinct_spectra", false))
      equal("sector-compare", "pairwise distinct spectra", same_spec, 0, "dense diagonalization");
    json fps = json::object();
    for (const auto& s : rep.sectors) {
      json f = json::array();
      for (std::size_t i = 0; i < std::min<std::size_t>(s.fingerprint.size(), 7); ++i) f.push_back(complex_to_json(s.fingerprint[i]));
      fps[s.name] = f;
    }
    out["fingerprint_head"] = fps;
    results_["sector_compare"] = out;
  }

  void step_uniqueness() {
    const auto& p = *pres_;
    const auto& cx = p.complex();
    record("uniqueness", "complex is simply connected", p.simply_connected(), p.simply_connected() ? 1.0 : 0.0, 1.0, "==",
           "fundamental group computation");
    auto base = spectrum(twisted_laplacian(cx, cocycle_from_rep(p, UnitaryRep::trivial(p.generator_names())))).values;
    std::vector<int> dims = opts_.value("uniqueness_dims", std::vector<int>{1, 2});
    const int samples = opts_.value("uniqueness_samples", 3);
    std::mt19937_64 rng(seed_ + 7);
    double worst = 0.0, worst_flat = 0.0;
    int count = 0;
    for (int d : dims)
      for (int k = 0; k < samples; ++k) {
        // Random tree-edge unitaries; chords are then fixed by flatness.
        FlatConnection conn = gauge_transform(cx, cocycle_from_rep(p, UnitaryRep::trivial(p.generator_names(), d)),
                                              GaugeField::random(cx.vertex_count(), d, rng));
        worst_flat = std::max(worst_flat, conn.face_defect());
        auto sp = spectrum(twisted_laplacian(cx, conn)).values;
        worst = std::max(worst, spectrum_distance(sp, repeat_values(base, d)));
        ++count;
      }
    results_["uniqueness"] = {{"connections", count}, {"max_deviation", worst}, {"max_face_defect", worst_flat}};
    at_most("uniqueness", "random flat connections are flat", worst_flat, tol_.unitarity, "face holonomy");
    at_most("uniqueness", "every flat connection reproduces the untwisted spectrum", worst, tol_.spectrum,
            "untwisted dense diagonalization");
  }

  void step_identical_particles() {
    const auto& p = *pres_;
    const auto& g = p.backend().finite_group();
    if (!table_) table_ = character_table(g);
    std::vector<NamedRep> reps;
    int dsq = 0;
    for (int i = 0; i < table_->irrep_count(); ++i) {
      reps.push_back({"irrep:" + std::to_string(i), irreducible_representation(g, *table_, i), statistics_label(*table_, i)});
      dsq += table_->degrees[i] * table_->degrees[i];
    }
    equal("identical-particles", "sum of squared irrep degrees equals the group order", dsq, g.order(), "character table");
    auto rep = sector_compare(p, reps, tol_.spectrum, opts_.value("fingerprint_length", 6));
    int same = 0;
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if (!rep.distinct[i][j]) ++same;
    equal("identical-particles", "sectors have pairwise distinct fingerprints", same, 0, "holonomy traces");
    json out = json::object();
    for (const auto& s : rep.sectors)
      out[s.name] = {{"dimension", s.dim}, {"statistics", s.statistics}, {"spectrum", spectrum_json(s.spectrum)}};
    results_["identical_particles"] = out;
  }

  void step_cover() {
    const auto& p = *pres_;
    const int radius = opts_.value("cover_radius", p.backend().is_finite() ? -1 : 3);
    CoverModel cv = build_cover(p, radius);
    int bad_degree = 0;
    for (int v = 0; v < cv.vertex_count(); ++v)
      if (!cv.boundary(v) && cv.degree(v) != p.complex().degree(cv.base_vertex(v))) ++bad_degree;
    auto comm = verify_gauge_commutes(cv, opts_.value("commutation_trials", 50), seed_ + 3);
    results_["cover"] = {{"radius", radius},
                         {"vertices", cv.vertex_count()},
                         {"fibre", cv.fibre_size()},
                         {"lifted_edges", cv.lifted_edge_count()},
                         {"interior", cv.interior_count()},
                         {"commutation_checks", comm.checks},
                         {"left_right_checks", comm.left_right_checks}};
    equal("cover", "interior cover vertices have the base degree", bad_degree, 0, "covering property");
    equal("cover", "edge moves commute with the right action", comm.violations, 0, "permutation composition");
    equal("cover", "left and right actions commute", comm.left_right_violations, 0, "group associativity");
  }

  void step_cover_decompose() {
    const auto& p = *pres_;
    CoverModel cv = build_cover(p, -1);
    auto comm = verify_gauge_commutes(cv);
    equal("cover-decompose", "edge moves commute with the right action", comm.violations, 0, "permutation composition");
    equal("cover-decompose", "left and right actions commute", comm.left_right_violations, 0, "group associativity");
    auto dec = decompose_cover_spectrum(p, cv, tol_.cluster, false);
    at_most("cover-decompose", "central projectors", dec.projector_defect, 1e-10, "idempotent, orthogonal, complete");
    at_most("cover-decompose", "cover spectrum equals the sum of sector spectra", dec.union_deviation, tol_.cluster,
            "dense diagonalization on both sides");
    json blocks = json::array();
    add_csv("cover", dec.cover_spectrum);
    for (const auto& b : dec.blocks) {
      at_most("cover-decompose", "block " + std::to_string(b.irrep) + " matches its twisted sector", b.deviation,
              tol_.cluster, "dense diagonalization on both sides");
      blocks.push_back({{"irrep", b.irrep}, {"degree", b.degree}, {"statistics", b.statistics}, {"deviation", b.deviation}});
    }
    auto cj = conjugacy_check(p.backend().finite_group(), tol_.conjugacy);
    at_most("cover-decompose", "left and right matrix elements are complex conjugate", cj.max_defect, tol_.conjugacy,
            "central cyclic vectors");
    results_["cover_decompose"] = {{"cover_vertices", cv.vertex_count()},
                                   {"blocks", blocks},
                                   {"union_deviation", dec.union_deviation},
                                   {"conjugacy_defect", cj.max_defect},
                                   {"cover_spectrum", spectrum_json(dec.cover_spectrum)}};
  }

  void step_amenability() {
    const auto& b = pres_->backend();
    std::optional<int> radius;
    if (opts_.contains("kesten_radius")) radius = opts_["kesten_radius"].get<int>();
    auto rep = amenability_report(b, radius);
    results_["amenability"] = {{"backend", rep.backend},
                               {"verdict", rep.verdict},
                               {"reason", rep.reason},
                               {"radii", rep.radii},
                               {"ball_sizes", rep.ball_sizes},
                               {"estimates", rep.estimates},
                               {"extrapolated", rep.extrapolated},
                               {"known_value", rep.known_value ? json(*rep.known_value) : json(nullptr)},
                               {"trivial_sector_excluded", rep.trivial_sector_excluded}};
    record("amenability", "estimates non-decreasing in the radius", rep.monotone, rep.monotone ? 1.0 : 0.0, 1.0, "==",
           "Dirichlet monotonicity");
    if (opts_.contains("expect_verdict"))
      record("amenability", "verdict " + opts_["expect_verdict"].get<std::string>(), rep.verdict == opts_["expect_verdict"],
             0.0, 0.0, "==", "group class");
    double last = rep.estimates.back();
    if (b.is_finite()) {
      equal("amenability", "finite group walk radius", last, 1.0, "constant eigenvector");
    } else if (rep.verdict == "non-amenable" && rep.known_value) {
      at_most("amenability", "walk radius relative error against the exact value", std::abs(last - *rep.known_value) / *rep.known_value,
              tol_.kesten_relative, "regular-tree return probabilities");
    }
    if (opts_.contains("kesten_min"))
      at_least("amenability", "walk radius at the largest ball", last, opts_["kesten_min"].get<double>(), "power iteration");
  }

  void step_nonl2() {
    const auto& p = *pres_;
    const json o = opts_.value("nonl2", json::object());
    const std::string spec = o.value("rep", "trivial");
    UnitaryRep rep = resolve_rep(resolve_path(spec), p, tol_.unitarity);
    const int radius = o.value("support_radius", 2);
    const std::string form_name = o.value("form", "vector");
    if (form_name != "vector" && form_name != "trace") fail(ErrorCode::parse_error, "nonl2 form is vector or trace");
    FormKind form = form_name == "trace" ? FormKind::trace : FormKind::vector;
    auto ball = cayley_ball(p.backend(), radius);
    Vector v = Vector::Zero(rep.dim());
    v(0) = 1.0;
    auto r = non_l2_representation(p, rep, v, ball.elements, form);
    results_["nonl2"] = {{"rep", spec},
                         {"form", form_name},
                         {"support", r.support_size},
                         {"quotient_dim", r.quotient_dim},
                         {"all_ones_gram", r.all_ones},
                         {"left_unitarity_defect", r.left_unitarity_defect},
                         {"right_unitarity_defect", r.right_unitarity_defect},
                         {"left_trace_defect", r.left_trace_defect},
                         {"right_trace_defect", r.right_trace_defect},
                         {"connection_fingerprint_defect", r.connection_fingerprint_defect}};
    if (o.contains("expect_dim")) equal("nonl2", "quotient dimension", r.quotient_dim, o["expect_dim"].get<double>(), "Gram rank");
    at_most("nonl2", "left action unitary", r.left_unitarity_defect, tol_.unitarity, "quotient Gram form");
    at_most("nonl2", "left action equivalent to the representation", r.left_trace_defect, 1e-8, "character comparison");
    at_most("nonl2", "lifted edge moves reproduce the sector connection", r.connection_fingerprint_defect, 1e-8,
            "holonomy traces");
    if (form == FormKind::trace) {
      at_most("nonl2", "right action unitary", r.right_unitarity_defect, tol_.unitarity, "trace form invariance");
      at_most("nonl2", "right action conjugate to the representation", r.right_trace_defect, 1e-8, "character comparison");
      at_most("nonl2", "left and right actions commute", r.left_right_commutator, tol_.unitarity, "quotient matrices");
    }
    if (spec == "trivial" && form == FormKind::vector)
      record("nonl2", "Gram matrix is all ones", r.all_ones, r.all_ones ? 1.0 : 0.0, 1.0, "==", "exact arithmetic");
  }

  json cfg_;
  std::filesystem::path base_dir_;
  Tolerances tol_;
  std::uint64_t seed_ = 1;
  json opts_;
  std::optional<Pi1Presentation> pres_;
  std::optional<CharacterTable> table_;
  std::vector<Sector> sectors_;
  std::vector<Assertion> assertions_;
  json results_ = json::object();
  std::string csv_;
};

inline RunResult run_scenario(const json& cfg, const std::filesystem::path& base_dir = {},
                              std::optional<double> general_tol = std::nullopt, std::optional<std::uint64_t> seed = std::nullopt) {
  ScenarioRunner r(cfg, base_dir);
  if (general_tol) r.tolerances().set_general(*general_tol);
  if (seed) r.set_seed(*seed);
  return r.run();
}

}  // namespace sector_lab
