// sector-lab: command-line front end for the sector_lab library.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sector_lab/sector_lab.hpp"

namespace fs = std::filesystem;
using namespace sector_lab;

namespace {

struct Globals {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

fs::path output_dir(const Globals& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("SECTOR_LAB_OUT"); env && *env) return env;
  return {};
}

/// Prints to stdout and, when an output directory is configured, also writes `name` there.
void emit(const Globals& g, const std::string& name, const std::string& content) {
  std::cout << content;
  if (auto dir = output_dir(g); !dir.empty()) write_file_atomic(dir / name, content);
}

std::string spectrum_csv(const std::vector<double>& values, double gap) {
  std::string out = "index,eigenvalue,multiplicity\n";
  std::size_t i = 0;
  for (const auto& c : cluster_eigenvalues(values, gap))
    for (int k = 0; k < c.multiplicity; ++k, ++i)
      out += std::to_string(i) + "," + format_double(values[i]) + "," + std::to_string(c.multiplicity) + "\n";
  return out;
}

json spectrum_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Pi1Presentation load(const std::string& spec, const std::string& base) {
  ConfigComplex cx = complex_from_preset(spec);
  int b = base.empty() ? 0 : cx.vertex_id(base);
  return Pi1Presentation(std::move(cx), b);
}

json pi1_json(const Pi1Presentation& p) {
  json rels = json::array();
  for (const auto& r : p.simplified_relators()) rels.push_back(format_word(r, p.generator_names()));
  auto ab = abelianize(p.generator_count(), p.simplified_relators());
  json order = p.has_backend() && p.backend().order() ? json(*p.backend().order()) : json(nullptr);
  json out = {{"base", p.complex().vertex_label(p.base())},
          {"generators", p.generator_names()},
          {"relators", rels},
          {"cycle-rank", p.complex().cycle_rank()},
          {"chords", p.chord_count()},
          {"backend-guess", p.backend_guess()},
          {"order", order},
          {"abelianization", {{"free_rank", ab.free_rank}, {"torsion", ab.torsion}}}};
  if (!p.backend_note().empty()) out["backend-note"] = p.backend_note();
  return out;
}

int run_scenario_command(const Globals& g, const std::string& target) {
  json cfg;
  fs::path base_dir;
  if (auto preset = find_preset(target)) {
    cfg = preset->config;
  } else {
    std::ifstream in(target);
    if (!in) fail(ErrorCode::parse_error, "no preset or scenario file named " + target);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      fail(ErrorCode::parse_error, std::string("invalid scenario JSON: ") + e.what());
    }
    base_dir = fs::path(target).parent_path();
  }
  auto result = run_scenario(cfg, base_dir, g.tol, g.seed);
  fs::path dir = output_dir(g);
  if (dir.empty()) dir = "sector-lab-out";
  dir /= cfg["name"].get<std::string>();
  for (const auto& [name, content] : result.files) write_file_atomic(dir / name, content);
  const auto& counts = result.summary["counts"];
  for (const auto& a : result.summary["assertions"])
    if (!a["passed"].get<bool>())
      std::cerr << "FAIL [" << a["step"].get<std::string>() << "] " << a["name"].get<std::string>() << ": "
                << a["value"].dump() << " " << a["relation"].get<std::string>() << " " << a["bound"].dump() << " ("
                << a["oracle"].get<std::string>() << ")\n";
  std::cout << cfg["name"].get<std::string>() << ": " << counts["total"].get<int>() - counts["failed"].get<int>() << "/"
            << counts["total"].get<int>() << " assertions passed; reports in " << dir.string() << "\n";
  return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum sectors on discretized configuration spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Numerical tolerance for equality checks");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory (default: $SECTOR_LAB_OUT)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string preset, complex, base, rep = "trivial", checks = "cocycle,homotopy,ls,fingerprint", form = "vector";
  std::optional<int> k, radius;
  int support = 2;
  bool full = false;

  auto* build = app.add_subcommand("build", "Emit the canonical complex file for a preset");
  build->add_option("--preset", preset, "cycle:N[:quotient=P] | grid:WxH[:holes=x,y,w,h+...] | present:gens;rels | star:L:N | pair:<preset>")
      ->required();

  auto* pi1 = app.add_subcommand("pi1", "Fundamental group presentation");
  pi1->add_option("complex", complex, "Complex file or preset")->required();
  pi1->add_option("--base", base, "Base vertex label");

  auto* hol = app.add_subcommand("holonomy", "Holonomy checks for a representation");
  hol->add_option("complex", complex)->required();
  hol->add_option("--base", base);
  hol->add_option("--rep", rep, "trivial[:D] | character:theta[,theta...] | irrep:K | rep.json");
  hol->add_option("--check", checks, "Comma list of cocycle,homotopy,ls,fingerprint");

  auto* spec = app.add_subcommand("spectrum", "Spectrum of the twisted Laplacian");
  spec->add_option("complex", complex)->required();
  spec->add_option("--base", base);
  spec->add_option("--rep", rep);
  spec->add_option("--k", k, "Number of lowest eigenvalues (required above the dense cutoff)");

  auto* cov = app.add_subcommand("cover", "Universal cover summary and commutation checks");
  cov->add_option("complex", complex)->required();
  cov->add_option("--base", base);
  auto* ropt = cov->add_option("--radius", radius, "Truncation radius");
  cov->add_flag("--full", full, "Whole finite group")->excludes(ropt);

  auto* dec = app.add_subcommand("decompose", "Cover spectrum decomposed into sectors (finite groups)");
  dec->add_option("complex", complex)->required();
  dec->add_option("--base", base);

  auto* amen = app.add_subcommand("amenability", "Kesten random-walk evidence");
  amen->add_option("complex", complex)->required();
  amen->add_option("--base", base);
  amen->add_option("--radius", radius, "Largest ball radius");

  auto* nl2 = app.add_subcommand("nonl2", "Non-square-integrable construction on a finite support");
  nl2->add_option("complex", complex)->required();
  nl2->add_option("--base", base);
  nl2->add_option("--rep", rep);
  nl2->add_option("--support", support, "Support ball radius (-1: whole finite group)");
  nl2->add_option("--form", form, "vector | trace")->check(CLI::IsMember({"vector", "trace"}));

  std::string target;
  auto* run = app.add_subcommand("run", "Run a scenario file or built-in preset");
  run->add_option("scenario", target, "Scenario JSON file or preset name")->required();

  auto* presets = app.add_subcommand("presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const double tol = g.tol.value_or(kDefaultTol);
    const std::uint64_t seed = g.seed.value_or(1);
    if (*build) {
      emit(g, "complex.txt", write_complex(complex_from_preset(preset)));
    } else if (*pi1) {
      emit(g, "pi1.json", pi1_json(load(complex, base)).dump(2) + "\n");
    } else if (*hol) {
      auto p = load(complex, base);
      auto conn = cocycle_from_rep(p, resolve_rep(rep, p, tol));
      json out = {{"rep", rep}, {"dimension", conn.dim()}, {"face_defect", conn.face_defect()}, {"flat", conn.flat()}};
      bool ok = conn.flat();
      for (const auto& c : detail::split(checks, ',')) {
        if (c == "cocycle") {
          auto r = verify_cocycle(p.complex(), conn, 500, seed, g.tol.value_or(1e-12));
          out["cocycle"] = {{"trials", r.trials}, {"max_deviation", r.max_composition_deviation}, {"passed", r.passed}};
          ok = ok && r.passed;
        } else if (c == "homotopy") {
          auto r = verify_homotopy_invariance(p, conn, 60, seed + 1, tol);
          out["homotopy"] = {{"pairs", r.pairs}, {"max_deviation", r.max_deviation}, {"passed", r.passed}};
          ok = ok && r.passed;
        } else if (c == "ls") {
          auto region = star_region(p.complex(), p.base(), 1);
          if (region.small) {
            auto r = ls_check(p.complex(), conn, region);
            out["ls"] = {{"locally_trivial", r.locally_trivial}, {"max_defect", r.max_defect}, {"region_size", region.vertices.size()}};
            ok = ok && r.locally_trivial;
          } else {
            out["ls"] = {{"skipped", "star of the base vertex is not a small region"}};
          }
        } else if (c == "fingerprint") {
          json f = json::array();
          for (cplx z : equivalence_fingerprint(p, conn)) f.push_back(complex_to_json(z));
          out["fingerprint"] = f;
        } else {
          fail(ErrorCode::parse_error, "unknown check '" + c + "'");
        }
      }
      out["passed"] = ok;
      emit(g, "holonomy.json", out.dump(2) + "\n");
      return ok ? 0 : 1;
    } else if (*spec) {
      auto p = load(complex, base);
      auto conn = cocycle_from_rep(p, resolve_rep(rep, p, tol));
      auto sp = spectrum(twisted_laplacian(p.complex(), conn), k, 1e-8, seed);
      if (g.format == "csv") {
        emit(g, "spectrum.csv", spectrum_csv(sp.values, 1e-8));
      } else {
        json clusters = json::array();
        for (const auto& c : sp.clusters) clusters.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
        emit(g, "spectrum.json",
             json{{"rep", rep}, {"method", sp.method}, {"complete", sp.complete}, {"eigenvalues", spectrum_array(sp.values)},
                  {"clusters", clusters}}
                     .dump(2) +
                 "\n");
      }
    } else if (*cov) {
      auto p = load(complex, base);
      int r = full ? -1 : radius.value_or(p.backend().is_finite() ? -1 : 3);
      auto cv = build_cover(p, r);
      auto comm = verify_gauge_commutes(cv, 50, seed);
      emit(g, "cover.json",
           json{{"radius", r},
                {"fibre", cv.fibre_size()},
                {"vertices", cv.vertex_count()},
                {"lifted_edges", cv.lifted_edge_count()},
                {"interior", cv.interior_count()},
                {"commutation_checks", comm.checks},
                {"commutation_violations", comm.violations},
                {"left_right_violations", comm.left_right_violations},
                {"passed", comm.passed}}
                   .dump(2) +
               "\n");
      return comm.passed ? 0 : 1;
    } else if (*dec) {
      auto p = load(complex, base);
      auto cv = build_cover(p, -1);
      auto d = decompose_cover_spectrum(p, cv, 1e-8, false);
      if (g.format == "csv") {
        emit(g, "cover_spectrum.csv", spectrum_csv(d.cover_spectrum, 1e-8));
      } else {
        json blocks = json::array();
        for (const auto& b : d.blocks)
          blocks.push_back({{"irrep", b.irrep},
                            {"degree", b.degree},
                            {"statistics", b.statistics},
                            {"deviation", b.deviation},
                            {"sector_spectrum", spectrum_array(b.sector_spectrum)}});
        emit(g, "decompose.json",
             json{{"blocks", blocks},
                  {"cover_spectrum", spectrum_array(d.cover_spectrum)},
                  {"union_deviation", d.union_deviation},
                  {"projector_defect", d.projector_defect},
                  {"passed", d.passed}}
                     .dump(2) +
                 "\n");
      }
      return d.passed ? 0 : 1;
    } else if (*amen) {
      auto p = load(complex, base);
      auto r = amenability_report(p.backend(), radius);
      emit(g, "amenability.json",
           json{{"backend", r.backend},
                {"verdict", r.verdict},
                {"reason", r.reason},
                {"radii", r.radii},
                {"ball_sizes", r.ball_sizes},
                {"estimates", r.estimates},
                {"extrapolated", r.extrapolated},
                {"known_value", r.known_value ? json(*r.known_value) : json(nullptr)},
                {"trivial_sector_excluded", r.trivial_sector_excluded}}
                   .dump(2) +
               "\n");
    } else if (*nl2) {
      auto p = load(complex, base);
      auto u = resolve_rep(rep, p, tol);
      Vector v = Vector::Zero(u.dim());
      v(0) = 1.0;
      auto ball = cayley_ball(p.backend(), support);
      auto r = non_l2_representation(p, u, v, ball.elements, form == "trace" ? FormKind::trace : FormKind::vector);
      bool ok = non_l2_passed(r, tol);
      emit(g, "nonl2.json",
           json{{"rep", rep},
                {"form", form},
                {"support", r.support_size},
                {"quotient_dim", r.quotient_dim},
                {"multiplicity", r.multiplicity},
                {"all_ones_gram", r.all_ones},
                {"gram_eigenvalues", spectrum_array(r.gram_eigenvalues)},
                {"left_unitarity_defect", r.left_unitarity_defect},
                {"right_unitarity_defect", r.right_unitarity_defect},
                {"left_right_commutator", r.left_right_commutator},
                {"connection_fingerprint_defect", r.connection_fingerprint_defect},
                {"passed", ok}}
                   .dump(2) +
               "\n");
      return ok ? 0 : 1;
    } else if (*run) {
      return run_scenario_command(g, target);
    } else if (*presets) {
      for (const auto& p : preset_catalog()) std::cout << p.name << "\t" << p.description << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
