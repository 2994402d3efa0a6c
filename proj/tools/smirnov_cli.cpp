#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smirnov/io.hpp"

using namespace smirnov;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kParse = 2, kInfeasible = 3, kNumerical = 4 };

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return kParse;
    case ErrorCode::InfeasibleTarget: return kInfeasible;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidTree:
    case ErrorCode::CapExceeded:
    case ErrorCode::NotRelativelyPrime:
    case ErrorCode::DenominatorVanishesInDisk:
    case ErrorCode::BoundaryNotReal: return kInvalid;
    default: return kNumerical;
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "io", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return io::parse_text(ss.str(), path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cli", "cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string interval_text(double lo, double hi) {
  return "(" + io::label_number(lo) + ", " + io::label_number(hi) + ")";
}

void print_tree(const tree::PlaneValenceTree& t) {
  for (const auto& n : t.nodes)
    std::cout << "  node " << n.id << "  " << (n.sign == tree::Sign::Plus ? "C+" : "C-") << ": " << n.valence << "\n";
  for (const auto& e : t.edges)
    std::cout << "  edge " << e.a << " -- " << e.b << "  " << interval_text(e.interval.lo, e.interval.hi) << "\n";
}

void print_violations(const tree::ValidationReport& rep) {
  for (const auto& v : rep.violations) {
    std::cout << "  " << tree::to_string(v.kind) << ": " << v.message;
    if (v.witness) std::cout << " (witness " << tree::format_number(*v.witness) << ", coverage " << v.coverage << ")";
    std::cout << "\n";
  }
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  int resolution = 512;
  int samples = 200;
  std::uint64_t seed = 11;
  std::string plot, json_out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  json doc = read_json(a.input);
  // A synthesis result carries its function under "candidate".
  if (doc.is_object() && doc.contains("candidate")) doc = doc["candidate"];
  const RationalRealSmirnov phi = io::function_from_json(doc);
  const auto [vp, vm] = halfplane_valences(phi);
  const auto [dp, dm] = deficiency_indices(phi);

  extract::ExtractOptions opt;
  opt.resolution = a.resolution;
  opt.max_resolution = std::max(opt.max_resolution, a.resolution);
  opt.seed = a.seed;
  const extract::ExtractionResult res = extract::extract_tree(phi, opt);
  const tree::ValenceProfile prof = tree::profile(res.tree);
  const extract::CrosscheckReport cc = extract::crosscheck(phi, res.tree, a.samples, a.seed);

  json means = json::array();
  for (double p : {0.25, 0.75})
    for (double r : {0.9, 0.99}) means.push_back({{"p", p}, {"r", r}, {"M", integral_means(phi, p, r)}});

  std::cout << "input: " << a.input << "\n";
  std::cout << "half-plane valences: (" << vp << ", " << vm << ")\n";
  std::cout << "deficiency indices: (" << dp << ", " << dm << ")\n";
  std::cout << "tree (resolution " << res.resolution << "):\n";
  print_tree(res.tree);
  std::cout << "real profile:\n";
  const auto& b = prof.breakpoints;
  for (std::size_t k = 0; k <= b.size(); ++k) {
    const double lo = k == 0 ? -INFINITY : b[k - 1];
    const double hi = k == b.size() ? INFINITY : b[k];
    std::cout << "  " << interval_text(lo, hi) << "  " << prof.piece_multiplicity[k] << "\n";
    if (k < b.size()) std::cout << "  {" << io::label_number(b[k]) << "}  " << prof.point_multiplicity[k] << "\n";
  }
  std::cout << "crosscheck: " << cc.samples_plus + cc.samples_minus + cc.samples_real << " samples, "
            << cc.mismatches.size() << " mismatches\n";
  std::cout << "integral means:\n";
  for (const auto& m : means)
    std::cout << "  p = " << m["p"].get<double>() << "  r = " << m["r"].get<double>()
              << "  M = " << tree::format_number(m["M"].get<double>()) << "\n";
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  if (!a.plot.empty()) write_text(a.plot, io::render_svg(res));
  if (!a.json_out.empty()) {
    json report = {{"input", a.input},
                   {"function", io::function_to_json(phi)},
                   {"halfplane_valences", {vp, vm}},
                   {"deficiency_indices", {dp, dm}},
                   {"tree", io::tree_to_json(res.tree)},
                   {"resolution", res.resolution},
                   {"profile", io::profile_to_json(prof)},
                   {"crosscheck", io::crosscheck_to_json(cc)},
                   {"integral_means", means},
                   {"warnings", res.warnings}};
    write_json(a.json_out, report);
  }
  if (!cc.ok()) {
    std::cerr << "ExtractionMismatch [cli]: crosscheck found " << cc.mismatches.size() << " mismatches\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_enumerate(int vp, int vm, const std::string& dot_dir, const std::string& json_out) {
  const auto shapes = tree::enumerate_shapes(vp, vm);
  std::cout << shapes.size() << " shapes for (" << vp << ", " << vm << ")\n";
  json all = json::array();
  if (!dot_dir.empty()) fs::create_directories(dot_dir);
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto& s = shapes[k];
    std::cout << "shape " << k + 1 << (s.feasible ? "" : " (infeasible)") << ":\n";
    print_tree(s.tree);
    for (const auto& c : s.constraints) std::cout << "  constraint: " << c.description << "\n";
    all.push_back(io::shape_to_json(s));
    if (!dot_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "shape_%02zu", k + 1);
      write_text((fs::path(dot_dir) / (std::string(name) + ".dot")).string(), io::to_dot(s.tree, name));
    }
  }
  if (!json_out.empty())
    write_json(json_out, {{"v_plus", vp}, {"v_minus", vm}, {"count", shapes.size()}, {"shapes", all}});
  return kOk;
}

int cmd_validate(const std::string& path) {
  const tree::PlaneValenceTree t = io::tree_from_json(read_json(path));
  const tree::ValidationReport rep = tree::validate(t);
  if (rep.ok()) {
    std::cout << "valid\n";
    return kOk;
  }
  std::cout << "invalid: " << rep.violations.size() << " violation(s)\n";
  print_violations(rep);
  return kInvalid;
}

int cmd_synthesize(const std::string& path, long budget, std::uint64_t seed, const std::string& out) {
  const tree::PlaneValenceTree target = io::tree_from_json(read_json(path));
  synth::SearchConfig cfg;
  cfg.budget = budget;
  cfg.seed = seed;
  const synth::SynthesisResult r = synth::synthesize(target, cfg);
  std::cout << "status: " << synth::to_string(r.status) << "\n";
  std::cout << "source: " << r.source << "\n";
  if (r.source == "search") std::cout << "loss: " << tree::format_number(r.loss) << "\n";
  std::cout << "evaluations: " << r.evaluations << "\n";
  if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
  if (r.candidate) {
    std::cout << "extracted:\n";
    print_tree(r.extracted);
  }
  const json j = io::synthesis_to_json(r);
  if (!out.empty()) write_json(out, j);
  return r.status == synth::Status::Failed ? kNumerical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Valence trees of rational real Smirnov functions"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "extract and verify the valence tree of a function");
  analyze->add_option("input", an.input, "function JSON")->required();
  analyze->add_option("--resolution", an.resolution, "initial grid resolution");
  analyze->add_option("--samples", an.samples, "crosscheck samples per family");
  analyze->add_option("--seed", an.seed, "sampling seed");
  analyze->add_option("--plot", an.plot, "write an SVG region plot");
  analyze->add_option("--json", an.json_out, "write the report as JSON");

  int vp = 0, vm = 0;
  std::string dot_dir, enum_json;
  auto* enumerate = app.add_subcommand("enumerate", "list all tree shapes with given half-plane valences");
  enumerate->add_option("v_plus", vp)->required();
  enumerate->add_option("v_minus", vm)->required();
  enumerate->add_option("--dot", dot_dir, "directory for one DOT file per shape");
  enumerate->add_option("--json", enum_json, "write the catalog as JSON");

  std::string tree_path;
  auto* validate = app.add_subcommand("validate-tree", "check a tree against the axioms");
  validate->add_option("tree", tree_path, "tree JSON")->required();

  std::string target_path, out_path;
  long budget = 100000;
  std::uint64_t seed = 1;
  auto* synthesize = app.add_subcommand("synthesize", "find a function realizing a tree");
  synthesize->add_option("tree", target_path, "tree JSON")->required();
  synthesize->add_option("--budget", budget, "loss evaluations for the search");
  synthesize->add_option("--seed", seed, "search seed");
  synthesize->add_option("--out", out_path, "write the result JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;
  }

  try {
    if (*analyze) return cmd_analyze(an);
    if (*enumerate) return cmd_enumerate(vp, vm, dot_dir, enum_json);
    if (*validate) return cmd_validate(tree_path);
    if (*synthesize) return cmd_synthesize(target_path, budget, seed, out_path);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
