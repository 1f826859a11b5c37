// posebench command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "posebench.hpp"

using namespace posebench;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Bad flag values found after CLI11 has accepted the command line.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

void log_line(const std::string& s) { std::cerr << s << "\n"; }

ordered_json optional_number(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json checks_json(const validity::CheckReport& r) {
  ordered_json out = ordered_json::object();
  for (auto name : validity::kCheckNames) {
    if (!r.has(name)) continue;
    const auto& c = r.at(name);
    ordered_json j = {{"pass", c.pass}, {"value", optional_number(c.value)}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    out[std::string(name)] = j;
  }
  return out;
}

harness::RunConfig load_config(const std::string& path) {
  // A bad config file or environment override is a usage error.
  return as_usage([&] {
    harness::RunConfig cfg = path.empty() ? harness::RunConfig{} : harness::parse_run_config(harness::read_text(path));
    harness::apply_env_overrides(cfg);
    return cfg;
  });
}

// One complex pair from files, evaluated the way the benchmark runner does.
struct PairInputs {
  std::string truth, truth_ligand, pred, pred_protein;
  std::size_t ligand_index = 0;
};

void add_pair_options(CLI::App* app, PairInputs& in) {
  app->add_option("--truth", in.truth, "reference protein structure (PDB or mmCIF)")->required()->check(CLI::ExistingFile);
  app->add_option("--truth-ligand", in.truth_ligand, "reference ligand SDF")->required()->check(CLI::ExistingFile);
  app->add_option("--pred", in.pred, "predicted ligand SDF")->required()->check(CLI::ExistingFile);
  app->add_option("--pred-protein", in.pred_protein, "predicted protein structure (default: reuse the reference protein)")
      ->check(CLI::ExistingFile);
  app->add_option("--ligand-index", in.ligand_index, "record of the reference SDF under evaluation");
}

harness::PoseMetrics evaluate_pair(const PairInputs& in, const harness::RunConfig& cfg) {
  chem::ManifestEntry e;
  e.id = fs::path(in.pred).stem().string();
  e.truth_path = in.truth;
  e.truth_ligand_path = in.truth_ligand;
  e.ligand_index = in.ligand_index;
  const auto truth = harness::load_truth(e);
  chem::PoseRef pose{0, 0, in.pred, in.pred_protein, std::nullopt};
  const harness::EvalContext ctx{&cfg, &chem::RadiiTable::builtin()};
  auto m = harness::evaluate_pose(truth, nullptr, e, pose, ctx);
  if (!m.evaluated) throw Error("pose could not be evaluated: " + m.error);
  return m;
}

std::vector<harness::PoseMetrics> read_run_poses(const std::string& dir) {
  return harness::poses_from_csv(harness::read_text(fs::path(dir) / "poses.csv"));
}

std::vector<int> parse_ks(const std::string& s) {
  std::vector<int> ks;
  for (double v : as_usage([&] { return harness::detail::parse_list(s, "k"); })) ks.push_back(static_cast<int>(v));
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pose benchmarking for protein-ligand structure prediction"};
  app.set_version_flag("--version", std::string(harness::kVersion));
  app.require_subcommand(1);

  // bench run ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "benchmark runs");
  bench->require_subcommand(1);
  auto* run = bench->add_subcommand("run", "score every pose of a manifest and write a run directory");
  std::string manifest_path, config_path, out_dir;
  int workers = 0;
  run->add_option("--manifest", manifest_path, "benchmark manifest (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--config", config_path, "run configuration (key = value text)")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: POSEBENCH_OUT or the config's output_dir)");
  run->add_option("--workers", workers, "worker threads (default: POSEBENCH_WORKERS or the config)")->check(CLI::PositiveNumber);

  // score / validate --------------------------------------------------------
  auto* score = app.add_subcommand("score", "symmetry-corrected RMSD of one predicted pose");
  PairInputs score_in;
  bool want_lddt = false, want_checks = false;
  add_pair_options(score, score_in);
  score->add_option("--config", config_path, "run configuration")->check(CLI::ExistingFile);
  score->add_flag("--lddt", want_lddt, "also report lDDT-PLI");
  score->add_flag("--checks", want_checks, "also report the validity checks");

  auto* validate = app.add_subcommand("validate", "run the 24 physical validity checks on one predicted pose");
  PairInputs validate_in;
  add_pair_options(validate, validate_in);
  validate->add_option("--config", config_path, "run configuration")->check(CLI::ExistingFile);

  // pocket ------------------------------------------------------------------
  auto* pocket = app.add_subcommand("pocket", "select pocket residues for conditional-mode inference");
  std::string pocket_truth, pocket_ligand, pocket_id, pocket_manifest, pocket_mode = "per_ligand_atom";
  pocket->add_option("--truth", pocket_truth, "reference protein structure")->check(CLI::ExistingFile);
  pocket->add_option("--truth-ligand", pocket_ligand, "reference ligand SDF")->check(CLI::ExistingFile);
  pocket->add_option("--id", pocket_id, "entry id written to the output");
  pocket->add_option("--manifest", pocket_manifest, "select for every manifest entry instead")->check(CLI::ExistingFile);
  pocket->add_option("--mode", pocket_mode, "median rule")->check(CLI::IsMember({"per_ligand_atom", "all_close_pairs"}));

  // stratify ----------------------------------------------------------------
  auto* strat = app.add_subcommand("stratify", "per-bin aggregates of a finished run");
  std::string strat_run, strat_axis = "pocket_similarity", strat_criterion = "RMSD<2&PB", strat_edges;
  int strat_k = 5, strat_iters = 1000;
  std::uint64_t strat_seed = 0;
  strat->add_option("--run", strat_run, "run directory")->required()->check(CLI::ExistingDirectory);
  strat->add_option("--manifest", manifest_path, "manifest holding the annotations")->required()->check(CLI::ExistingFile);
  strat->add_option("--axis", strat_axis, "pocket_similarity | ligand_frequency | tanimoto");
  strat->add_option("--criterion", strat_criterion, "success criterion");
  strat->add_option("--k", strat_k, "number of poses per structure")->check(CLI::PositiveNumber);
  strat->add_option("--edges", strat_edges, "comma-separated bin edges (default: the axis defaults)");
  strat->add_option("--bootstrap-iters", strat_iters)->check(CLI::PositiveNumber);
  strat->add_option("--seed", strat_seed);

  // compare -----------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "paired one-sided test of method A over method B");
  std::string cmp_a, cmp_b, cmp_criterion = "RMSD<2&PB", cmp_method = "ttest";
  int cmp_k = 5;
  compare->add_option("--a", cmp_a, "run directory of method A")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--b", cmp_b, "run directory of method B")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--criterion", cmp_criterion, "success criterion");
  compare->add_option("--k", cmp_k, "number of poses per structure")->check(CLI::PositiveNumber);
  compare->add_option("--method", cmp_method)->check(CLI::IsMember({"ttest", "bootstrap"}));

  // report ------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "tables and SVG charts across several runs");
  std::vector<std::string> report_runs;
  std::string report_out, report_ks = "1,5";
  report->add_option("--runs", report_runs, "run directories, one per method")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "output directory")->required();
  report->add_option("--k", report_ks, "comma-separated k values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      auto cfg = load_config(config_path);
      if (workers > 0) cfg.workers = workers;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      as_usage([&] {
        cfg.validate();
        return 0;
      });
      const auto manifest = chem::load_manifest(manifest_path);
      const auto bundle = harness::run_benchmark(manifest, cfg, log_line);
      harness::write_run(bundle, cfg, cfg.output_dir, &manifest);
      for (const auto& r : bundle.aggregates)
        std::printf("%-10s best@%-2d %6.2f%% +- %.2f  (n=%d)\n", harness::criterion_name(r.criterion).c_str(), r.k, 100.0 * r.mean,
                    100.0 * r.sem, r.n_structures);
      std::printf("wrote %s\n", cfg.output_dir.c_str());
    } else if (score->parsed() || validate->parsed()) {
      const auto cfg = load_config(config_path);
      const auto m = evaluate_pair(score->parsed() ? score_in : validate_in, cfg);
      ordered_json out;
      if (score->parsed()) {
        out["rmsd"] = m.rmsd;
        if (want_lddt) out["lddt_pli"] = m.lddt_pli;
        if (want_checks) {
          out["pb_valid"] = m.pb_valid;
          out["checks"] = checks_json(m.checks);
        }
      } else {
        out["pb_valid"] = m.pb_valid;
        auto failed = ordered_json::array();
        for (auto n : m.checks.failed()) failed.push_back(std::string(n));
        out["failed"] = failed;
        out["checks"] = checks_json(m.checks);
      }
      std::cout << out.dump(2) << "\n";
    } else if (pocket->parsed()) {
      pocketsel::PocketConfig pc;
      pc.mode = pocket_mode == "all_close_pairs" ? pocketsel::MedianMode::all_close_pairs : pocketsel::MedianMode::per_ligand_atom;
      auto one = [&](const chem::ManifestEntry& e) {
        const auto sel = pocketsel::select_pocket_residues(harness::load_truth(e), pc);
        if (!sel.warning.empty()) log_line(e.id + ": " + sel.warning);
        auto residues = ordered_json::array();
        for (const auto& r : sel.residues)
          residues.push_back({{"chain", r.key.chain_id}, {"seq", r.key.seq_index}, {"name", r.res_name}});
        return ordered_json{{"entry_id", e.id}, {"residues", residues}};
      };
      if (!pocket_manifest.empty()) {
        auto all = ordered_json::array();
        for (const auto& e : chem::load_manifest(pocket_manifest).entries) all.push_back(one(e));
        std::cout << all.dump(2) << "\n";
      } else {
        if (pocket_truth.empty() || pocket_ligand.empty()) throw UsageError("pocket needs --truth and --truth-ligand, or --manifest");
        chem::ManifestEntry e;
        e.id = pocket_id.empty() ? fs::path(pocket_truth).stem().string() : pocket_id;
        e.truth_path = pocket_truth;
        e.truth_ligand_path = pocket_ligand;
        std::cout << one(e).dump(2) << "\n";
      }
    } else if (strat->parsed()) {
      const auto axis = as_usage([&] { return harness::parse_axis(strat_axis); });
      const auto criterion = as_usage([&] { return harness::parse_criterion(strat_criterion); });
      auto spec = harness::StratificationSpec::defaults(axis);
      if (!strat_edges.empty()) spec.edges = as_usage([&] { return harness::detail::parse_list(strat_edges, "edges"); });
      as_usage([&] {
        spec.validate();
        return 0;
      });
      std::map<std::string, chem::Annotations> ann;
      for (const auto& e : chem::load_manifest(manifest_path).entries) ann[e.id] = e.annotations;
      auto poses = read_run_poses(strat_run);
      harness::sort_poses(poses);
      const auto r = harness::stratify(poses, ann, spec, criterion, strat_k, strat_iters, strat_seed);
      std::cout << harness::stratified_json({r}).dump(2) << "\n";
    } else if (compare->parsed()) {
      const auto criterion = as_usage([&] { return harness::parse_criterion(cmp_criterion); });
      const auto how = cmp_method == "bootstrap" ? harness::SignificanceMethod::bootstrap : harness::SignificanceMethod::ttest;
      const auto r = harness::compare_methods(read_run_poses(cmp_a), read_run_poses(cmp_b), cmp_k, criterion, how);
      ordered_json out = {{"criterion", harness::criterion_name(criterion)}, {"k", cmp_k},          {"n", r.n},
                          {"delta_mean", r.delta_mean},                     {"p", r.p},           {"stars", r.stars}};
      std::cout << out.dump(2) << "\n";
    } else if (report->parsed()) {
      std::vector<harness::MethodResults> methods;
      for (const auto& d : report_runs) methods.push_back(harness::load_method_results(d));
      for (const auto& f : harness::render_report(methods, parse_ks(report_ks), report_out)) std::printf("wrote %s\n", f.c_str());
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
