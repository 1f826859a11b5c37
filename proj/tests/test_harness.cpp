#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <unistd.h>

#include "bench_fixture.hpp"
#include "oracles.hpp"

using namespace posebench;
using namespace posebench::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("posebench_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PoseMetrics pose(const std::string& id, int seed, int sample, double rmsd, bool pb, double lddt = 0.5) {
  PoseMetrics p;
  p.entry_id = id;
  p.seed = seed;
  p.sample = sample;
  p.evaluated = true;
  p.rmsd = rmsd;
  p.pb_valid = pb;
  p.lddt_pli = lddt;
  for (auto n : validity::kCheckNames) p.checks.set(n, pb);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, ParsesKeyValueText) {
  const auto c = parse_run_config(
      "# comment\n"
      "k_values = 1, 3\n"
      "\n"
      "bootstrap_iters = 50   # trailing\n"
      "release_cutoff = 2021-10-01\n"
      "release_mode = after\n"
      "lddt_thresholds = 0.5,1,2,4\n"
      "superpose = all\n");
  EXPECT_EQ(c.k_values, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.bootstrap_iters, 50);
  ASSERT_TRUE(c.release_cutoff.has_value());
  EXPECT_EQ(c.release_cutoff->to_string(), "2021-10-01");
  EXPECT_EQ(c.release_mode, chem::DateMode::after);
  EXPECT_FALSE(c.rmsd.ca_only);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_run_config("k_values = 1\nnot_a_key = 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_run_config("k_values = 1,25\n"), InvalidArgument);
  EXPECT_THROW(parse_run_config("just text\n"), ParseError);
  EXPECT_THROW(parse_run_config("bootstrap_iters = many\n"), ParseError);
}

TEST(Config, EnvironmentOverrides) {
  RunConfig c;
  ::setenv("POSEBENCH_WORKERS", "3", 1);
  ::setenv("POSEBENCH_OUT", "/tmp/elsewhere", 1);
  apply_env_overrides(c);
  ::unsetenv("POSEBENCH_WORKERS");
  ::unsetenv("POSEBENCH_OUT");
  EXPECT_EQ(c.workers, 3);
  EXPECT_EQ(c.output_dir, "/tmp/elsewhere");
}

TEST(Config, HashIgnoresSchedulingSettings) {
  RunConfig a, b;
  b.workers = 8;
  b.output_dir = "x";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.bootstrap_seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  // Canonical text parses back to the same configuration.
  EXPECT_EQ(canonical_config(parse_run_config(canonical_config(b))), canonical_config(b));
}

TEST(Config, CriterionNames) {
  for (auto c : kCriteria) EXPECT_EQ(parse_criterion(criterion_name(c)), c);
  EXPECT_EQ(parse_criterion("rmsd1_pb"), Criterion::rmsd1_pb);
  EXPECT_THROW(parse_criterion("RMSD<3"), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Utilities and CSV

TEST(Util, CsvEscapeSplitRoundTrip) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "", "multi\nline"};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
  EXPECT_EQ(csv_split(line), fields);
}

TEST(Util, DoubleFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) EXPECT_EQ(std::stod(fmt_double(v)), v);
  EXPECT_EQ(fmt_fixed(0.126, 2), "0.13");
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
}

TEST(PoseCsv, RoundTrip) {
  std::vector<PoseMetrics> v = {pose("a,b", 0, 1, 0.75, true), pose("c", 2, 0, 3.5, false)};
  v[0].confidence = 0.9;
  PoseMetrics failed;
  failed.entry_id = "d";
  failed.error = "bad \"file\"";
  failed.checks = validity::failed_load_report({false, true, true}, "x");
  v.push_back(failed);
  const auto back = poses_from_csv(poses_to_csv(v));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].entry_id, "a,b");
  EXPECT_EQ(back[0].rmsd, 0.75);
  EXPECT_EQ(back[0].confidence, 0.9);
  EXPECT_TRUE(back[0].pb_valid);
  EXPECT_FALSE(back[1].checks.at("bond_lengths").pass);
  EXPECT_FALSE(back[2].evaluated);
  EXPECT_EQ(back[2].error, "bad \"file\"");
  EXPECT_EQ(poses_to_csv(back), poses_to_csv(v));
  EXPECT_THROW(poses_from_csv("header\n1,2\n"), ParseError);
}

TEST(Success, FailedPosesNeverSucceed) {
  auto p = pose("x", 0, 0, 0.1, true);
  EXPECT_TRUE(succeeds(p, Criterion::rmsd1_pb));
  p.evaluated = false;
  for (auto c : kCriteria) EXPECT_FALSE(succeeds(p, c));
  EXPECT_EQ(pose_value(p, Criterion::lddt_pli), 0.0);
  EXPECT_FALSE(succeeds(pose("x", 0, 0, 1.0, true), Criterion::rmsd1));
  EXPECT_FALSE(succeeds(pose("x", 0, 0, 2.0, true), Criterion::rmsd2));
}

// ---------------------------------------------------------------------------
// Stratification and comparison

TEST(Stratify, BinsAndExclusions) {
  std::vector<PoseMetrics> poses;
  std::map<std::string, chem::Annotations> ann;
  const std::vector<std::pair<std::string, std::optional<double>>> sims = {
      {"a", 0.0}, {"b", 0.2}, {"c", 0.7999}, {"d", 1.0}, {"e", std::nullopt}, {"f", 0.35}};
  for (const auto& [id, s] : sims) {
    poses.push_back(pose(id, 0, 0, id == "a" ? 0.5 : 3.0, true));
    poses.push_back(pose(id, 0, 1, 3.0, true));
    ann[id].pocket_similarity = s;
  }
  sort_poses(poses);
  const auto r = stratify(poses, ann, StratificationSpec::defaults(StratAxis::pocket_similarity), Criterion::rmsd2, 1, 100);
  ASSERT_EQ(r.bins.size(), 5u);
  EXPECT_EQ(r.bins[0].label, "[0,0.2)");
  EXPECT_EQ(r.bins[4].label, "[0.8,1]");
  EXPECT_EQ(r.bins[0].n, 1);
  EXPECT_EQ(r.bins[1].n, 2);  // 0.2 and 0.35
  EXPECT_EQ(r.bins[2].n, 0);
  EXPECT_FALSE(r.bins[2].mean.has_value());
  EXPECT_EQ(r.bins[3].n, 1);
  EXPECT_EQ(r.bins[4].n, 1);
  EXPECT_EQ(r.bins[0].mean, 0.5);
  EXPECT_EQ(r.excluded, std::vector<std::string>{"e"});
}

TEST(Stratify, FrequencyLabels) {
  const auto s = StratificationSpec::defaults(StratAxis::ligand_frequency);
  EXPECT_EQ(s.label(0), "0");
  EXPECT_EQ(s.label(1), "1-10");
  EXPECT_EQ(s.label(2), ">10");
  EXPECT_EQ(s.bin_of(0), 0u);
  EXPECT_EQ(s.bin_of(10), 1u);
  EXPECT_EQ(s.bin_of(11), 2u);
  EXPECT_EQ(s.bin_of(5000), 2u);
  EXPECT_THROW((StratificationSpec{StratAxis::tanimoto, {0.5, 0.2}}.validate()), InvalidArgument);
}

TEST(Compare, PairedTestOverSharedEntries) {
  std::vector<PoseMetrics> a, b;
  for (int e = 0; e < 12; ++e) {
    const std::string id = "e" + std::to_string(e);
    a.push_back(pose(id, 0, 0, 0.5, true));
    b.push_back(pose(id, 0, 0, e % 3 == 0 ? 0.5 : 3.0, true));
  }
  const auto r = compare_methods(a, b, 1, Criterion::rmsd2);
  EXPECT_EQ(r.n, 12);
  EXPECT_NEAR(r.delta_mean, 8.0 / 12.0, 1e-15);
  EXPECT_LT(r.p, 0.001);
  EXPECT_EQ(r.stars, "***");
  const auto rev = compare_methods(b, a, 1, Criterion::rmsd2);
  EXPECT_GT(rev.p, 0.5);
  EXPECT_EQ(rev.stars, "");
  const auto boot = compare_methods(a, b, 1, Criterion::rmsd2, SignificanceMethod::bootstrap, 500, 3);
  EXPECT_EQ(boot.p, 0.0);
  b.pop_back();
  EXPECT_THROW(compare_methods(a, b, 1, Criterion::rmsd2), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Planted fixture benchmark

class PlantedBenchmark : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(scratch("planted"));
    manifest_ = new chem::BenchmarkManifest(chem::load_manifest(fixtures::write_bench_fixture(*dir_ / "in").string()));
    cfg_ = new RunConfig(parse_run_config(read_text(*dir_ / "in" / "config.txt")));
    bundle_ = new ResultsBundle(run_benchmark(*manifest_, *cfg_));
  }
  static void TearDownTestSuite() {
    fs::remove_all(dir_->parent_path());
    delete bundle_;
    delete cfg_;
    delete manifest_;
    delete dir_;
  }
  static const AggregateRow& row(Criterion c, int k) {
    for (const auto& r : bundle_->aggregates)
      if (r.criterion == c && r.k == k) return r;
    throw std::runtime_error("missing row");
  }
  static fs::path* dir_;
  static chem::BenchmarkManifest* manifest_;
  static RunConfig* cfg_;
  static ResultsBundle* bundle_;
};

fs::path* PlantedBenchmark::dir_ = nullptr;
chem::BenchmarkManifest* PlantedBenchmark::manifest_ = nullptr;
RunConfig* PlantedBenchmark::cfg_ = nullptr;
ResultsBundle* PlantedBenchmark::bundle_ = nullptr;

TEST_F(PlantedBenchmark, PosesMatchPlantedOutcomes) {
  ASSERT_EQ(bundle_->poses.size(), 100u);
  std::map<std::tuple<std::string, int, int>, fixtures::PlantedPose> plan;
  for (const auto& e : fixtures::planted_entries())
    for (const auto& p : fixtures::planted_kept(e)) plan[{e.id, p.seed, p.sample}] = p;
  for (const auto& p : bundle_->poses) {
    const auto it = plan.find({p.entry_id, p.seed, p.sample});
    ASSERT_NE(it, plan.end()) << p.entry_id << " " << p.seed;
    const auto& pp = it->second;
    EXPECT_EQ(p.evaluated, !pp.corrupt) << p.entry_id << " " << p.error;
    if (pp.corrupt) continue;
    EXPECT_NEAR(p.rmsd, pp.shift, 2e-3) << p.entry_id;
    EXPECT_EQ(p.pb_valid, !pp.water_clash) << p.entry_id << " " << p.seed << "/" << p.sample;
    if (pp.water_clash) {
      EXPECT_FALSE(p.checks.at("minimum_distance_to_waters").pass);
    }
  }
}

TEST_F(PlantedBenchmark, AggregatesEqualHandEnumeration) {
  // Success counts per entry (fx01..fx05) out of 20:
  //   RMSD<2     0 1 10 20 5     RMSD<2&PB  0 1 8 19 3
  //   RMSD<1     0 1  5 20 0     RMSD<1&PB  0 1 3 19 0
  // best@5 for c successes is 1 - C(20-c,5)/C(20,5), C(20,5) = 15504.
  const std::map<std::pair<Criterion, int>, double> hand = {
      {{Criterion::rmsd2, 1}, 0.36},           {{Criterion::rmsd2_pb, 1}, 0.31},
      {{Criterion::rmsd1, 1}, 0.26},           {{Criterion::rmsd1_pb, 1}, 0.23},
      {{Criterion::rmsd2, 5}, 47133.0 / 77520}, {{Criterion::rmsd2_pb, 5}, 43408.0 / 77520},
      {{Criterion::rmsd1, 5}, 31881.0 / 77520}, {{Criterion::rmsd1_pb, 5}, 28696.0 / 77520},
      {{Criterion::rmsd2, 20}, 0.8},           {{Criterion::rmsd2_pb, 20}, 0.8},
      {{Criterion::rmsd1, 20}, 0.6},           {{Criterion::rmsd1_pb, 20}, 0.6}};
  for (const auto& [key, v] : hand) {
    EXPECT_EQ(row(key.first, key.second).mean, v) << criterion_name(key.first) << " k=" << key.second;
    EXPECT_EQ(row(key.first, key.second).n_structures, 5);
  }
  // Same numbers from subset enumeration over the planted flags.
  for (auto c : kCriteria) {
    if (!is_binary(c)) continue;
    std::vector<std::vector<bool>> flags;
    for (const auto& e : fixtures::planted_entries()) {
      std::vector<bool> f;
      for (const auto& p : fixtures::planted_kept(e)) f.push_back(fixtures::planted_success(p, criterion_name(c)));
      flags.push_back(f);
    }
    for (int k : {1, 5, 20}) EXPECT_EQ(row(c, k).mean, oracles::to_double(oracles::enumerate_mean(flags, k))) << criterion_name(c) << k;
  }
}

TEST_F(PlantedBenchmark, LddtAggregateMatchesPoseValues) {
  for (int k : {1, 5, 20}) {
    double sum = 0.0;
    for (const auto& [id, g] : group_by_entry(bundle_->poses)) {
      std::vector<double> v;
      for (const auto* p : g) v.push_back(p->evaluated ? p->lddt_pli : 0.0);
      sum += oracles::enumerate_expected_max(v, k);
    }
    EXPECT_NEAR(row(Criterion::lddt_pli, k).mean, sum / 5.0, 1e-12);
  }
}

TEST_F(PlantedBenchmark, LatticeAndMonotonicity) {
  for (int k : cfg_->k_values) {
    EXPECT_LE(row(Criterion::rmsd1_pb, k).mean, row(Criterion::rmsd1, k).mean);
    EXPECT_LE(row(Criterion::rmsd1, k).mean, row(Criterion::rmsd2, k).mean);
    EXPECT_LE(row(Criterion::rmsd1_pb, k).mean, row(Criterion::rmsd2_pb, k).mean);
    EXPECT_LE(row(Criterion::rmsd2_pb, k).mean, row(Criterion::rmsd2, k).mean);
  }
  for (auto c : kCriteria) {
    EXPECT_LE(row(c, 1).mean, row(c, 5).mean);
    EXPECT_LE(row(c, 5).mean, row(c, 20).mean);
  }
}

TEST_F(PlantedBenchmark, NormalizationAndStratification) {
  EXPECT_TRUE(bundle_->rejected.empty());
  EXPECT_TRUE(bundle_->skipped.empty());
  int fx01 = 0;
  for (const auto& p : bundle_->poses) fx01 += p.entry_id == "fx01";
  EXPECT_EQ(fx01, 20);
  ASSERT_FALSE(bundle_->stratified.empty());
  EXPECT_EQ(bundle_->stratified.front().axis, StratAxis::pocket_similarity);
  EXPECT_EQ(bundle_->max_confidence.size(), 4u);
}

TEST_F(PlantedBenchmark, RunsAreByteIdentical) {
  write_run(*bundle_, *cfg_, *dir_ / "run1", manifest_);
  auto cfg2 = *cfg_;
  cfg2.workers = 4;
  write_run(run_benchmark(*manifest_, cfg2), cfg2, *dir_ / "run2", manifest_);
  for (const char* f : {"poses.csv", "checks.csv", "aggregates.json", "stratified.json", "run.json"})
    EXPECT_EQ(read_text(*dir_ / "run1" / f), read_text(*dir_ / "run2" / f)) << f;
  EXPECT_TRUE(fs::exists(*dir_ / "run1" / "timings.csv"));
  EXPECT_TRUE(fs::exists(*dir_ / "run1" / "report" / "index.html"));
}

TEST_F(PlantedBenchmark, ReportAgainstWeakerMethod) {
  write_run(*bundle_, *cfg_, *dir_ / "strong", manifest_);
  // A second "method": the same poses with every RMSD doubled.
  auto weak = *bundle_;
  for (auto& p : weak.poses) p.rmsd *= 2.0;
  weak.aggregates = aggregate_poses(weak.poses, *cfg_);
  write_run(weak, *cfg_, *dir_ / "weak", manifest_);
  const std::vector<MethodResults> methods = {load_method_results(*dir_ / "strong"), load_method_results(*dir_ / "weak")};
  EXPECT_EQ(methods[0].name, "strong");
  const auto files = render_report(methods, {1, 5}, *dir_ / "report");
  EXPECT_EQ(files.size(), 5u);
  const auto table = read_text(*dir_ / "report" / "table_best1.csv");
  EXPECT_NE(table.find("strong,36.0 ± "), std::string::npos) << table;
  const auto svg = read_text(*dir_ / "report" / "chart_best5.svg");
  EXPECT_NE(svg.find("class=\"errbar\""), std::string::npos);
  const auto stars = compute_stars(methods, 5);
  EXPECT_TRUE(stars[0].empty());
  EXPECT_EQ(stars[1].at(Criterion::lddt_pli), "");
}

TEST_F(PlantedBenchmark, ReleaseDateFilters) {
  auto cfg = *cfg_;
  cfg.release_cutoff = chem::Date::parse("2021-10-01");
  cfg.release_mode = chem::DateMode::on_or_after;
  EXPECT_EQ(chem::filter_by_release_date(*manifest_, *cfg.release_cutoff, cfg.release_mode).entries.size(), 5u);
  const auto after = chem::filter_by_release_date(*manifest_, chem::Date::parse("2023-06-01"), chem::DateMode::after);
  ASSERT_EQ(after.entries.size(), 1u);
  EXPECT_EQ(after.entries[0].id, "fx05");
  EXPECT_TRUE(chem::filter_by_release_date(*manifest_, chem::Date::parse("2023-06-02"), chem::DateMode::after).entries.empty());
}

TEST(Runner, MissingTruthIsSkippedNotFatal) {
  const auto dir = scratch("missing");
  auto m = chem::load_manifest(fixtures::write_bench_fixture(dir).string());
  m.entries.resize(2);
  m.entries[1].truth_path = (dir / "nope.pdb").string();
  RunConfig cfg;
  cfg.bootstrap_iters = 20;
  std::vector<std::string> log;
  const auto b = run_benchmark(m, cfg, [&](const std::string& s) { log.push_back(s); });
  ASSERT_EQ(b.skipped.size(), 1u);
  EXPECT_EQ(b.skipped[0].first, "fx02");
  EXPECT_EQ(b.poses.size(), 20u);
  EXPECT_FALSE(log.empty());
  // Too few poses: rejected.
  m.entries[0].poses.resize(10);
  EXPECT_EQ(run_benchmark(m, cfg).rejected.size(), 1u);
  fs::remove_all(dir);
}
