#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "posebench/chem/manifest.hpp"
#include "posebench/chem/protein_io.hpp"
#include "posebench/chem/sdf.hpp"
#include "posebench/geom/metrics.hpp"
#include "posebench/harness/config.hpp"
#include "posebench/harness/pose_metrics.hpp"
#include "posebench/harness/stratify.hpp"
#include "posebench/stats/bootstrap.hpp"
#include "posebench/validity/checks.hpp"

namespace posebench::harness {

inline constexpr std::string_view kVersion = "0.1.0";

// Runs fn(i) for i in [0, n) on `workers` threads. Each index is handled
// exactly once; callers write into per-index slots.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const auto w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

// Organic hetero groups whose every heavy atom sits within `tol` of a
// target-ligand atom are copies of the ligand itself and are removed.
inline void drop_ligand_copies(chem::ComplexStructure& s, double tol = 1.0) {
  if (!s.has_ligand()) return;
  const auto& lig = s.ligand().coords;
  auto coincident = [&](const chem::ResidueSite& r) {
    for (const auto& a : r.atoms) {
      bool near = false;
      for (const auto& x : lig) near = near || (a.coords - x).norm() < tol;
      if (!near) return false;
    }
    return !r.atoms.empty();
  };
  std::erase_if(s.cofactors.organic, coincident);
}

// Reference complex for one manifest entry.
inline chem::ComplexStructure load_truth(const chem::ManifestEntry& e) {
  auto s = chem::read_protein_structure(e.truth_path);
  if (e.truth_ligand_path.empty()) throw Error("entry " + e.id + " has no truth_ligand_path");
  s.ligands = chem::read_ligands(e.truth_ligand_path);
  if (e.ligand_index >= s.ligands.size())
    throw Error("entry " + e.id + ": ligand_index " + std::to_string(e.ligand_index) + " out of range");
  s.target_ligand = e.ligand_index;
  drop_ligand_copies(s);
  return s;
}

// Predicted complex: the pose's protein when given (else the reference
// protein and its cofactors) with the first ligand record of the pose file.
inline chem::ComplexStructure load_prediction(const chem::ComplexStructure& truth, const chem::PoseRef& pose) {
  chem::ComplexStructure p;
  if (!pose.protein_path.empty()) {
    p = chem::read_protein_structure(pose.protein_path);
  } else {
    p.chains = truth.chains;
    p.cofactors = truth.cofactors;
  }
  p.ligands = {chem::read_ligands(pose.path).front()};
  p.target_ligand = 0;
  drop_ligand_copies(p);
  return p;
}

struct EvalContext {
  const RunConfig* config;
  const chem::RadiiTable* radii;
};

inline PoseMetrics evaluate_pose(const chem::ComplexStructure& truth, const chem::LigandInstance* reference,
                                 const chem::ManifestEntry& e, const chem::PoseRef& pose, const EvalContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  PoseMetrics m;
  m.entry_id = e.id;
  m.seed = pose.seed;
  m.sample = pose.sample;
  m.confidence = pose.confidence;
  auto finish = [&] {
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
  };
  chem::ComplexStructure pred;
  if (!pose.protein_path.empty()) {
    try {
      pred = chem::read_protein_structure(pose.protein_path);
    } catch (const std::exception& ex) {
      m.error = ex.what();
      m.checks = validity::failed_load_report({true, true, false}, m.error);
      return finish();
    }
  } else {
    pred.chains = truth.chains;
    pred.cofactors = truth.cofactors;
  }
  try {
    pred.ligands = {chem::read_ligands(pose.path).front()};
    pred.target_ligand = 0;
    drop_ligand_copies(pred);
  } catch (const std::exception& ex) {
    m.error = ex.what();
    m.checks = validity::failed_load_report({false, true, true}, m.error);
    return finish();
  }
  try {
    m.checks = validity::run_all_checks(truth, pred, ctx.config->checks, *ctx.radii, reference);
    m.pb_valid = m.checks.pb_valid();
    m.rmsd = geom::bisy_rmsd(truth, pred, ctx.config->rmsd);
    m.lddt_pli = geom::lddt_pli(truth, pred, ctx.config->lddt);
    m.evaluated = true;
  } catch (const std::exception& ex) {
    m.error = ex.what();
    m.evaluated = false;
    m.rmsd = std::numeric_limits<double>::quiet_NaN();
    m.lddt_pli = 0.0;
    if (!m.checks.complete()) m.checks = validity::failed_load_report({}, m.error);
  }
  return finish();
}

struct AggregateRow {
  Criterion criterion;
  int k = 1;
  double mean = 0.0;            // exact best@k average
  double bootstrap_mean = 0.0;
  double sem = 0.0;
  int n_structures = 0;
};

struct ConfidenceRow {
  Criterion criterion;
  double mean = 0.0;
  double sem = 0.0;
  int n_structures = 0;
};

struct ResultsBundle {
  std::string dataset;
  std::vector<PoseMetrics> poses;  // sorted by (entry_id, seed, sample)
  std::vector<AggregateRow> aggregates;
  std::vector<ConfidenceRow> max_confidence;  // only when every pose carries a confidence
  std::vector<StratifiedResult> stratified;
  std::map<std::string, chem::Annotations> annotations;
  std::vector<std::pair<std::string, std::string>> skipped;  // (entry, reason)
  std::vector<chem::PoseRejection> rejected;
  double wall_time = 0.0;
};

inline std::vector<AggregateRow> aggregate_poses(const std::vector<PoseMetrics>& poses, const RunConfig& cfg) {
  std::vector<AggregateRow> out;
  const auto groups = group_by_entry(poses);
  if (groups.empty()) return out;
  for (auto c : kCriteria)
    for (int k : cfg.k_values) {
      AggregateRow row{c, k};
      std::vector<double> values;
      std::vector<std::pair<int, int>> counts;
      for (const auto& [id, g] : groups) {
        values.push_back(structure_value(g, c, k));
        int cnt = 0;
        for (const auto* p : g) cnt += succeeds(*p, c);
        counts.emplace_back(static_cast<int>(g.size()), cnt);
      }
      row.mean = is_binary(c) ? stats::mean_best_at_k(counts, k) : stats::mean(values);
      const auto b = stats::bootstrap(values, cfg.bootstrap_iters, cfg.bootstrap_seed, cfg.workers);
      row.bootstrap_mean = b.mean;
      row.sem = b.sem;
      row.n_structures = static_cast<int>(groups.size());
      out.push_back(row);
    }
  return out;
}

inline std::vector<ConfidenceRow> confidence_rows(const std::vector<PoseMetrics>& poses, const RunConfig& cfg) {
  std::vector<ConfidenceRow> out;
  for (const auto& p : poses)
    if (!p.confidence) return out;
  const auto groups = group_by_entry(poses);
  if (groups.empty()) return out;
  for (auto c : kCriteria) {
    if (!is_binary(c)) continue;
    std::vector<double> v;
    for (const auto& [id, g] : groups) v.push_back(*outcome_for(id, g, c).confidence_best_success ? 1.0 : 0.0);
    const auto b = stats::bootstrap(v, cfg.bootstrap_iters, cfg.bootstrap_seed, cfg.workers);
    out.push_back({c, stats::mean(v), b.sem, static_cast<int>(v.size())});
  }
  return out;
}

// Filters and normalises the manifest, evaluates every pose, aggregates.
// Only wall_time fields depend on scheduling.
inline ResultsBundle run_benchmark(const chem::BenchmarkManifest& manifest_in, const RunConfig& cfg,
                                   std::function<void(const std::string&)> log = {}) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  ResultsBundle out;
  out.dataset = manifest_in.dataset_name;
  chem::BenchmarkManifest manifest =
      cfg.release_cutoff ? chem::filter_by_release_date(manifest_in, *cfg.release_cutoff, cfg.release_mode) : manifest_in;

  std::optional<chem::RadiiTable> custom;
  if (!cfg.radii_table.empty()) custom = chem::RadiiTable::from_file(cfg.radii_table);
  const chem::RadiiTable& radii = custom ? *custom : chem::RadiiTable::builtin();

  std::vector<chem::ManifestEntry> entries;
  for (const auto& e : manifest.entries) {
    auto n = chem::normalize_poses(e, cfg.required_poses);
    if (auto* rej = std::get_if<chem::PoseRejection>(&n)) {
      say("rejected " + rej->entry_id + ": " + rej->reason);
      out.rejected.push_back(*rej);
    } else {
      entries.push_back(std::get<chem::ManifestEntry>(std::move(n)));
    }
  }

  // Reference complexes, loaded once per entry.
  std::vector<std::optional<chem::ComplexStructure>> truths(entries.size());
  std::vector<std::optional<chem::LigandInstance>> refs(entries.size());
  std::vector<std::string> truth_errors(entries.size());
  parallel_for(entries.size(), cfg.workers, [&](std::size_t i) {
    try {
      truths[i] = load_truth(entries[i]);
      if (!entries[i].reference_conformer.empty()) refs[i] = chem::read_ligands(entries[i].reference_conformer).front();
    } catch (const std::exception& ex) {
      truths[i].reset();
      truth_errors[i] = ex.what();
    }
  });

  struct Task {
    std::size_t entry;
    std::size_t pose;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!truths[i]) {
      say("skipped " + entries[i].id + ": " + truth_errors[i]);
      out.skipped.emplace_back(entries[i].id, truth_errors[i]);
      continue;
    }
    out.annotations[entries[i].id] = entries[i].annotations;
    for (std::size_t j = 0; j < entries[i].poses.size(); ++j) tasks.push_back({i, j});
  }

  std::vector<PoseMetrics> results(tasks.size());
  const EvalContext ctx{&cfg, &radii};
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t t) {
    const auto& [i, j] = tasks[t];
    results[t] = evaluate_pose(*truths[i], refs[i] ? &*refs[i] : nullptr, entries[i], entries[i].poses[j], ctx);
  });
  sort_poses(results);
  out.poses = std::move(results);
  for (const auto& p : out.poses)
    if (!p.evaluated) say("pose " + p.entry_id + " seed " + std::to_string(p.seed) + " sample " + std::to_string(p.sample) + " failed: " + p.error);

  out.aggregates = aggregate_poses(out.poses, cfg);
  out.max_confidence = confidence_rows(out.poses, cfg);
  for (auto axis : {StratAxis::pocket_similarity, StratAxis::ligand_frequency, StratAxis::tanimoto}) {
    bool any = false;
    for (const auto& [id, a] : out.annotations) any = any || annotation_value(a, axis).has_value();
    if (!any) continue;
    for (auto c : kCriteria)
      for (int k : cfg.k_values)
        out.stratified.push_back(stratify(out.poses, out.annotations, StratificationSpec::defaults(axis), c, k,
                                          cfg.bootstrap_iters, cfg.bootstrap_seed));
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------
// Serialisation

inline nlohmann::ordered_json aggregates_json(const ResultsBundle& b) {
  nlohmann::ordered_json j;
  j["dataset"] = b.dataset;
  j["n_structures"] = b.aggregates.empty() ? 0 : b.aggregates.front().n_structures;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : b.aggregates)
    rows.push_back({{"criterion", criterion_name(r.criterion)},
                    {"k", r.k},
                    {"mean", r.mean},
                    {"bootstrap_mean", r.bootstrap_mean},
                    {"sem", r.sem},
                    {"n_structures", r.n_structures}});
  j["aggregates"] = rows;
  auto conf = nlohmann::ordered_json::array();
  for (const auto& r : b.max_confidence)
    conf.push_back({{"criterion", criterion_name(r.criterion)}, {"mean", r.mean}, {"sem", r.sem}, {"n_structures", r.n_structures}});
  j["max_confidence"] = conf;
  return j;
}

inline nlohmann::ordered_json stratified_json(const std::vector<StratifiedResult>& strat) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : strat) {
    auto bins = nlohmann::ordered_json::array();
    for (const auto& b : s.bins)
      bins.push_back({{"bin", b.label},
                      {"n", b.n},
                      {"mean", b.mean ? nlohmann::ordered_json(*b.mean) : nlohmann::ordered_json(nullptr)},
                      {"sem", b.sem ? nlohmann::ordered_json(*b.sem) : nlohmann::ordered_json(nullptr)}});
    arr.push_back({{"axis", axis_name(s.axis)},
                   {"criterion", criterion_name(s.criterion)},
                   {"k", s.k},
                   {"bins", bins},
                   {"excluded", s.excluded}});
  }
  return arr;
}

// Content hash of every input file the manifest references.
inline nlohmann::ordered_json input_hashes(const chem::BenchmarkManifest& m) {
  std::map<std::string, std::string> h;
  auto add = [&](const std::string& p) {
    if (p.empty() || h.count(p)) return;
    try {
      h[p] = hex64(fnv1a64(read_text(p)));
    } catch (const std::exception&) {
      h[p] = "missing";
    }
  };
  for (const auto& e : m.entries) {
    add(e.truth_path);
    add(e.truth_ligand_path);
    add(e.reference_conformer);
    for (const auto& p : e.poses) {
      add(p.path);
      add(p.protein_path);
    }
  }
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : h) j[std::filesystem::path(k).filename().string() + "@" + hex64(fnv1a64(k)).substr(0, 8)] = v;
  return j;
}

// Writes poses.csv, checks.csv, aggregates.json, stratified.json and
// run.json (deterministic), plus timings.csv and run.log (not).
inline void write_results(const ResultsBundle& b, const RunConfig& cfg, const std::filesystem::path& dir,
                          const chem::BenchmarkManifest* manifest = nullptr) {
  std::filesystem::create_directories(dir);
  const auto poses_csv = poses_to_csv(b.poses);
  const auto checks_csv = checks_to_csv(b.poses);
  const auto agg = aggregates_json(b).dump(2) + "\n";
  const auto strat = stratified_json(b.stratified).dump(2) + "\n";
  write_text(dir / "poses.csv", poses_csv);
  write_text(dir / "checks.csv", checks_csv);
  write_text(dir / "aggregates.json", agg);
  write_text(dir / "stratified.json", strat);

  nlohmann::ordered_json run;
  run["tool"] = "posebench";
  run["version"] = kVersion;
  run["radii_version"] = chem::RadiiTable::kVersion;
  run["config_hash"] = config_hash(cfg);
  run["config"] = canonical_config(cfg);
  run["dataset"] = b.dataset;
  run["n_poses"] = b.poses.size();
  auto skipped = nlohmann::ordered_json::array();
  for (const auto& [id, why] : b.skipped) skipped.push_back({{"entry_id", id}, {"reason", why}});
  run["skipped"] = skipped;
  auto rejected = nlohmann::ordered_json::array();
  for (const auto& r : b.rejected) rejected.push_back({{"entry_id", r.entry_id}, {"reason", r.reason}});
  run["rejected"] = rejected;
  run["inputs"] = manifest ? input_hashes(*manifest) : nlohmann::ordered_json::object();
  run["outputs"] = {{"poses.csv", hex64(fnv1a64(poses_csv))},
                    {"checks.csv", hex64(fnv1a64(checks_csv))},
                    {"aggregates.json", hex64(fnv1a64(agg))},
                    {"stratified.json", hex64(fnv1a64(strat))}};
  write_text(dir / "run.json", run.dump(2) + "\n");

  std::string timings = "entry_id,seed,sample,wall_time_s\n";
  for (const auto& p : b.poses)
    timings += csv_escape(p.entry_id) + "," + std::to_string(p.seed) + "," + std::to_string(p.sample) + "," +
               fmt_fixed(p.wall_time, 6) + "\n";
  write_text(dir / "timings.csv", timings);
  std::string log = "total wall time " + fmt_fixed(b.wall_time, 3) + " s, workers " + std::to_string(cfg.workers) + "\n";
  for (const auto& [id, why] : b.skipped) log += "skipped " + id + ": " + why + "\n";
  for (const auto& r : b.rejected) log += "rejected " + r.entry_id + ": " + r.reason + "\n";
  for (const auto& p : b.poses)
    if (!p.evaluated) log += "failed " + p.entry_id + " " + std::to_string(p.seed) + "/" + std::to_string(p.sample) + ": " + p.error + "\n";
  write_text(dir / "run.log", log);
}

}  // namespace posebench::harness
