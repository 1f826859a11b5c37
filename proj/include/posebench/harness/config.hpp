#pragma once

#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "posebench/chem/manifest.hpp"
#include "posebench/geom/metrics.hpp"
#include "posebench/pocketsel/pocket.hpp"
#include "posebench/harness/util.hpp"
#include "posebench/validity/report.hpp"

namespace posebench::harness {

enum class Criterion { rmsd2, rmsd2_pb, rmsd1, rmsd1_pb, lddt_pli };

inline constexpr std::array<Criterion, 5> kCriteria = {Criterion::rmsd2, Criterion::rmsd2_pb, Criterion::rmsd1,
                                                       Criterion::rmsd1_pb, Criterion::lddt_pli};

inline std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::rmsd2: return "RMSD<2";
    case Criterion::rmsd2_pb: return "RMSD<2&PB";
    case Criterion::rmsd1: return "RMSD<1";
    case Criterion::rmsd1_pb: return "RMSD<1&PB";
    case Criterion::lddt_pli: return "lDDT-PLI";
  }
  return "?";
}

inline Criterion parse_criterion(std::string_view s) {
  for (auto c : kCriteria)
    if (criterion_name(c) == s) return c;
  if (s == "rmsd2") return Criterion::rmsd2;
  if (s == "rmsd2_pb") return Criterion::rmsd2_pb;
  if (s == "rmsd1") return Criterion::rmsd1;
  if (s == "rmsd1_pb") return Criterion::rmsd1_pb;
  if (s == "lddt" || s == "lddt_pli") return Criterion::lddt_pli;
  throw InvalidArgument("unknown criterion '" + std::string(s) + "'");
}

inline bool is_binary(Criterion c) { return c != Criterion::lddt_pli; }

enum class SignificanceMethod { ttest, bootstrap };

struct RunConfig {
  std::vector<int> k_values{1, 5, 20};
  int bootstrap_iters = 1000;
  std::uint64_t bootstrap_seed = 0;
  SignificanceMethod significance = SignificanceMethod::ttest;
  int required_poses = 20;
  std::optional<chem::Date> release_cutoff;
  chem::DateMode release_mode = chem::DateMode::on_or_after;
  validity::CheckConfig checks;
  geom::LddtConfig lddt;
  geom::RmsdConfig rmsd;
  pocketsel::MedianMode pocket_mode = pocketsel::MedianMode::per_ligand_atom;
  std::string radii_table;  // empty: built-in table
  int workers = 1;
  std::string output_dir = "posebench-out";

  void validate() const {
    if (k_values.empty()) throw InvalidArgument("k_values must not be empty");
    for (int k : k_values)
      if (k < 1 || k > required_poses) throw InvalidArgument("k_values must lie in [1, required_poses]");
    if (bootstrap_iters < 1) throw InvalidArgument("bootstrap_iters must be at least 1");
    if (required_poses < 1) throw InvalidArgument("required_poses must be positive");
    if (workers < 1) throw InvalidArgument("workers must be positive");
    checks.validate();
    lddt.validate();
  }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = chem::detail::trim(item);
    double x;
    if (!chem::detail::parse_double(t, x)) throw InvalidArgument(key + ": bad number '" + std::string(t) + "'");
    out.push_back(x);
  }
  return out;
}

inline double as_double(const std::string& v, const std::string& key) {
  double x;
  if (!chem::detail::parse_double(v, x)) throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  return x;
}

inline int as_int(const std::string& v, const std::string& key) {
  int x;
  if (!chem::detail::parse_int(v, x)) throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  return x;
}

inline std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt_double(xs[i]);
  return s;
}

}  // namespace detail

// Applies one `key = value` setting.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "k_values") {
    c.k_values.clear();
    for (double x : parse_list(v, key)) c.k_values.push_back(static_cast<int>(x));
  } else if (key == "bootstrap_iters") {
    c.bootstrap_iters = as_int(v, key);
  } else if (key == "bootstrap_seed") {
    c.bootstrap_seed = std::stoull(v);
  } else if (key == "significance") {
    if (v == "ttest") c.significance = SignificanceMethod::ttest;
    else if (v == "bootstrap") c.significance = SignificanceMethod::bootstrap;
    else throw InvalidArgument("significance must be ttest or bootstrap");
  } else if (key == "required_poses") {
    c.required_poses = as_int(v, key);
  } else if (key == "release_cutoff") {
    c.release_cutoff = v.empty() ? std::nullopt : std::optional(chem::Date::parse(v));
  } else if (key == "release_mode") {
    if (v == "on_or_after") c.release_mode = chem::DateMode::on_or_after;
    else if (v == "after") c.release_mode = chem::DateMode::after;
    else throw InvalidArgument("release_mode must be on_or_after or after");
  } else if (key == "bond_len_rel_tol") {
    c.checks.bond_len_rel_tol = as_double(v, key);
  } else if (key == "angle_rel_tol") {
    c.checks.angle_rel_tol = as_double(v, key);
  } else if (key == "clash_vdw_factor") {
    c.checks.clash_vdw_factor = as_double(v, key);
  } else if (key == "inter_vdw_factor") {
    c.checks.inter_vdw_factor = as_double(v, key);
  } else if (key == "max_lig_prot_dist") {
    c.checks.max_lig_prot_dist = as_double(v, key);
  } else if (key == "flatness_tol") {
    c.checks.flatness_tol = as_double(v, key);
  } else if (key == "volume_overlap_max") {
    c.checks.volume_overlap_max = as_double(v, key);
  } else if (key == "grid_spacing") {
    c.checks.grid_spacing = as_double(v, key);
  } else if (key == "strain_ratio_max") {
    c.checks.strain_ratio_max = as_double(v, key);
  } else if (key == "lddt_radius") {
    c.lddt.inclusion_radius = as_double(v, key);
  } else if (key == "lddt_thresholds") {
    c.lddt.thresholds = parse_list(v, key);
  } else if (key == "site_cutoff") {
    c.rmsd.site_cutoff = as_double(v, key);
  } else if (key == "superpose") {
    if (v == "ca") c.rmsd.ca_only = true;
    else if (v == "all") c.rmsd.ca_only = false;
    else throw InvalidArgument("superpose must be ca or all");
  } else if (key == "max_automorphisms") {
    const int m = as_int(v, key);
    if (m < 1) throw InvalidArgument("max_automorphisms must be positive");
    c.rmsd.max_automorphisms = c.lddt.max_automorphisms = static_cast<std::size_t>(m);
  } else if (key == "pocket_median") {
    if (v == "per_ligand_atom") c.pocket_mode = pocketsel::MedianMode::per_ligand_atom;
    else if (v == "all_close_pairs") c.pocket_mode = pocketsel::MedianMode::all_close_pairs;
    else throw InvalidArgument("pocket_median must be per_ligand_atom or all_close_pairs");
  } else if (key == "radii_table") {
    c.radii_table = v;
  } else if (key == "workers") {
    c.workers = as_int(v, key);
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

// `key = value` lines; '#' starts a comment; blank lines ignored.
inline RunConfig parse_run_config(std::string_view text, RunConfig base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto t = chem::detail::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
    const std::string key(chem::detail::trim(t.substr(0, eq)));
    const std::string val(chem::detail::trim(t.substr(eq + 1)));
    try {
      apply_setting(base, key, val);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    } catch (const std::exception& e) {
      throw ParseError(key + ": " + e.what(), lineno);
    }
  }
  base.validate();
  return base;
}

// POSEBENCH_WORKERS and POSEBENCH_OUT take precedence over the file.
inline void apply_env_overrides(RunConfig& c) {
  if (const char* w = std::getenv("POSEBENCH_WORKERS"); w && *w) apply_setting(c, "workers", w);
  if (const char* o = std::getenv("POSEBENCH_OUT"); o && *o) c.output_dir = o;
}

// Canonical text of every setting that can change results (workers and
// output_dir excluded). Its hash identifies the configuration.
inline std::string canonical_config(const RunConfig& c) {
  std::ostringstream o;
  std::vector<double> ks(c.k_values.begin(), c.k_values.end());
  o << "k_values = " << detail::join(ks) << '\n'
    << "bootstrap_iters = " << c.bootstrap_iters << '\n'
    << "bootstrap_seed = " << c.bootstrap_seed << '\n'
    << "significance = " << (c.significance == SignificanceMethod::ttest ? "ttest" : "bootstrap") << '\n'
    << "required_poses = " << c.required_poses << '\n'
    << "release_cutoff = " << (c.release_cutoff ? c.release_cutoff->to_string() : "") << '\n'
    << "release_mode = " << (c.release_mode == chem::DateMode::on_or_after ? "on_or_after" : "after") << '\n'
    << "bond_len_rel_tol = " << fmt_double(c.checks.bond_len_rel_tol) << '\n'
    << "angle_rel_tol = " << fmt_double(c.checks.angle_rel_tol) << '\n'
    << "clash_vdw_factor = " << fmt_double(c.checks.clash_vdw_factor) << '\n'
    << "inter_vdw_factor = " << fmt_double(c.checks.inter_vdw_factor) << '\n'
    << "max_lig_prot_dist = " << fmt_double(c.checks.max_lig_prot_dist) << '\n'
    << "flatness_tol = " << fmt_double(c.checks.flatness_tol) << '\n'
    << "volume_overlap_max = " << fmt_double(c.checks.volume_overlap_max) << '\n'
    << "grid_spacing = " << fmt_double(c.checks.grid_spacing) << '\n'
    << "strain_ratio_max = " << fmt_double(c.checks.strain_ratio_max) << '\n'
    << "lddt_radius = " << fmt_double(c.lddt.inclusion_radius) << '\n'
    << "lddt_thresholds = " << detail::join(c.lddt.thresholds) << '\n'
    << "site_cutoff = " << fmt_double(c.rmsd.site_cutoff) << '\n'
    << "superpose = " << (c.rmsd.ca_only ? "ca" : "all") << '\n'
    << "max_automorphisms = " << c.rmsd.max_automorphisms << '\n'
    << "pocket_median = " << (c.pocket_mode == pocketsel::MedianMode::per_ligand_atom ? "per_ligand_atom" : "all_close_pairs")
    << '\n'
    << "radii_table = " << c.radii_table << '\n';
  return o.str();
}

inline std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(canonical_config(c))); }

}  // namespace posebench::harness
