#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "posebench/chem/protein_io.hpp"
#include "posebench/chem/structure.hpp"

namespace posebench::chem {

// Calendar date (proleptic Gregorian), stored as days since 1970-01-01.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days d) : days_(d) {}

  // Strict ISO-8601 calendar date, YYYY-MM-DD.
  static Date parse(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_int(s.substr(0, 4), y) ||
        !detail::parse_int(s.substr(5, 2), m) || !detail::parse_int(s.substr(8, 2), d))
      throw ParseError("invalid ISO-8601 date '" + std::string(s) + "'");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + std::string(s) + "'");
    return Date(std::chrono::sys_days(ymd));
  }

  std::string to_string() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
  }

  Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }
  std::chrono::sys_days days() const { return days_; }
  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

enum class Regime { unconditional, conditional };

struct PoseRef {
  int seed = 0;
  int sample = 0;
  std::string path;          // predicted ligand (SDF/MOL)
  std::string protein_path;  // predicted protein (PDB/mmCIF); empty -> reuse truth protein
  std::optional<double> confidence;
  bool operator==(const PoseRef&) const = default;
};

struct Annotations {
  std::optional<double> pocket_similarity;
  std::optional<int> ligand_frequency;
  std::optional<double> tanimoto;
  bool operator==(const Annotations&) const = default;
};

struct ManifestEntry {
  std::string id;
  Date release_date;
  std::string truth_path;         // protein structure
  std::string truth_ligand_path;  // ligand SDF
  std::size_t ligand_index = 0;   // record within the SDF under evaluation
  std::string reference_conformer;
  std::vector<PoseRef> poses;
  Regime regime = Regime::unconditional;
  std::optional<std::vector<ResidueKey>> pocket_residues;
  Annotations annotations;
  bool operator==(const ManifestEntry&) const = default;
};

struct BenchmarkManifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;
  bool operator==(const BenchmarkManifest&) const = default;
};

// ---------------------------------------------------------------------------
// JSON schema (see README): paths are stored as written; resolve_paths()
// makes relative ones absolute against the manifest's directory.

inline ManifestEntry entry_from_json(const nlohmann::json& j) {
  ManifestEntry e;
  e.id = j.at("id").get<std::string>();
  e.release_date = Date::parse(j.at("release_date").get<std::string>());
  e.truth_path = j.at("truth_path").get<std::string>();
  e.truth_ligand_path = j.value("truth_ligand_path", std::string{});
  e.ligand_index = j.value("ligand_index", std::size_t{0});
  e.reference_conformer = j.value("reference_conformer", std::string{});
  const auto regime = j.value("regime", std::string("unconditional"));
  if (regime == "unconditional")
    e.regime = Regime::unconditional;
  else if (regime == "conditional")
    e.regime = Regime::conditional;
  else
    throw ParseError("entry " + e.id + ": unknown regime '" + regime + "'");
  std::set<std::pair<int, int>> seen;
  for (const auto& jp : j.at("poses")) {
    PoseRef p;
    p.seed = jp.at("seed").get<int>();
    p.sample = jp.at("sample").get<int>();
    p.path = jp.at("path").get<std::string>();
    p.protein_path = jp.value("protein_path", std::string{});
    if (jp.contains("confidence") && !jp.at("confidence").is_null()) p.confidence = jp.at("confidence").get<double>();
    if (!seen.emplace(p.seed, p.sample).second)
      throw ParseError("entry " + e.id + ": duplicate pose (seed " + std::to_string(p.seed) + ", sample " +
                       std::to_string(p.sample) + ")");
    e.poses.push_back(std::move(p));
  }
  if (j.contains("pocket_residues") && !j.at("pocket_residues").is_null()) {
    std::vector<ResidueKey> keys;
    for (const auto& jr : j.at("pocket_residues"))
      keys.push_back({jr.at("chain").get<std::string>(), jr.at("seq").get<int>(), jr.value("icode", std::string{})});
    e.pocket_residues = std::move(keys);
  }
  if (j.contains("annotations") && !j.at("annotations").is_null()) {
    const auto& a = j.at("annotations");
    auto unit = [&](const char* k) -> std::optional<double> {
      if (!a.contains(k) || a.at(k).is_null()) return std::nullopt;
      const double v = a.at(k).get<double>();
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError("entry " + e.id + ": annotation " + k + " outside [0,1]");
      return v;
    };
    e.annotations.pocket_similarity = unit("pocket_similarity");
    e.annotations.tanimoto = unit("tanimoto");
    if (a.contains("ligand_frequency") && !a.at("ligand_frequency").is_null()) {
      const int f = a.at("ligand_frequency").get<int>();
      if (f < 0) throw ParseError("entry " + e.id + ": ligand_frequency must be nonnegative");
      e.annotations.ligand_frequency = f;
    }
  }
  return e;
}

inline nlohmann::json entry_to_json(const ManifestEntry& e) {
  nlohmann::json poses = nlohmann::json::array();
  for (const auto& p : e.poses) {
    nlohmann::json jp = {{"seed", p.seed}, {"sample", p.sample}, {"path", p.path}};
    if (!p.protein_path.empty()) jp["protein_path"] = p.protein_path;
    if (p.confidence) jp["confidence"] = *p.confidence;
    poses.push_back(std::move(jp));
  }
  nlohmann::json j = {{"id", e.id},
                      {"release_date", e.release_date.to_string()},
                      {"truth_path", e.truth_path},
                      {"truth_ligand_path", e.truth_ligand_path},
                      {"ligand_index", e.ligand_index},
                      {"regime", e.regime == Regime::unconditional ? "unconditional" : "conditional"},
                      {"poses", poses}};
  if (!e.reference_conformer.empty()) j["reference_conformer"] = e.reference_conformer;
  if (e.pocket_residues) {
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& k : *e.pocket_residues) keys.push_back({{"chain", k.chain_id}, {"seq", k.seq_index}, {"icode", k.insertion_code}});
    j["pocket_residues"] = keys;
  }
  nlohmann::json ann = nlohmann::json::object();
  if (e.annotations.pocket_similarity) ann["pocket_similarity"] = *e.annotations.pocket_similarity;
  if (e.annotations.ligand_frequency) ann["ligand_frequency"] = *e.annotations.ligand_frequency;
  if (e.annotations.tanimoto) ann["tanimoto"] = *e.annotations.tanimoto;
  if (!ann.empty()) j["annotations"] = ann;
  return j;
}

inline BenchmarkManifest manifest_from_json(const nlohmann::json& j) {
  BenchmarkManifest m;
  m.dataset_name = j.at("dataset_name").get<std::string>();
  for (const auto& je : j.at("entries")) m.entries.push_back(entry_from_json(je));
  return m;
}

inline nlohmann::json manifest_to_json(const BenchmarkManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) entries.push_back(entry_to_json(e));
  return {{"dataset_name", m.dataset_name}, {"entries", entries}};
}

inline BenchmarkManifest parse_manifest(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(std::string("manifest is not valid JSON: ") + ex.what());
  }
  try {
    return manifest_from_json(j);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("manifest schema error: ") + ex.what());
  }
}

inline void resolve_paths(BenchmarkManifest& m, const std::filesystem::path& base) {
  auto fix = [&](std::string& p) {
    if (p.empty()) return;
    std::filesystem::path fp(p);
    if (fp.is_relative()) p = (base / fp).lexically_normal().string();
  };
  for (auto& e : m.entries) {
    fix(e.truth_path);
    fix(e.truth_ligand_path);
    fix(e.reference_conformer);
    for (auto& p : e.poses) {
      fix(p.path);
      fix(p.protein_path);
    }
  }
}

inline BenchmarkManifest load_manifest(const std::string& path) {
  auto m = parse_manifest(read_file(path));
  resolve_paths(m, std::filesystem::path(path).parent_path());
  return m;
}

// ---------------------------------------------------------------------------

enum class DateMode { on_or_after, after };

inline BenchmarkManifest filter_by_release_date(const BenchmarkManifest& m, Date cutoff, DateMode mode) {
  BenchmarkManifest out{m.dataset_name, {}};
  for (const auto& e : m.entries) {
    const bool keep = mode == DateMode::on_or_after ? e.release_date >= cutoff : e.release_date > cutoff;
    if (keep) out.entries.push_back(e);
  }
  return out;
}

struct PoseRejection {
  std::string entry_id;
  std::string reason;
};

// Keeps the first `required` poses in (seed, sample) order, or rejects the
// entry when fewer are available.
inline std::variant<ManifestEntry, PoseRejection> normalize_poses(const ManifestEntry& entry, int required = 20) {
  if (required <= 0) throw InvalidArgument("required pose count must be positive");
  if (entry.poses.size() < static_cast<std::size_t>(required))
    return PoseRejection{entry.id, "has " + std::to_string(entry.poses.size()) + " poses, " +
                                       std::to_string(required) + " required"};
  ManifestEntry out = entry;
  std::stable_sort(out.poses.begin(), out.poses.end(), [](const PoseRef& a, const PoseRef& b) {
    return std::tie(a.seed, a.sample) < std::tie(b.seed, b.sample);
  });
  out.poses.resize(static_cast<std::size_t>(required));
  return out;
}

// A template may be used when it was released no later than the hard
// cutoff and more than 60 days before the test structure.
inline bool template_eligible(Date template_release, Date test_release, Date hard_cutoff) {
  return template_release <= hard_cutoff && template_release.plus_days(60) < test_release;
}

}  // namespace posebench::chem
