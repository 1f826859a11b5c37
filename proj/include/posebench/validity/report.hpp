#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/error.hpp"

namespace posebench::validity {

inline constexpr std::size_t kCheckCount = 24;

inline constexpr std::array<std::string_view, kCheckCount> kCheckNames = {
    "mol_pred_loaded",
    "mol_true_loaded",
    "mol_cond_loaded",
    "sanitization",
    "all_atoms_connected",
    "molecular_formula",
    "molecular_bonds",
    "double_bond_stereochemistry",
    "tetrahedral_chirality",
    "bond_lengths",
    "bond_angles",
    "internal_steric_clash",
    "aromatic_ring_flatness",
    "double_bond_flatness",
    "internal_energy",
    "protein-ligand_maximum_distance",
    "minimum_distance_to_protein",
    "minimum_distance_to_organic_cofactors",
    "minimum_distance_to_inorganic_cofactors",
    "minimum_distance_to_waters",
    "volume_overlap_with_protein",
    "volume_overlap_with_organic_cofactors",
    "volume_overlap_with_inorganic_cofactors",
    "volume_overlap_with_waters",
};

inline std::size_t check_index(std::string_view name) {
  for (std::size_t i = 0; i < kCheckCount; ++i)
    if (kCheckNames[i] == name) return i;
  throw InvalidArgument("unknown check '" + std::string(name) + "'");
}

struct CheckResult {
  bool pass = false;
  std::optional<double> value;
  std::string detail;
  bool operator==(const CheckResult&) const = default;
};

struct CheckConfig {
  double bond_len_rel_tol = 0.25;
  double angle_rel_tol = 0.25;
  double clash_vdw_factor = 0.70;
  int clash_min_separation = 4;
  double inter_vdw_factor = 0.75;
  double max_lig_prot_dist = 5.0;
  double flatness_tol = 0.25;
  double volume_overlap_max = 0.075;
  double grid_spacing = 0.25;
  double strain_ratio_max = 100.0;

  void validate() const {
    auto frac = [](double v, const char* n) {
      if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument(std::string(n) + " must be in (0, 1]");
    };
    auto pos = [](double v, const char* n) {
      if (!(v > 0.0)) throw InvalidArgument(std::string(n) + " must be positive");
    };
    frac(bond_len_rel_tol, "bond_len_rel_tol");
    frac(angle_rel_tol, "angle_rel_tol");
    frac(clash_vdw_factor, "clash_vdw_factor");
    frac(inter_vdw_factor, "inter_vdw_factor");
    frac(volume_overlap_max, "volume_overlap_max");
    pos(max_lig_prot_dist, "max_lig_prot_dist");
    pos(flatness_tol, "flatness_tol");
    pos(grid_spacing, "grid_spacing");
    pos(strain_ratio_max, "strain_ratio_max");
    if (clash_min_separation < 2) throw InvalidArgument("clash_min_separation must be at least 2");
  }
};

// Named outcomes in the fixed order of kCheckNames. Partial reports (from a
// single check family) leave the other slots empty; pb_valid() requires all
// 24 to be present and passing.
class CheckReport {
 public:
  void set(std::string_view name, CheckResult r) { slots_[check_index(name)] = std::move(r); }
  void set(std::string_view name, bool pass, std::optional<double> value = std::nullopt, std::string detail = {}) {
    set(name, CheckResult{pass, value, std::move(detail)});
  }

  bool has(std::string_view name) const { return slots_[check_index(name)].has_value(); }
  const CheckResult& at(std::string_view name) const {
    const auto& s = slots_[check_index(name)];
    if (!s) throw InvalidArgument("check '" + std::string(name) + "' not evaluated");
    return *s;
  }
  const std::optional<CheckResult>& slot(std::size_t i) const { return slots_.at(i); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : slots_) n += s.has_value();
    return n;
  }
  bool complete() const { return size() == kCheckCount; }

  bool pb_valid() const {
    for (const auto& s : slots_)
      if (!s || !s->pass) return false;
    return true;
  }

  std::vector<std::string_view> failed() const {
    std::vector<std::string_view> out;
    for (std::size_t i = 0; i < kCheckCount; ++i)
      if (slots_[i] && !slots_[i]->pass) out.push_back(kCheckNames[i]);
    return out;
  }

  // Fills the slots `other` carries, overwriting.
  CheckReport& merge(const CheckReport& other) {
    for (std::size_t i = 0; i < kCheckCount; ++i)
      if (other.slots_[i]) slots_[i] = other.slots_[i];
    return *this;
  }

  bool operator==(const CheckReport&) const = default;

 private:
  std::array<std::optional<CheckResult>, kCheckCount> slots_{};
};

}  // namespace posebench::validity
