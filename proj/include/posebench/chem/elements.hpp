#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/error.hpp"

namespace posebench::chem {

// Atomic number. 0 is never a valid element.
using AtomicNumber = std::uint8_t;

inline constexpr std::array<std::string_view, 119> kElementSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si",
    "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu",
    "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru",
    "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",
    "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac",
    "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf",
    "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

inline constexpr AtomicNumber kHydrogen = 1;
inline constexpr AtomicNumber kCarbon = 6;
inline constexpr AtomicNumber kNitrogen = 7;
inline constexpr AtomicNumber kOxygen = 8;

inline std::string_view element_symbol(AtomicNumber z) {
  return z < kElementSymbols.size() ? kElementSymbols[z] : std::string_view{};
}

// Case-insensitive lookup ("CL", "cl" and "Cl" all resolve). Deuterium and
// tritium map to hydrogen.
inline std::optional<AtomicNumber> element_from_symbol(std::string_view sym) {
  std::string s;
  for (char c : sym)
    if (c != ' ') s.push_back(c);
  if (s.empty() || s.size() > 2) return std::nullopt;
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (s.size() == 2) s[1] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[1])));
  if (s == "D" || s == "T") return kHydrogen;
  for (std::size_t z = 1; z < kElementSymbols.size(); ++z)
    if (kElementSymbols[z] == s) return static_cast<AtomicNumber>(z);
  return std::nullopt;
}

inline bool is_hydrogen(AtomicNumber z) { return z == kHydrogen; }

// Row of the periodic table, used for the isoelectronic valence shift.
inline int period_of(AtomicNumber z) {
  if (z <= 2) return 1;
  if (z <= 10) return 2;
  if (z <= 18) return 3;
  if (z <= 36) return 4;
  if (z <= 54) return 5;
  if (z <= 86) return 6;
  return 7;
}

// Allowed neutral valences for the organic subset. Empty for everything
// else (metals, noble gases), which disables implicit hydrogens and valence
// checks for those atoms.
inline std::span<const int> neutral_valences(AtomicNumber z) {
  static constexpr int h[] = {1}, b[] = {3}, c[] = {4}, n[] = {3}, o[] = {2}, f[] = {1};
  static constexpr int si[] = {4}, p[] = {3, 5}, s[] = {2, 4, 6}, cl[] = {1};
  static constexpr int ge[] = {4}, as[] = {3, 5}, se[] = {2, 4, 6}, br[] = {1};
  static constexpr int te[] = {2, 4, 6}, i[] = {1, 3, 5};
  switch (z) {
    case 1: return h;
    case 5: return b;
    case 6: return c;
    case 7: return n;
    case 8: return o;
    case 9: return f;
    case 14: return si;
    case 15: return p;
    case 16: return s;
    case 17: return cl;
    case 32: return ge;
    case 33: return as;
    case 34: return se;
    case 35: return br;
    case 52: return te;
    case 53: return i;
    default: return {};
  }
}

// Valences of a charged atom follow its isoelectronic neighbour in the same
// row (N+ behaves like C, O- like F, C- like N).
inline std::span<const int> allowed_valences(AtomicNumber z, int formal_charge) {
  if (formal_charge != 0) {
    const int shifted = static_cast<int>(z) - formal_charge;
    if (shifted >= 1 && shifted < static_cast<int>(kElementSymbols.size()) &&
        period_of(static_cast<AtomicNumber>(shifted)) == period_of(z)) {
      auto v = neutral_valences(static_cast<AtomicNumber>(shifted));
      if (!v.empty() && !neutral_valences(z).empty()) return v;
    }
  }
  return neutral_valences(z);
}

struct AtomRadii {
  double covalent = 0.0;
  double vdw = 0.0;
  bool operator==(const AtomRadii&) const = default;
};

inline constexpr double kFallbackCovalentRadius = 0.75;
inline constexpr double kFallbackVdwRadius = 1.5;

// Covalent (Cordero 2008, sp3 carbon) and van der Waals (Bondi 1964, with
// 2.00 A for metals Bondi does not list) radii. The same values are shipped
// in data/elements.csv; tests keep the two in sync.
class RadiiTable {
 public:
  static constexpr std::string_view kVersion = "posebench-radii-1";

  RadiiTable() = default;

  static const RadiiTable& builtin() {
    static const RadiiTable table = [] {
      RadiiTable t;
      struct Row {
        AtomicNumber z;
        double cov, vdw;
      };
      static constexpr Row rows[] = {
          {1, 0.31, 1.20},  {2, 0.28, 1.40},  {3, 1.28, 1.82},  {4, 0.96, 1.53},  {5, 0.84, 1.92},
          {6, 0.76, 1.70},  {7, 0.71, 1.55},  {8, 0.66, 1.52},  {9, 0.57, 1.47},  {10, 0.58, 1.54},
          {11, 1.66, 2.27}, {12, 1.41, 1.73}, {13, 1.21, 1.84}, {14, 1.11, 2.10}, {15, 1.07, 1.80},
          {16, 1.05, 1.80}, {17, 1.02, 1.75}, {18, 1.06, 1.88}, {19, 2.03, 2.75}, {20, 1.76, 2.31},
          {21, 1.70, 2.00}, {22, 1.60, 2.00}, {23, 1.53, 2.00}, {24, 1.39, 2.00}, {25, 1.39, 2.00},
          {26, 1.32, 2.00}, {27, 1.26, 2.00}, {28, 1.24, 1.63}, {29, 1.32, 1.40}, {30, 1.22, 1.39},
          {31, 1.22, 1.87}, {32, 1.20, 2.11}, {33, 1.19, 1.85}, {34, 1.20, 1.90}, {35, 1.20, 1.85},
          {36, 1.16, 2.02}, {37, 2.20, 3.03}, {38, 1.95, 2.49}, {39, 1.90, 2.00}, {40, 1.75, 2.00},
          {41, 1.64, 2.00}, {42, 1.54, 2.00}, {43, 1.47, 2.00}, {44, 1.46, 2.00}, {45, 1.42, 2.00},
          {46, 1.39, 1.63}, {47, 1.45, 1.72}, {48, 1.44, 1.58}, {49, 1.42, 1.93}, {50, 1.39, 2.17},
          {51, 1.39, 2.06}, {52, 1.38, 2.06}, {53, 1.39, 1.98}, {54, 1.40, 2.16}, {55, 2.44, 3.43},
          {56, 2.15, 2.68}, {57, 2.07, 2.00}, {74, 1.62, 2.00}, {75, 1.51, 2.00}, {76, 1.44, 2.00},
          {77, 1.41, 2.00}, {78, 1.36, 1.75}, {79, 1.36, 1.66}, {80, 1.32, 1.55}, {81, 1.45, 1.96},
          {82, 1.46, 2.02}, {83, 1.48, 2.07},
      };
      for (const auto& r : rows) t.set(r.z, {r.cov, r.vdw});
      return t;
    }();
    return table;
  }

  // CSV with header "symbol,covalent,vdw". Unlisted elements use the
  // fallback radii.
  static RadiiTable from_csv(std::string_view text) {
    RadiiTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (lineno == 1 && line.rfind("symbol", 0) == 0) continue;
      std::istringstream row(line);
      std::string sym, cov, vdw;
      if (!std::getline(row, sym, ',') || !std::getline(row, cov, ',') || !std::getline(row, vdw, ','))
        throw ParseError("radii table: expected symbol,covalent,vdw", lineno);
      auto z = element_from_symbol(sym);
      if (!z) throw ParseError("radii table: unknown element '" + sym + "'", lineno);
      try {
        t.set(*z, {std::stod(cov), std::stod(vdw)});
      } catch (const std::exception&) {
        throw ParseError("radii table: bad number", lineno);
      }
    }
    return t;
  }

  static RadiiTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open radii table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
  }

  void set(AtomicNumber z, AtomRadii r) { entries_.at(z) = r; }

  bool has(AtomicNumber z) const { return z < entries_.size() && entries_[z].covalent > 0.0; }

  double covalent(AtomicNumber z) const { return has(z) ? entries_[z].covalent : kFallbackCovalentRadius; }
  double vdw(AtomicNumber z) const { return has(z) ? entries_[z].vdw : kFallbackVdwRadius; }

  std::string to_csv() const {
    std::ostringstream out;
    out << "symbol,covalent,vdw\n";
    for (std::size_t z = 1; z < entries_.size(); ++z)
      if (entries_[z].covalent > 0.0)
        out << element_symbol(static_cast<AtomicNumber>(z)) << ',' << entries_[z].covalent << ','
            << entries_[z].vdw << '\n';
    return out.str();
  }

  bool operator==(const RadiiTable&) const = default;

 private:
  std::array<AtomRadii, 119> entries_{};
};

}  // namespace posebench::chem
