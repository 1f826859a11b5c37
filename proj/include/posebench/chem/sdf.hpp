#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/chem/protein_io.hpp"
#include "posebench/chem/structure.hpp"
#include "posebench/molgraph/stereo.hpp"

namespace posebench::chem {

enum class LigandFormat { sdf, mol };

namespace detail {

inline int charge_from_code(int code) {
  switch (code) {
    case 1: return 3;
    case 2: return 2;
    case 3: return 1;
    case 5: return -1;
    case 6: return -2;
    case 7: return -3;
    default: return 0;
  }
}

inline bool looks_like_bond_line(std::string_view line) {
  int a, b, t;
  return line.size() >= 9 && parse_int(column(line, 0, 3), a) && parse_int(column(line, 3, 6), b) &&
         parse_int(column(line, 6, 9), t);
}

struct SdfAtom {
  AtomicNumber element;
  Vec3 xyz;
  int charge;
};

struct SdfBond {
  int a, b, type, stereo;
};

// Parses one V2000 record starting at `lines[first]`. Returns the index of
// the first line after the record's "M  END".
inline std::size_t parse_v2000_record(const std::vector<std::string_view>& lines, std::size_t first,
                                      LigandInstance& out) {
  auto ln = [&](std::size_t i) -> std::string_view {
    if (i >= lines.size()) throw ParseError("unexpected end of file", i + 1);
    return lines[i];
  };
  out.name = std::string(trim(ln(first)));
  const std::size_t counts_line = first + 3;
  const auto counts = ln(counts_line);
  if (counts.find("V3000") != std::string_view::npos) throw ParseError("V3000 connection tables are not supported", counts_line + 1);
  int natoms = 0, nbonds = 0;
  if (!parse_int(column(counts, 0, 3), natoms) || !parse_int(column(counts, 3, 6), nbonds) || natoms < 0 || nbonds < 0)
    throw ParseError("bad counts line", counts_line + 1);

  std::vector<SdfAtom> atoms;
  std::size_t i = counts_line + 1;
  for (int k = 0; k < natoms; ++k, ++i) {
    const auto line = ln(i);
    if (line.starts_with("M  ") || line.starts_with("$$$$"))
      throw ParseError("atom block shorter than the " + std::to_string(natoms) + " atoms declared in the header", i + 1);
    double x, y, z;
    if (line.size() < 34 || !parse_double(column(line, 0, 10), x) || !parse_double(column(line, 10, 20), y) ||
        !parse_double(column(line, 20, 30), z))
      throw ParseError("malformed atom line", i + 1);
    const auto sym = trim(column(line, 31, 34));
    auto e = element_from_symbol(sym);
    if (!e) throw ParseError("unknown element '" + std::string(sym) + "'", i + 1);
    int code = 0;
    auto chg = trim(column(line, 36, 39));
    if (!chg.empty() && !parse_int(chg, code)) throw ParseError("bad charge field", i + 1);
    atoms.push_back({*e, {x, y, z}, charge_from_code(code)});
  }

  std::vector<SdfBond> bonds;
  for (int k = 0; k < nbonds; ++k, ++i) {
    const auto line = ln(i);
    if (line.starts_with("M  ") || line.starts_with("$$$$") || !looks_like_bond_line(line))
      throw ParseError("bond block shorter than the " + std::to_string(nbonds) + " bonds declared in the header", i + 1);
    SdfBond b{};
    parse_int(column(line, 0, 3), b.a);
    parse_int(column(line, 3, 6), b.b);
    parse_int(column(line, 6, 9), b.type);
    auto st = trim(column(line, 9, 12));
    if (!st.empty() && !parse_int(st, b.stereo)) throw ParseError("bad bond stereo field", i + 1);
    if (b.a < 1 || b.b < 1 || b.a > natoms || b.b > natoms)
      throw ParseError("bond references atom outside 1.." + std::to_string(natoms), i + 1);
    if (b.type < 1 || b.type > 4) throw ParseError("unsupported bond type " + std::to_string(b.type), i + 1);
    bonds.push_back(b);
  }
  if (i < lines.size() && looks_like_bond_line(lines[i]) && !lines[i].starts_with("M  "))
    throw ParseError("more bonds present than the " + std::to_string(nbonds) + " declared in the header", i + 1);

  // Properties block.
  bool have_chg = false;
  std::vector<int> chg_override(atoms.size(), 0);
  for (;; ++i) {
    if (i >= lines.size()) break;
    const auto line = lines[i];
    if (line.starts_with("M  END")) {
      ++i;
      break;
    }
    if (line.starts_with("$$$$")) break;
    if (line.starts_with("M  CHG")) {
      have_chg = true;
      std::istringstream in{std::string(line.substr(6))};
      int n = 0;
      in >> n;
      for (int k = 0; k < n; ++k) {
        int idx = 0, c = 0;
        if (!(in >> idx >> c) || idx < 1 || idx > natoms) throw ParseError("bad M  CHG entry", i + 1);
        chg_override[static_cast<std::size_t>(idx - 1)] = c;
      }
    }
  }
  if (have_chg)
    for (std::size_t k = 0; k < atoms.size(); ++k) atoms[k].charge = chg_override[k];

  // Heavy-atom graph; explicit hydrogens fold into their parent's count.
  std::vector<int> heavy_index(atoms.size(), -1);
  std::vector<molgraph::Atom> gatoms;
  Coords coords;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (is_hydrogen(atoms[k].element)) continue;
    heavy_index[k] = static_cast<int>(gatoms.size());
    gatoms.push_back({atoms[k].element, atoms[k].charge, 0, std::nullopt});
    coords.push_back(atoms[k].xyz);
  }
  std::vector<int> explicit_h(gatoms.size(), 0);
  std::vector<molgraph::Bond> gbonds;
  struct Wedge {
    int center;      // heavy index
    int other;       // heavy index, or -1 for hydrogen
    double dir;      // +1 wedge, -1 hash
  };
  std::vector<Wedge> wedges;
  for (const auto& b : bonds) {
    const int ha = heavy_index[static_cast<std::size_t>(b.a - 1)];
    const int hb = heavy_index[static_cast<std::size_t>(b.b - 1)];
    if (b.type == 1 && (b.stereo == 1 || b.stereo == 6) && ha >= 0)
      wedges.push_back({ha, hb, b.stereo == 1 ? 1.0 : -1.0});
    if (ha >= 0 && hb >= 0) {
      gbonds.push_back({ha, hb, static_cast<molgraph::BondOrder>(b.type), std::nullopt});
    } else if (ha >= 0) {
      ++explicit_h[static_cast<std::size_t>(ha)];
    } else if (hb >= 0) {
      ++explicit_h[static_cast<std::size_t>(hb)];
    }
  }
  molgraph::MolecularGraph g(std::move(gatoms), std::move(gbonds));
  for (int k = 0; k < static_cast<int>(g.size()); ++k)
    g.set_hydrogens(k, explicit_h[static_cast<std::size_t>(k)] +
                           molgraph::implicit_hydrogens(g, k, explicit_h[static_cast<std::size_t>(k)]));

  bool three_d = false;
  for (const auto& a : atoms)
    if (std::abs(a.xyz.z()) > 1e-4) three_d = true;
  if (three_d) {
    molgraph::assign_stereo_from_coords(g, coords);
  } else {
    // Flat drawing: lift wedge/hash partners out of the plane and read
    // parities only for centres that carry a wedge.
    Coords lifted = coords;
    std::vector<bool> centers(g.size(), false);
    for (const auto& w : wedges) {
      centers[static_cast<std::size_t>(w.center)] = true;
      if (w.other >= 0)
        lifted[static_cast<std::size_t>(w.other)].z() += w.dir;
      else
        lifted[static_cast<std::size_t>(w.center)].z() += 0.5 * w.dir;
    }
    molgraph::assign_stereo_from_coords(g, lifted, centers);
  }
  out.graph = std::move(g);
  out.coords = std::move(coords);
  validate_ligand(out);
  return i;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto l = text.substr(pos, nl - pos);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    pos = nl + 1;
  }
  return lines;
}

}  // namespace detail

// All records of an SDF (or the single record of a MOL block).
inline std::vector<LigandInstance> parse_ligands(std::string_view bytes, LigandFormat format = LigandFormat::sdf) {
  const auto lines = detail::split_lines(bytes);
  std::vector<LigandInstance> out;
  std::size_t i = 0;
  while (i < lines.size()) {
    // Trailing blank lines after the last record.
    std::size_t j = i;
    while (j < lines.size() && detail::trim(lines[j]).empty()) ++j;
    if (j >= lines.size()) break;
    LigandInstance lig;
    i = detail::parse_v2000_record(lines, i, lig);
    out.push_back(std::move(lig));
    if (format == LigandFormat::mol) break;
    // Data items up to the record terminator.
    while (i < lines.size() && !lines[i].starts_with("$$$$")) ++i;
    if (i < lines.size()) ++i;
  }
  if (out.empty()) throw ParseError("no molecule records found");
  return out;
}

// First record only.
inline LigandInstance parse_ligand(std::string_view bytes, LigandFormat format = LigandFormat::sdf) {
  return parse_ligands(bytes, format).front();
}

inline std::vector<LigandInstance> read_ligands(const std::string& path) {
  auto fmt = path.size() >= 4 && path.substr(path.size() - 4) == ".mol" ? LigandFormat::mol : LigandFormat::sdf;
  return parse_ligands(read_file(path), fmt);
}

// Minimal V2000 writer (heavy atoms only). Used for fixtures and for
// exporting superposed poses.
inline std::string write_sdf(const LigandInstance& lig) {
  std::ostringstream out;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%10.4f", v);
    return std::string(buf);
  };
  auto num3 = [](int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%3d", v);
    return std::string(buf);
  };
  out << lig.name << "\n  posebench\n\n";
  out << num3(static_cast<int>(lig.graph.size())) << num3(static_cast<int>(lig.graph.bonds().size()))
      << "  0  0  0  0  0  0  0  0999 V2000\n";
  for (std::size_t i = 0; i < lig.graph.size(); ++i) {
    const auto& a = lig.graph.atom(static_cast<int>(i));
    std::string sym(element_symbol(a.element));
    sym.resize(3, ' ');
    out << fmt(lig.coords[i].x()) << fmt(lig.coords[i].y()) << fmt(lig.coords[i].z()) << ' ' << sym
        << " 0  0  0  0  0  0  0  0  0  0  0  0\n";
  }
  for (const auto& b : lig.graph.bonds())
    out << num3(b.a + 1) << num3(b.b + 1) << num3(static_cast<int>(b.order)) << "  0\n";
  std::vector<std::pair<int, int>> charged;
  for (std::size_t i = 0; i < lig.graph.size(); ++i)
    if (lig.graph.atom(static_cast<int>(i)).formal_charge != 0)
      charged.emplace_back(static_cast<int>(i) + 1, lig.graph.atom(static_cast<int>(i)).formal_charge);
  for (std::size_t k = 0; k < charged.size(); k += 8) {
    const std::size_t n = std::min<std::size_t>(8, charged.size() - k);
    out << "M  CHG" << num3(static_cast<int>(n));
    for (std::size_t m = 0; m < n; ++m) out << ' ' << num3(charged[k + m].first) << ' ' << num3(charged[k + m].second);
    out << '\n';
  }
  out << "M  END\n$$$$\n";
  return out.str();
}

}  // namespace posebench::chem
