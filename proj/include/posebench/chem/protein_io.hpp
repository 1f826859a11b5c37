#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/chem/structure.hpp"

namespace posebench::chem {

enum class StructureFormat { pdb, mmcif };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string_view column(std::string_view line, std::size_t begin, std::size_t end) {
  if (begin >= line.size()) return {};
  return line.substr(begin, std::min(end, line.size()) - begin);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// One atom record as read from either format, before hydrogen removal,
// alternate-location resolution and routing.
struct RawAtom {
  AtomSite site;
  std::string altloc;
  ResidueKey key;
  std::string res_name;
  std::size_t line = 0;
};

inline const std::set<std::string, std::less<>>& water_names() {
  static const std::set<std::string, std::less<>> names = {"HOH", "WAT", "DOD", "H2O", "TIP", "TIP3", "SOL", "D2O"};
  return names;
}

// Standard amino acids plus common modified residues deposited as HETATM.
inline const std::set<std::string, std::less<>>& amino_acid_names() {
  static const std::set<std::string, std::less<>> names = {
      "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET", "PHE",
      "PRO", "SER", "THR", "TRP", "TYR", "VAL", "SEC", "PYL", "MSE", "SEP", "TPO", "PTR", "MLY", "CSO",
      "HYP", "KCX", "LLP", "CME", "OCS", "CSD", "HID", "HIE", "HIP", "CYX", "ASH", "GLH", "LYN"};
  return names;
}

inline AtomicNumber element_from_atom_name(std::string_view raw_name, bool hetero, std::size_t line) {
  // Columns 13-14 hold the element when it is right-justified in a 4-char
  // field: " CA " is carbon alpha, "CA  " is calcium.
  std::string_view name = raw_name;
  if (name.size() >= 2 && name[0] != ' ' && hetero) {
    if (auto z = element_from_symbol(name.substr(0, 2))) return *z;
  }
  auto t = trim(name);
  std::string letters;
  for (char c : t)
    if (std::isalpha(static_cast<unsigned char>(c))) letters.push_back(c);
  if (!letters.empty()) {
    if (auto z = element_from_symbol(letters.substr(0, 1))) return *z;
  }
  throw ParseError("cannot infer element from atom name '" + std::string(t) + "'", line);
}

inline ComplexStructure assemble(std::vector<RawAtom> raw) {
  // Drop hydrogens.
  std::erase_if(raw, [](const RawAtom& a) { return is_hydrogen(a.site.element); });

  // Alternate locations: per (residue, atom name) keep the highest occupancy,
  // ties broken by altloc identifier (blank sorts first).
  std::map<std::tuple<ResidueKey, std::string, std::string>, std::size_t> best;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto id = std::make_tuple(raw[i].key, raw[i].res_name, raw[i].site.name);
    auto [it, inserted] = best.emplace(id, i);
    if (inserted) continue;
    const auto& cur = raw[it->second];
    const auto& cand = raw[i];
    if (cand.site.occupancy > cur.site.occupancy ||
        (cand.site.occupancy == cur.site.occupancy && cand.altloc < cur.altloc))
      it->second = i;
  }
  std::vector<bool> keep(raw.size(), false);
  for (const auto& [id, i] : best) keep[i] = true;

  ComplexStructure out;
  std::map<std::string, std::size_t> chain_index;
  // Group by residue key in order of first appearance.
  std::vector<ResidueSite> residues;
  std::vector<bool> residue_is_protein;
  std::map<std::pair<ResidueKey, std::string>, std::size_t> residue_index;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!keep[i]) continue;
    auto& a = raw[i];
    auto rk = std::make_pair(a.key, a.res_name);
    auto it = residue_index.find(rk);
    if (it == residue_index.end()) {
      it = residue_index.emplace(rk, residues.size()).first;
      ResidueSite r;
      r.key = a.key;
      r.res_name = a.res_name;
      residues.push_back(std::move(r));
      const bool protein = !a.site.is_hetero || amino_acid_names().count(a.res_name) > 0;
      residue_is_protein.push_back(protein && !water_names().count(a.res_name));
    }
    residues[it->second].atoms.push_back(std::move(a.site));
  }

  for (std::size_t r = 0; r < residues.size(); ++r) {
    auto& res = residues[r];
    if (water_names().count(res.res_name)) {
      out.cofactors.water.push_back(std::move(res));
    } else if (residue_is_protein[r]) {
      auto [it, inserted] = chain_index.emplace(res.key.chain_id, out.chains.size());
      if (inserted) out.chains.push_back(ProteinChain{res.key.chain_id, {}});
      out.chains[it->second].residues.push_back(std::move(res));
    } else {
      const bool organic = std::any_of(res.atoms.begin(), res.atoms.end(),
                                       [](const AtomSite& s) { return s.element == kCarbon; });
      (organic ? out.cofactors.organic : out.cofactors.inorganic).push_back(std::move(res));
    }
  }
  if (out.protein_atom_count() == 0) throw EmptyStructureError("structure contains no protein atoms");
  return out;
}

inline std::vector<RawAtom> read_pdb_atoms(std::string_view text) {
  std::vector<RawAtom> atoms;
  std::size_t lineno = 0;
  int models_seen = 0;
  bool in_model = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto rec = column(line, 0, 6);
    if (rec.starts_with("MODEL")) {
      ++models_seen;
      in_model = true;
      if (models_seen > 1) break;
      continue;
    }
    if (rec.starts_with("ENDMDL")) {
      if (in_model) break;
      continue;
    }
    if (rec == "END" || rec.starts_with("END   ") || trim(line) == "END") break;
    const bool is_atom = rec == "ATOM  " || rec == "ATOM";
    const bool is_het = rec == "HETATM";
    if (!is_atom && !is_het) continue;
    if (line.size() < 54) throw ParseError("truncated " + std::string(trim(rec)) + " record", lineno);

    RawAtom a;
    a.line = lineno;
    a.site.is_hetero = is_het;
    const auto raw_name = column(line, 12, 16);
    a.site.name = std::string(trim(raw_name));
    a.altloc = std::string(trim(column(line, 16, 17)));
    a.res_name = std::string(trim(column(line, 17, 20)));
    a.key.chain_id = std::string(trim(column(line, 21, 22)));
    if (!parse_int(column(line, 22, 26), a.key.seq_index)) throw ParseError("bad residue sequence number", lineno);
    a.key.insertion_code = std::string(trim(column(line, 26, 27)));
    double x, y, z;
    if (!parse_double(column(line, 30, 38), x) || !parse_double(column(line, 38, 46), y) ||
        !parse_double(column(line, 46, 54), z))
      throw ParseError("bad coordinates", lineno);
    a.site.coords = {x, y, z};
    double occ = 1.0;
    auto occ_field = trim(column(line, 54, 60));
    if (!occ_field.empty() && !parse_double(occ_field, occ)) throw ParseError("bad occupancy", lineno);
    if (occ < 0.0 || occ > 1.0) throw ParseError("occupancy outside [0,1]", lineno);
    a.site.occupancy = occ;
    auto elem_field = trim(column(line, 76, 78));
    if (!elem_field.empty()) {
      auto e = element_from_symbol(elem_field);
      if (!e) throw ParseError("unknown element '" + std::string(elem_field) + "'", lineno);
      a.site.element = *e;
    } else {
      a.site.element = element_from_atom_name(raw_name, is_het, lineno);
    }
    atoms.push_back(std::move(a));
  }
  return atoms;
}

// Whitespace tokenizer for CIF data, honouring quotes and ;-delimited text
// fields. Each token records its line number.
struct CifToken {
  std::string text;
  std::size_t line;
  bool quoted;
};

inline std::vector<CifToken> tokenize_cif(std::string_view text) {
  std::vector<CifToken> out;
  std::size_t lineno = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == ';') {
      std::string value(line.substr(1));
      const std::size_t start = lineno;
      bool closed = false;
      while (pos < text.size()) {
        nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view l2 = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (!l2.empty() && l2.back() == '\r') l2.remove_suffix(1);
        if (!l2.empty() && l2.front() == ';') {
          closed = true;
          break;
        }
        value += "\n";
        value += l2;
      }
      if (!closed) throw ParseError("unterminated text field", start);
      out.push_back({value, start, true});
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      if (line[i] == '#') break;
      if (line[i] == '\'' || line[i] == '"') {
        const char q = line[i];
        std::size_t j = i + 1;
        while (j < line.size() && !(line[j] == q && (j + 1 == line.size() || std::isspace(static_cast<unsigned char>(line[j + 1])))))
          ++j;
        if (j >= line.size()) throw ParseError("unterminated quoted value", lineno);
        out.push_back({std::string(line.substr(i + 1, j - i - 1)), lineno, true});
        i = j + 1;
      } else {
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({std::string(line.substr(i, j - i)), lineno, false});
        i = j;
      }
    }
  }
  return out;
}

inline std::vector<RawAtom> read_mmcif_atoms(std::string_view text) {
  const auto tokens = tokenize_cif(text);
  std::size_t t = 0;
  // Locate the loop whose tags are _atom_site.*
  std::vector<std::string> tags;
  for (; t < tokens.size(); ++t) {
    if (tokens[t].quoted || tokens[t].text != "loop_") continue;
    std::size_t u = t + 1;
    std::vector<std::string> cand;
    while (u < tokens.size() && !tokens[u].quoted && tokens[u].text.starts_with("_")) cand.push_back(tokens[u++].text);
    if (!cand.empty() && cand.front().starts_with("_atom_site.")) {
      tags = std::move(cand);
      t = u;
      break;
    }
  }
  if (tags.empty()) throw ParseError("no _atom_site loop found");

  auto col = [&](std::initializer_list<std::string_view> names) -> int {
    for (auto n : names)
      for (std::size_t i = 0; i < tags.size(); ++i)
        if (tags[i] == std::string("_atom_site.") + std::string(n)) return static_cast<int>(i);
    return -1;
  };
  const int c_group = col({"group_PDB"});
  const int c_type = col({"type_symbol"});
  const int c_atom = col({"auth_atom_id", "label_atom_id"});
  const int c_alt = col({"label_alt_id"});
  const int c_comp = col({"auth_comp_id", "label_comp_id"});
  const int c_chain = col({"auth_asym_id", "label_asym_id"});
  const int c_seq = col({"auth_seq_id", "label_seq_id"});
  const int c_icode = col({"pdbx_PDB_ins_code"});
  const int c_x = col({"Cartn_x"}), c_y = col({"Cartn_y"}), c_z = col({"Cartn_z"});
  const int c_occ = col({"occupancy"});
  const int c_model = col({"pdbx_PDB_model_num"});
  if (c_atom < 0 || c_comp < 0 || c_chain < 0 || c_seq < 0 || c_x < 0 || c_y < 0 || c_z < 0)
    throw ParseError("_atom_site loop lacks required columns");

  auto is_null = [](const CifToken& tok) { return !tok.quoted && (tok.text == "?" || tok.text == "."); };
  std::vector<RawAtom> atoms;
  std::string first_model;
  const std::size_t ncol = tags.size();
  while (t < tokens.size()) {
    const auto& head = tokens[t];
    if (!head.quoted && (head.text == "loop_" || head.text.starts_with("_") || head.text.starts_with("data_"))) break;
    if (t + ncol > tokens.size()) throw ParseError("incomplete _atom_site row", head.line);
    auto row = std::span(tokens).subspan(t, ncol);
    t += ncol;
    const std::size_t line = row[0].line;
    if (c_model >= 0) {
      const auto& m = row[static_cast<std::size_t>(c_model)].text;
      if (first_model.empty()) first_model = m;
      if (m != first_model) continue;
    }
    RawAtom a;
    a.line = line;
    a.site.is_hetero = c_group >= 0 && row[static_cast<std::size_t>(c_group)].text == "HETATM";
    a.site.name = row[static_cast<std::size_t>(c_atom)].text;
    a.altloc = c_alt >= 0 && !is_null(row[static_cast<std::size_t>(c_alt)]) ? row[static_cast<std::size_t>(c_alt)].text : "";
    a.res_name = row[static_cast<std::size_t>(c_comp)].text;
    a.key.chain_id = row[static_cast<std::size_t>(c_chain)].text;
    if (!parse_int(row[static_cast<std::size_t>(c_seq)].text, a.key.seq_index)) {
      if (is_null(row[static_cast<std::size_t>(c_seq)]))
        a.key.seq_index = 0;
      else
        throw ParseError("bad residue sequence number", line);
    }
    if (c_icode >= 0 && !is_null(row[static_cast<std::size_t>(c_icode)])) a.key.insertion_code = row[static_cast<std::size_t>(c_icode)].text;
    double x, y, z;
    if (!parse_double(row[static_cast<std::size_t>(c_x)].text, x) || !parse_double(row[static_cast<std::size_t>(c_y)].text, y) ||
        !parse_double(row[static_cast<std::size_t>(c_z)].text, z))
      throw ParseError("bad coordinates", line);
    a.site.coords = {x, y, z};
    if (c_occ >= 0 && !is_null(row[static_cast<std::size_t>(c_occ)])) {
      if (!parse_double(row[static_cast<std::size_t>(c_occ)].text, a.site.occupancy)) throw ParseError("bad occupancy", line);
      if (a.site.occupancy < 0.0 || a.site.occupancy > 1.0) throw ParseError("occupancy outside [0,1]", line);
    }
    if (c_type >= 0 && !is_null(row[static_cast<std::size_t>(c_type)])) {
      auto e = element_from_symbol(row[static_cast<std::size_t>(c_type)].text);
      if (!e) throw ParseError("unknown element '" + row[static_cast<std::size_t>(c_type)].text + "'", line);
      a.site.element = *e;
    } else {
      a.site.element = element_from_atom_name(" " + a.site.name, a.site.is_hetero, line);
    }
    atoms.push_back(std::move(a));
  }
  return atoms;
}

}  // namespace detail

// Reads model 1 of a PDB or mmCIF file. Hydrogens are dropped, alternate
// locations resolved to the highest occupancy (ties by altloc id), waters
// routed to the water group, other hetero groups split into organic
// (contains carbon) and inorganic cofactors.
inline ComplexStructure parse_protein_structure(std::string_view bytes, StructureFormat format) {
  auto raw = format == StructureFormat::pdb ? detail::read_pdb_atoms(bytes) : detail::read_mmcif_atoms(bytes);
  return detail::assemble(std::move(raw));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline StructureFormat structure_format_for_path(std::string_view path) {
  auto ends = [&](std::string_view suf) {
    if (path.size() < suf.size()) return false;
    for (std::size_t i = 0; i < suf.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(path[path.size() - suf.size() + i])) != suf[i]) return false;
    return true;
  };
  if (ends(".cif") || ends(".mmcif") || ends(".cif.txt")) return StructureFormat::mmcif;
  return StructureFormat::pdb;
}

inline ComplexStructure read_protein_structure(const std::string& path) {
  return parse_protein_structure(read_file(path), structure_format_for_path(path));
}

}  // namespace posebench::chem
