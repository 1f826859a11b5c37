#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "posebench/molgraph/graph.hpp"

namespace posebench::molgraph {

inline constexpr int kDefaultFingerprintRadius = 2;
inline constexpr int kDefaultFingerprintBits = 2048;

// 32-bit FNV-1a over the little-endian bytes of a sequence of int32 values.
// Byte order is fixed explicitly so hashes agree across platforms.
inline std::uint32_t fnv1a(std::span<const std::int32_t> values) {
  std::uint32_t h = 2166136261u;
  for (std::int32_t v : values) {
    auto u = static_cast<std::uint32_t>(v);
    for (int k = 0; k < 4; ++k) {
      h ^= (u >> (8 * k)) & 0xFFu;
      h *= 16777619u;
    }
  }
  return h;
}

class Fingerprint {
 public:
  Fingerprint() = default;
  Fingerprint(int nbits, int radius) : nbits_(nbits), radius_(radius), words_((static_cast<std::size_t>(nbits) + 63) / 64, 0) {}

  int nbits() const { return nbits_; }
  int radius() const { return radius_; }
  void set(int bit) { words_[static_cast<std::size_t>(bit) / 64] |= std::uint64_t{1} << (bit % 64); }
  bool test(int bit) const { return (words_[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1U; }
  int popcount() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  const std::vector<std::uint64_t>& words() const { return words_; }
  bool operator==(const Fingerprint&) const = default;

 private:
  int nbits_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

// ECFP-style circular fingerprint. Radius-0 identifiers hash (atomic number,
// formal charge, heavy degree); each iteration hashes (iteration, own id,
// sorted (bond order, neighbour id) pairs). Every identifier from every
// iteration sets bit (id mod nbits).
inline Fingerprint circular_fingerprint(const MolecularGraph& g, int radius = kDefaultFingerprintRadius,
                                        int nbits = kDefaultFingerprintBits) {
  if (radius < 0) throw InvalidArgument("fingerprint radius must be >= 0");
  if (nbits <= 0 || (nbits & (nbits - 1)) != 0) throw InvalidArgument("fingerprint width must be a power of two");
  Fingerprint fp(nbits, radius);
  const std::size_t n = g.size();
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = g.atom(static_cast<int>(i));
    const std::int32_t inv[] = {static_cast<std::int32_t>(a.element), a.formal_charge, g.degree(static_cast<int>(i))};
    ids[i] = fnv1a(inv);
    fp.set(static_cast<int>(ids[i] & static_cast<std::uint32_t>(nbits - 1)));
  }
  for (int iter = 1; iter <= radius; ++iter) {
    std::vector<std::uint32_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::int32_t, std::int32_t>> env;
      for (const auto& nb : g.neighbors(static_cast<int>(i)))
        env.emplace_back(static_cast<std::int32_t>(g.bond(nb.bond).order),
                         static_cast<std::int32_t>(ids[static_cast<std::size_t>(nb.atom)]));
      std::sort(env.begin(), env.end());
      std::vector<std::int32_t> buf{iter, static_cast<std::int32_t>(ids[i])};
      for (auto [o, id] : env) {
        buf.push_back(o);
        buf.push_back(id);
      }
      next[i] = fnv1a(buf);
      fp.set(static_cast<int>(next[i] & static_cast<std::uint32_t>(nbits - 1)));
    }
    ids = std::move(next);
  }
  return fp;
}

// |a AND b| / |a OR b|; 1.0 when both are empty.
inline double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits() != b.nbits()) throw InvalidArgument("fingerprint widths differ");
  int both = 0, either = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    both += std::popcount(a.words()[i] & b.words()[i]);
    either += std::popcount(a.words()[i] | b.words()[i]);
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace posebench::molgraph
