#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qnn/kernels.hpp"

namespace qnn::kernels::detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Bit mask of qubit q in an n-qubit register (qubit 0 is the MSB).
inline std::uint64_t mask_of(int num_qubits, int q) {
  return std::uint64_t{1} << (num_qubits - 1 - q);
}

/// Spreads `t` over the bit positions not listed in `zero_bits` (sorted
/// ascending). Used to enumerate basis indices with given bits cleared.
template <std::size_t K>
inline std::uint64_t insert_zero_bits(std::uint64_t t, const std::array<int, K>& zero_bits) {
  for (int b : zero_bits) {
    const std::uint64_t low = t & ((std::uint64_t{1} << b) - 1);
    t = ((t >> b) << (b + 1)) | low;
  }
  return t;
}

template <std::size_t K>
inline std::array<int, K> sorted_bits(int num_qubits, std::array<int, K> qubits) {
  for (auto& q : qubits) q = num_qubits - 1 - q;
  std::sort(qubits.begin(), qubits.end());
  return qubits;
}

/// For each value of the listed qubits, the basis index with those bits set
/// and every other bit cleared. Element order: first qubit is the MSB.
inline std::vector<std::uint64_t> scatter_table(int num_qubits, std::span<const int> qubits) {
  const std::size_t count = std::size_t{1} << qubits.size();
  std::vector<std::uint64_t> table(count, 0);
  const int width = static_cast<int>(qubits.size());
  for (std::size_t v = 0; v < count; ++v) {
    std::uint64_t idx = 0;
    for (int j = 0; j < width; ++j) {
      if ((v >> (width - 1 - j)) & 1u) idx |= mask_of(num_qubits, qubits[j]);
    }
    table[v] = idx;
  }
  return table;
}

inline std::vector<int> complement(int num_qubits, std::span<const int> keep) {
  std::vector<int> rest;
  for (int q = 0; q < num_qubits; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  }
  return rest;
}

inline std::size_t pattern_of(std::uint64_t index, int num_qubits, std::span<const int> qubits) {
  std::size_t v = 0;
  for (int q : qubits) v = (v << 1) | ((index & mask_of(num_qubits, q)) ? 1u : 0u);
  return v;
}

inline Symbol lossy_shot(rng::StreamKey key, std::uint64_t i, double p_zero, double efficiency,
                         LossMode mode, std::uint64_t recorded) {
  const bool kept = mode == LossMode::StochasticThinning ? rng::uniform(key, 2 * i) < efficiency
                                                         : i < recorded;
  if (!kept) return Symbol::Missing;
  return rng::uniform(key, 2 * i + 1) < p_zero ? Symbol::Zero : Symbol::One;
}

inline std::size_t pick_pattern(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto j = static_cast<std::size_t>(it - cdf.begin());
  return std::min(j, cdf.size() - 1);
}

inline void joint_shot(rng::StreamKey key, std::uint64_t i, std::span<const double> cdf,
                       std::span<const double> efficiencies, LossMode mode,
                       std::span<const std::uint64_t> recorded, std::uint64_t shots,
                       std::span<Symbol> out) {
  const std::size_t m = efficiencies.size();
  const std::uint64_t base = (m + 1) * i;
  const std::size_t pattern = pick_pattern(cdf, rng::uniform(key, base));
  for (std::size_t l = 0; l < m; ++l) {
    const bool kept = mode == LossMode::StochasticThinning
                          ? rng::uniform(key, base + 1 + l) < efficiencies[l]
                          : i < recorded[l];
    Symbol s = Symbol::Missing;
    if (kept) s = ((pattern >> (m - 1 - l)) & 1u) ? Symbol::Zero : Symbol::One;
    out[l * shots + i] = s;
  }
}

inline std::vector<std::uint64_t> recorded_counts(std::span<const double> efficiencies,
                                                  std::uint64_t shots) {
  std::vector<std::uint64_t> rec(efficiencies.size());
  for (std::size_t l = 0; l < efficiencies.size(); ++l) rec[l] = recorded_count(efficiencies[l], shots);
  return rec;
}

}  // namespace qnn::kernels::detail
