#include <cmath>
#include <utility>
#include <vector>

#include "kernel_detail.hpp"
#include "qnn/kernels.hpp"

namespace qnn::kernels::omp {

using namespace detail;

namespace {

// Below this many loop iterations the fork/join cost dominates.
constexpr std::int64_t kMinParallel = 1 << 13;
// Fixed reduction chunk: partial sums never depend on the thread count.
constexpr std::uint64_t kReduceChunk = 1 << 12;

}  // namespace

void hadamard(std::span<Amplitude> amps, int num_qubits, int target) {
  const auto bits = sorted_bits<1>(num_qubits, {target});
  const std::uint64_t m = mask_of(num_qubits, target);
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
#pragma omp parallel for schedule(static) if (pairs >= kMinParallel)
  for (std::int64_t t = 0; t < pairs; ++t) {
    const std::uint64_t i0 = insert_zero_bits(static_cast<std::uint64_t>(t), bits);
    const std::uint64_t i1 = i0 | m;
    const Amplitude a = amps[i0];
    const Amplitude b = amps[i1];
    amps[i0] = (a + b) * kInvSqrt2;
    amps[i1] = (a - b) * kInvSqrt2;
  }
}

void cnot(std::span<Amplitude> amps, int num_qubits, int control, int target) {
  const auto bits = sorted_bits<2>(num_qubits, {control, target});
  const std::uint64_t cm = mask_of(num_qubits, control);
  const std::uint64_t tm = mask_of(num_qubits, target);
  const auto count = static_cast<std::int64_t>(amps.size() / 4);
#pragma omp parallel for schedule(static) if (count >= kMinParallel)
  for (std::int64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(static_cast<std::uint64_t>(t), bits) | cm;
    std::swap(amps[i], amps[i | tm]);
  }
}

void swap(std::span<Amplitude> amps, int num_qubits, int q1, int q2) {
  const auto bits = sorted_bits<2>(num_qubits, {q1, q2});
  const std::uint64_t m1 = mask_of(num_qubits, q1);
  const std::uint64_t m2 = mask_of(num_qubits, q2);
  const auto count = static_cast<std::int64_t>(amps.size() / 4);
#pragma omp parallel for schedule(static) if (count >= kMinParallel)
  for (std::int64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(static_cast<std::uint64_t>(t), bits) | m1;
    std::swap(amps[i], amps[i ^ m1 ^ m2]);
  }
}

void fredkin(std::span<Amplitude> amps, int num_qubits, int control, int q1, int q2) {
  const auto bits = sorted_bits<3>(num_qubits, {control, q1, q2});
  const std::uint64_t cm = mask_of(num_qubits, control);
  const std::uint64_t m1 = mask_of(num_qubits, q1);
  const std::uint64_t m2 = mask_of(num_qubits, q2);
  const auto count = static_cast<std::int64_t>(amps.size() / 8);
#pragma omp parallel for schedule(static) if (count >= kMinParallel)
  for (std::int64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(static_cast<std::uint64_t>(t), bits) | cm | m1;
    std::swap(amps[i], amps[i ^ m1 ^ m2]);
  }
}

void pattern_distribution(std::span<const Amplitude> amps, int num_qubits,
                          std::span<const int> qubits, std::span<double> out) {
  const std::size_t patterns = out.size();
  const std::uint64_t dim = amps.size();
  const auto chunks = static_cast<std::int64_t>((dim + kReduceChunk - 1) / kReduceChunk);
  std::vector<double> partial(static_cast<std::size_t>(chunks) * patterns, 0.0);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    double* local = partial.data() + static_cast<std::size_t>(c) * patterns;
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kReduceChunk;
    const std::uint64_t end = std::min(dim, begin + kReduceChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      local[pattern_of(i, num_qubits, qubits)] += std::norm(amps[i]);
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::int64_t c = 0; c < chunks; ++c) {
    for (std::size_t p = 0; p < patterns; ++p) out[p] += partial[static_cast<std::size_t>(c) * patterns + p];
  }
}

void partial_trace(std::span<const Amplitude> rho, int num_qubits, std::span<const int> keep,
                   std::span<Amplitude> out) {
  const auto rest = complement(num_qubits, keep);
  const auto kt = scatter_table(num_qubits, keep);
  const auto tt = scatter_table(num_qubits, rest);
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  const std::size_t dk = kt.size();
  const auto cells = static_cast<std::int64_t>(dk * dk);
  const auto work = cells * static_cast<std::int64_t>(tt.size());
#pragma omp parallel for schedule(static) if (work >= kMinParallel)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::size_t a = static_cast<std::size_t>(cell) / dk;
    const std::size_t b = static_cast<std::size_t>(cell) % dk;
    Amplitude acc{0.0, 0.0};
    for (std::uint64_t t : tt) acc += rho[(kt[a] | t) * dim + (kt[b] | t)];
    out[a * dk + b] = acc;
  }
}

void reduced_from_pure(std::span<const Amplitude> amps, int num_qubits, std::span<const int> keep,
                       std::span<Amplitude> out) {
  const auto rest = complement(num_qubits, keep);
  const auto kt = scatter_table(num_qubits, keep);
  const auto tt = scatter_table(num_qubits, rest);
  const std::size_t dk = kt.size();
  const auto cells = static_cast<std::int64_t>(dk * dk);
  const auto work = cells * static_cast<std::int64_t>(tt.size());
#pragma omp parallel for schedule(static) if (work >= kMinParallel)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::size_t a = static_cast<std::size_t>(cell) / dk;
    const std::size_t b = static_cast<std::size_t>(cell) % dk;
    Amplitude acc{0.0, 0.0};
    for (std::uint64_t t : tt) acc += amps[kt[a] | t] * std::conj(amps[kt[b] | t]);
    out[a * dk + b] = acc;
  }
}

void sample_lossy(rng::StreamKey key, double p_zero, double efficiency, LossMode mode,
                  std::span<Symbol> out) {
  const std::uint64_t recorded = recorded_count(efficiency, out.size());
  const auto shots = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (shots >= kMinParallel)
  for (std::int64_t i = 0; i < shots; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    out[u] = lossy_shot(key, u, p_zero, efficiency, mode, recorded);
  }
}

void sample_joint(rng::StreamKey key, std::span<const double> cdf,
                  std::span<const double> efficiencies, LossMode mode, std::uint64_t shots,
                  std::span<Symbol> out) {
  const auto recorded = recorded_counts(efficiencies, shots);
  const auto n = static_cast<std::int64_t>(shots);
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::int64_t i = 0; i < n; ++i) {
    joint_shot(key, static_cast<std::uint64_t>(i), cdf, efficiencies, mode, recorded, shots, out);
  }
}

}  // namespace qnn::kernels::omp
