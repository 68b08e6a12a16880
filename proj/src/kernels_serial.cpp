#include <cmath>
#include <utility>

#include "kernel_detail.hpp"
#include "qnn/kernels.hpp"

namespace qnn::kernels {

std::uint64_t recorded_count(double efficiency, std::uint64_t shots) {
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  const double r = std::nearbyint(efficiency * static_cast<double>(shots));
  if (r <= 0.0) return 0;
  const auto n = static_cast<std::uint64_t>(r);
  return n > shots ? shots : n;
}

namespace serial {

using namespace detail;

void hadamard(std::span<Amplitude> amps, int num_qubits, int target) {
  const auto bits = sorted_bits<1>(num_qubits, {target});
  const std::uint64_t m = mask_of(num_qubits, target);
  const std::uint64_t pairs = amps.size() / 2;
  for (std::uint64_t t = 0; t < pairs; ++t) {
    const std::uint64_t i0 = insert_zero_bits(t, bits);
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
  const std::uint64_t count = amps.size() / 4;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(t, bits) | cm;
    std::swap(amps[i], amps[i | tm]);
  }
}

void swap(std::span<Amplitude> amps, int num_qubits, int q1, int q2) {
  const auto bits = sorted_bits<2>(num_qubits, {q1, q2});
  const std::uint64_t m1 = mask_of(num_qubits, q1);
  const std::uint64_t m2 = mask_of(num_qubits, q2);
  const std::uint64_t count = amps.size() / 4;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(t, bits) | m1;
    std::swap(amps[i], amps[i ^ m1 ^ m2]);
  }
}

void fredkin(std::span<Amplitude> amps, int num_qubits, int control, int q1, int q2) {
  const auto bits = sorted_bits<3>(num_qubits, {control, q1, q2});
  const std::uint64_t cm = mask_of(num_qubits, control);
  const std::uint64_t m1 = mask_of(num_qubits, q1);
  const std::uint64_t m2 = mask_of(num_qubits, q2);
  const std::uint64_t count = amps.size() / 8;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t i = insert_zero_bits(t, bits) | cm | m1;
    std::swap(amps[i], amps[i ^ m1 ^ m2]);
  }
}

void pattern_distribution(std::span<const Amplitude> amps, int num_qubits,
                          std::span<const int> qubits, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    out[pattern_of(i, num_qubits, qubits)] += std::norm(amps[i]);
  }
}

void partial_trace(std::span<const Amplitude> rho, int num_qubits, std::span<const int> keep,
                   std::span<Amplitude> out) {
  const auto rest = complement(num_qubits, keep);
  const auto kt = scatter_table(num_qubits, keep);
  const auto tt = scatter_table(num_qubits, rest);
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  const std::size_t dk = kt.size();
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b < dk; ++b) {
      Amplitude acc{0.0, 0.0};
      for (std::uint64_t t : tt) acc += rho[(kt[a] | t) * dim + (kt[b] | t)];
      out[a * dk + b] = acc;
    }
  }
}

void reduced_from_pure(std::span<const Amplitude> amps, int num_qubits, std::span<const int> keep,
                       std::span<Amplitude> out) {
  const auto rest = complement(num_qubits, keep);
  const auto kt = scatter_table(num_qubits, keep);
  const auto tt = scatter_table(num_qubits, rest);
  const std::size_t dk = kt.size();
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b < dk; ++b) {
      Amplitude acc{0.0, 0.0};
      for (std::uint64_t t : tt) acc += amps[kt[a] | t] * std::conj(amps[kt[b] | t]);
      out[a * dk + b] = acc;
    }
  }
}

void sample_lossy(rng::StreamKey key, double p_zero, double efficiency, LossMode mode,
                  std::span<Symbol> out) {
  const std::uint64_t recorded = recorded_count(efficiency, out.size());
  for (std::uint64_t i = 0; i < out.size(); ++i) {
    out[i] = lossy_shot(key, i, p_zero, efficiency, mode, recorded);
  }
}

void sample_joint(rng::StreamKey key, std::span<const double> cdf,
                  std::span<const double> efficiencies, LossMode mode, std::uint64_t shots,
                  std::span<Symbol> out) {
  const auto recorded = recorded_counts(efficiencies, shots);
  for (std::uint64_t i = 0; i < shots; ++i) {
    joint_shot(key, i, cdf, efficiencies, mode, recorded, shots, out);
  }
}

}  // namespace serial
}  // namespace qnn::kernels
