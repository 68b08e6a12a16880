#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include "qnn/rng.hpp"

// Dense state-vector and sampling kernels.
//
// Two implementations share every signature: `serial` is the plain reference
// kept for testing and benchmarking, `omp` is the OpenMP version the library
// calls. Qubit q of an n-qubit register maps to bit (n - 1 - q) of the basis
// index, i.e. qubit 0 is the most significant.
//
// Gate kernels and the partial trace touch each output element with the same
// arithmetic in both variants, so their results are bit-identical. Reductions
// in the omp variants use fixed-size chunks combined in chunk order, which
// makes them independent of the thread count (but not bitwise equal to the
// serial left-to-right sum). Sampling kernels are bit-identical across both
// variants and any thread count.

namespace qnn {

enum class Symbol : std::uint8_t { Missing = 0, Zero = 1, One = 2 };

enum class LossMode { StochasticThinning, DeterministicCount };

}  // namespace qnn

namespace qnn::kernels {

using Amplitude = std::complex<double>;

/// Number of outcomes recorded out of `shots` in DeterministicCount mode:
/// round(efficiency * shots) with ties to even.
std::uint64_t recorded_count(double efficiency, std::uint64_t shots);

namespace serial {

void hadamard(std::span<Amplitude> amps, int num_qubits, int target);
void cnot(std::span<Amplitude> amps, int num_qubits, int control, int target);
void swap(std::span<Amplitude> amps, int num_qubits, int q1, int q2);
void fredkin(std::span<Amplitude> amps, int num_qubits, int control, int q1, int q2);

/// Distribution over the joint values of `qubits`; the first listed qubit is
/// the most significant bit of the pattern index. out.size() == 2^qubits.size().
void pattern_distribution(std::span<const Amplitude> amps, int num_qubits,
                          std::span<const int> qubits, std::span<double> out);

/// Row-major reduced matrix over the sorted qubit list `keep`.
void partial_trace(std::span<const Amplitude> rho, int num_qubits, std::span<const int> keep,
                   std::span<Amplitude> out);

/// Tr_rest |psi><psi| without forming the full density matrix.
void reduced_from_pure(std::span<const Amplitude> amps, int num_qubits, std::span<const int> keep,
                       std::span<Amplitude> out);

/// One lossy single-qubit measurement record, out.size() shots long.
/// Shot i uses draws 2i (kept?) and 2i+1 (zero?).
void sample_lossy(rng::StreamKey key, double p_zero, double efficiency, LossMode mode,
                  std::span<Symbol> out);

/// Joint shots over m = efficiencies.size() qubits. cdf[j] is the cumulative
/// probability of zero-pattern j, where bit (m-1-l) of j set means qubit l
/// yields Zero. `out` is qubit-major: out[l * shots + i].
/// Shot i uses draw (m+1)i for the pattern and (m+1)i+1+l for qubit l's loss.
void sample_joint(rng::StreamKey key, std::span<const double> cdf,
                  std::span<const double> efficiencies, LossMode mode, std::uint64_t shots,
                  std::span<Symbol> out);

}  // namespace serial

namespace omp {

void hadamard(std::span<Amplitude> amps, int num_qubits, int target);
void cnot(std::span<Amplitude> amps, int num_qubits, int control, int target);
void swap(std::span<Amplitude> amps, int num_qubits, int q1, int q2);
void fredkin(std::span<Amplitude> amps, int num_qubits, int control, int q1, int q2);
void pattern_distribution(std::span<const Amplitude> amps, int num_qubits,
                          std::span<const int> qubits, std::span<double> out);
void partial_trace(std::span<const Amplitude> rho, int num_qubits, std::span<const int> keep,
                   std::span<Amplitude> out);
void reduced_from_pure(std::span<const Amplitude> amps, int num_qubits, std::span<const int> keep,
                       std::span<Amplitude> out);
void sample_lossy(rng::StreamKey key, double p_zero, double efficiency, LossMode mode,
                  std::span<Symbol> out);
void sample_joint(rng::StreamKey key, std::span<const double> cdf,
                  std::span<const double> efficiencies, LossMode mode, std::uint64_t shots,
                  std::span<Symbol> out);

}  // namespace omp

}  // namespace qnn::kernels
