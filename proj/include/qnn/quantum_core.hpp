#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qnn {

using Complex = std::complex<double>;

/// Real feature or weight vector.
using Vector = std::vector<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kZeroNormFloor = 1e-300;

/// Pure state of a k-qubit register: 2^k complex amplitudes with unit norm.
///
/// Basis index i corresponds to the binary string of i read with qubit 0 as
/// the most significant bit, so |q0 q1 ... q_{k-1}>.
class QState {
 public:
  /// Validates length 2^k (k >= 1) and unit norm within kNormTolerance.
  static QState from_amplitudes(std::vector<Complex> amplitudes);
  /// Rescales a nonzero vector of length 2^k to unit norm.
  static QState normalized(std::vector<Complex> amplitudes);
  static QState basis(int num_qubits, std::uint64_t index);

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  double norm() const;

 private:
  QState(int num_qubits, std::vector<Complex> amplitudes)
      : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

  int num_qubits_;
  std::vector<Complex> amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace operator on k qubits, stored
/// row-major in the same basis ordering as QState.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), trace (1e-12) and eigenvalues >= -1e-10.
  static DensityMatrix from_entries(int num_qubits, std::vector<Complex> row_major);
  static DensityMatrix pure(const QState& state);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dim() const noexcept { return std::size_t{1} << num_qubits_; }
  std::span<const Complex> entries() const noexcept { return entries_; }
  Complex operator()(std::size_t row, std::size_t col) const { return entries_[row * dim() + col]; }

  Complex trace() const;
  /// Ascending eigenvalues.
  std::vector<double> eigenvalues() const;
  /// Spectral decomposition: weights and eigenvectors with weight > cutoff.
  std::vector<std::pair<double, QState>> spectral_mixture(double cutoff = 1e-14) const;
  /// <w| rho |w>
  double expectation(const QState& w) const;

 private:
  DensityMatrix(int num_qubits, std::vector<Complex> entries)
      : num_qubits_(num_qubits), entries_(std::move(entries)) {}

  friend DensityMatrix partial_trace(const DensityMatrix&, std::span<const int>);
  friend DensityMatrix reduced_density(const QState&, std::span<const int>);
  friend DensityMatrix tensor_product(const DensityMatrix&, const DensityMatrix&);

  int num_qubits_;
  std::vector<Complex> entries_;
};

/// Register size k, module count m, and encoded dimension N of a modular network.
struct ModuleLayout {
  int k = 1;
  int m = 1;
  int N = 2;

  int register_dim() const { return 1 << k; }
  int qubits_per_module() const { return 2 * k + 1; }
  int total_qubits() const { return m * qubits_per_module(); }
  /// m * 2^k >= N and (m - 1) * 2^k < N.
  bool is_minimal() const;
  friend bool operator==(const ModuleLayout&, const ModuleLayout&) = default;
};

QState amplitude_encode(std::span<const double> x);
QState amplitude_encode(std::span<const Complex> x);
/// Checks that x has exactly 2^k entries before encoding.
QState amplitude_encode(std::span<const double> x, int k);

/// <a|b>, conjugate-linear in the first argument.
Complex inner_product(const QState& a, const QState& b);

double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// a's qubits form the more significant block of the result.
QState tensor_product(const QState& a, const QState& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

struct Gate {
  enum class Kind { Hadamard, CNOT, Swap, Fredkin };

  Kind kind;
  std::array<int, 3> qubits;

  static Gate hadamard(int target) { return {Kind::Hadamard, {target, -1, -1}}; }
  static Gate cnot(int control, int target) { return {Kind::CNOT, {control, target, -1}}; }
  static Gate swap(int q1, int q2) { return {Kind::Swap, {q1, q2, -1}}; }
  static Gate fredkin(int control, int q1, int q2) { return {Kind::Fredkin, {control, q1, q2}}; }

  int arity() const;
};

QState apply_gate(const QState& state, const Gate& gate);

/// Applies `gate` to a raw amplitude buffer of `num_qubits` qubits. Validates
/// indices; used by circuit simulations that chain many gates.
void apply_gate_in_place(std::span<Complex> amplitudes, int num_qubits, const Gate& gate);

/// Reduced state over `keep` (treated as a set; result ordered by ascending
/// qubit index).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix reduced_density(const QState& state, std::span<const int> keep);

}  // namespace qnn
