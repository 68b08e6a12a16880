#include "qnn/quantum_core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "qnn/errors.hpp"
#include "qnn/kernels.hpp"

namespace qnn {

namespace {

int log2_exact(std::size_t n) {
  if (n < 2 || (n & (n - 1)) != 0) return -1;
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// Overflow/underflow-safe Euclidean norm.
template <typename T>
double scaled_norm(std::span<const T> x) {
  double scale = 0.0;
  for (const auto& v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& v : x) {
    const double r = std::abs(v) / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

using MatrixMap = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigen_solve(std::span<const Complex> entries, std::size_t dim,
                                                             bool vectors) {
  const Eigen::MatrixXcd m = MatrixMap(entries.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, vectors ? Eigen::ComputeEigenvectors
                                                                    : Eigen::EigenvaluesOnly);
}

std::vector<int> normalize_keep(std::span<const int> keep, int num_qubits) {
  if (keep.empty()) throw Error(ErrorCode::EmptyKeepSet, "partial trace needs at least one kept qubit");
  std::vector<int> sorted(keep.begin(), keep.end());
  for (int q : sorted) {
    if (q < 0 || q >= num_qubits) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "qubit " + std::to_string(q) + " outside a " + std::to_string(num_qubits) + "-qubit register");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return sorted;
}

}  // namespace

// ---------------------------------------------------------------- QState

QState QState::from_amplitudes(std::vector<Complex> amplitudes) {
  const int k = log2_exact(amplitudes.size());
  if (k < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "state length " + std::to_string(amplitudes.size()) + " is not 2^k with k >= 1");
  }
  double sum = 0.0;
  for (const auto& a : amplitudes) sum += std::norm(a);
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::InvalidState, "amplitudes are not normalized (sum |a|^2 = " + std::to_string(sum) + ")");
  }
  return QState(k, std::move(amplitudes));
}

QState QState::normalized(std::vector<Complex> amplitudes) {
  const int k = log2_exact(amplitudes.size());
  if (k < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "state length " + std::to_string(amplitudes.size()) + " is not 2^k with k >= 1");
  }
  const double n = scaled_norm<Complex>(amplitudes);
  if (n <= kZeroNormFloor) throw Error(ErrorCode::ZeroNorm, "cannot normalize a zero vector");
  for (auto& a : amplitudes) a /= n;
  return QState(k, std::move(amplitudes));
}

QState QState::basis(int num_qubits, std::uint64_t index) {
  if (num_qubits < 1 || num_qubits > 62) {
    throw Error(ErrorCode::DimensionMismatch, "register size must be in [1, 62]");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw Error(ErrorCode::IndexOutOfRange, "basis index outside register");
  std::vector<Complex> amps(dim, Complex{0.0, 0.0});
  amps[index] = 1.0;
  return QState(num_qubits, std::move(amps));
}

double QState::norm() const { return scaled_norm<Complex>(amplitudes_); }

// ---------------------------------------------------------- DensityMatrix

DensityMatrix DensityMatrix::from_entries(int num_qubits, std::vector<Complex> row_major) {
  if (num_qubits < 1) throw Error(ErrorCode::DimensionMismatch, "density matrix needs at least one qubit");
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (row_major.size() != dim * dim) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim * dim) + " entries, got " +
                                                  std::to_string(row_major.size()));
  }
  Complex tr{0.0, 0.0};
  for (std::size_t r = 0; r < dim; ++r) {
    tr += row_major[r * dim + r];
    for (std::size_t c = r; c < dim; ++c) {
      if (std::abs(row_major[r * dim + c] - std::conj(row_major[c * dim + r])) > kHermitianTolerance) {
        throw Error(ErrorCode::InvalidDensityMatrix, "matrix is not Hermitian");
      }
    }
  }
  if (std::abs(tr - Complex{1.0, 0.0}) > kTraceTolerance) {
    throw Error(ErrorCode::InvalidDensityMatrix, "trace differs from 1");
  }
  const auto solver = eigen_solve(row_major, dim, false);
  if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
    throw Error(ErrorCode::InvalidDensityMatrix, "matrix has a negative eigenvalue");
  }
  return DensityMatrix(num_qubits, std::move(row_major));
}

DensityMatrix DensityMatrix::pure(const QState& state) {
  const std::size_t dim = state.dim();
  std::vector<Complex> entries(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) entries[r * dim + c] = state[r] * std::conj(state[c]);
  }
  return DensityMatrix(state.num_qubits(), std::move(entries));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  if (num_qubits < 1) throw Error(ErrorCode::DimensionMismatch, "density matrix needs at least one qubit");
  const std::size_t dim = std::size_t{1} << num_qubits;
  std::vector<Complex> entries(dim * dim, Complex{0.0, 0.0});
  for (std::size_t r = 0; r < dim; ++r) entries[r * dim + r] = 1.0 / static_cast<double>(dim);
  return DensityMatrix(num_qubits, std::move(entries));
}

Complex DensityMatrix::trace() const {
  Complex tr{0.0, 0.0};
  for (std::size_t r = 0; r < dim(); ++r) tr += (*this)(r, r);
  return tr;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  const auto solver = eigen_solve(entries_, dim(), false);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::vector<std::pair<double, QState>> DensityMatrix::spectral_mixture(double cutoff) const {
  const auto solver = eigen_solve(entries_, dim(), true);
  std::vector<std::pair<double, QState>> mixture;
  for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j) {
    const double weight = solver.eigenvalues()(j);
    if (weight <= cutoff) continue;
    const auto col = solver.eigenvectors().col(j);
    mixture.emplace_back(weight, QState::normalized(std::vector<Complex>(col.data(), col.data() + col.size())));
  }
  return mixture;
}

double DensityMatrix::expectation(const QState& w) const {
  if (w.num_qubits() != num_qubits_) {
    throw Error(ErrorCode::DimensionMismatch, "state and density matrix sizes differ");
  }
  const std::size_t d = dim();
  Complex acc{0.0, 0.0};
  for (std::size_t r = 0; r < d; ++r) {
    Complex row{0.0, 0.0};
    for (std::size_t c = 0; c < d; ++c) row += entries_[r * d + c] * w[c];
    acc += std::conj(w[r]) * row;
  }
  return acc.real();
}

// ----------------------------------------------------------- ModuleLayout

bool ModuleLayout::is_minimal() const {
  const long long cap = static_cast<long long>(register_dim());
  return k >= 1 && m >= 1 && N >= 1 && m * cap >= N && (m - 1) * cap < N;
}

// ------------------------------------------------------------- operations

QState amplitude_encode(std::span<const double> x) {
  return amplitude_encode(std::span<const Complex>(std::vector<Complex>(x.begin(), x.end())));
}

QState amplitude_encode(std::span<const Complex> x) {
  if (log2_exact(x.size()) < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector length " + std::to_string(x.size()) + " is not 2^k with k >= 1");
  }
  if (scaled_norm(x) <= kZeroNormFloor) throw Error(ErrorCode::ZeroNorm, "cannot encode a zero-norm vector");
  return QState::normalized(std::vector<Complex>(x.begin(), x.end()));
}

QState amplitude_encode(std::span<const double> x, int k) {
  if (k < 1 || x.size() != (std::size_t{1} << k)) {
    throw Error(ErrorCode::DimensionMismatch, "vector length " + std::to_string(x.size()) + " differs from 2^" +
                                                  std::to_string(k));
  }
  return amplitude_encode(x);
}

Complex inner_product(const QState& a, const QState& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw Error(ErrorCode::DimensionMismatch, "inner product of states with different register sizes");
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "cosine similarity of vectors with different lengths");
  }
  const double nx = scaled_norm(x);
  const double ny = scaled_norm(y);
  if (nx <= kZeroNormFloor || ny <= kZeroNormFloor) {
    throw Error(ErrorCode::ZeroNorm, "cosine similarity is undefined for a zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += (x[i] / nx) * (y[i] / ny);
  return std::clamp(dot, -1.0, 1.0);
}

QState tensor_product(const QState& a, const QState& b) {
  std::vector<Complex> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
  }
  return QState::normalized(std::move(amps));
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  const std::size_t d = da * db;
  std::vector<Complex> entries(d * d);
  for (std::size_t r1 = 0; r1 < da; ++r1)
    for (std::size_t c1 = 0; c1 < da; ++c1)
      for (std::size_t r2 = 0; r2 < db; ++r2)
        for (std::size_t c2 = 0; c2 < db; ++c2)
          entries[(r1 * db + r2) * d + (c1 * db + c2)] = a(r1, c1) * b(r2, c2);
  return DensityMatrix(a.num_qubits() + b.num_qubits(), std::move(entries));
}

int Gate::arity() const {
  switch (kind) {
    case Kind::Hadamard: return 1;
    case Kind::CNOT:
    case Kind::Swap: return 2;
    case Kind::Fredkin: return 3;
  }
  return 0;
}

void apply_gate_in_place(std::span<Complex> amplitudes, int num_qubits, const Gate& gate) {
  const int n = gate.arity();
  for (int i = 0; i < n; ++i) {
    const int q = gate.qubits[i];
    if (q < 0 || q >= num_qubits) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "gate qubit " + std::to_string(q) + " outside a " + std::to_string(num_qubits) + "-qubit register");
    }
    for (int j = 0; j < i; ++j) {
      if (gate.qubits[j] == q) throw Error(ErrorCode::DuplicateIndex, "gate qubit " + std::to_string(q) + " repeated");
    }
  }
  const auto& q = gate.qubits;
  switch (gate.kind) {
    case Gate::Kind::Hadamard: kernels::omp::hadamard(amplitudes, num_qubits, q[0]); break;
    case Gate::Kind::CNOT: kernels::omp::cnot(amplitudes, num_qubits, q[0], q[1]); break;
    case Gate::Kind::Swap: kernels::omp::swap(amplitudes, num_qubits, q[0], q[1]); break;
    case Gate::Kind::Fredkin: kernels::omp::fredkin(amplitudes, num_qubits, q[0], q[1], q[2]); break;
  }
}

QState apply_gate(const QState& state, const Gate& gate) {
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  apply_gate_in_place(amps, state.num_qubits(), gate);
  return QState::from_amplitudes(std::move(amps));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto kept = normalize_keep(keep, rho.num_qubits());
  const std::size_t dk = std::size_t{1} << kept.size();
  std::vector<Complex> out(dk * dk);
  kernels::omp::partial_trace(rho.entries(), rho.num_qubits(), kept, out);
  return DensityMatrix(static_cast<int>(kept.size()), std::move(out));
}

DensityMatrix reduced_density(const QState& state, std::span<const int> keep) {
  const auto kept = normalize_keep(keep, state.num_qubits());
  const std::size_t dk = std::size_t{1} << kept.size();
  std::vector<Complex> out(dk * dk);
  kernels::omp::reduced_from_pure(state.amplitudes(), state.num_qubits(), kept, out);
  return DensityMatrix(static_cast<int>(kept.size()), std::move(out));
}

}  // namespace qnn
