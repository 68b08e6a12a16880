#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qnn/measurement.hpp"
#include "qnn/quantum_core.hpp"

namespace qnn {

/// MODULAR: m parallel modules, one output (f = N0 / shots).
/// FULL_RQ: one module, R weight vectors, Q outputs (y_q = N0_q / (R shots)).
/// BLOCK:   m modules run for each of R weight sets, Q outputs; hidden unit
///          h = r * m + l sees only the inputs routed to module l in
///          repetition r.
enum class Topology { Modular, FullRQ, Block };

enum class PartitionMode { Contiguous, SeededRandomPermutation };

std::string_view to_string(Topology t);
std::string_view to_string(PartitionMode p);
Topology topology_from_string(std::string_view s);
PartitionMode partition_mode_from_string(std::string_view s);

/// Activation realized by a swap test: phi(z) = (1 - z^2) / 2.
constexpr double quadratic_activation(double z) { return 0.5 * (1.0 - z * z); }

/// Parameters of a swap-test network together with its topology. The same
/// value defines both the sampled quantum model and its exact classical
/// counterpart (oracle_network).
struct NetworkSpec {
  ModuleLayout layout;
  Topology topology = Topology::Modular;
  int repetitions = 1;  // R
  int outputs = 1;      // Q
  /// weights[r][l]: piece of length 2^k for module l in repetition r.
  std::vector<std::vector<Vector>> weights;
  /// efficiencies[r * m + l][q] in [0, 1].
  std::vector<std::vector<double>> efficiencies;
  PartitionMode partition_mode = PartitionMode::Contiguous;
  std::uint64_t partition_seed = 0;
  double pad_value = 0.0;

  int hidden_units() const { return layout.m * repetitions; }
  double efficiency(int r, int l, int q) const {
    return efficiencies[static_cast<std::size_t>(r * layout.m + l)][static_cast<std::size_t>(q)];
  }

  /// Throws DimensionMismatch, InvalidEfficiency or ZeroNormPiece.
  void validate() const;

  static NetworkSpec modular(int k, int N, std::vector<Vector> pieces, std::vector<double> efficiencies);
  static NetworkSpec full(int k, std::vector<Vector> weights, std::vector<std::vector<double>> efficiencies);
  static NetworkSpec block(ModuleLayout layout, std::vector<std::vector<Vector>> weights,
                           std::vector<std::vector<double>> efficiencies);
};

/// Sampled or exact network output.
struct Prediction {
  std::vector<double> values;
  std::uint64_t shots_used = 0;  // total protocol repetitions, R * Q * shots
  double error_bound = 0.0;      // 1 / sqrt(R * shots); 0 for exact values
};

/// m = ceil(N / 2^k), the fewest k-qubit registers that hold N amplitudes.
ModuleLayout plan_layout(int N, int k);

/// Input permutation used by repetition `repetition`: piece coordinate i
/// reads x[perm[i]]. Identity for Contiguous.
std::vector<std::size_t> input_permutation(int N, PartitionMode mode, std::uint64_t seed,
                                           std::uint64_t repetition = 0);

/// Splits (permuted) x into m pieces of 2^k entries, padding the tail with
/// pad_value. Throws ZeroNormPiece naming the first degenerate piece.
std::vector<Vector> partition(std::span<const double> x, const ModuleLayout& layout,
                              std::span<const std::size_t> permutation, double pad_value);
std::vector<Vector> partition(std::span<const double> x, const ModuleLayout& layout, PartitionMode mode,
                              double pad_value, std::uint64_t seed = 0, std::uint64_t repetition = 0);
/// Inverse of partition: drops padding and undoes the permutation.
Vector unpartition(std::span<const Vector> pieces, const ModuleLayout& layout,
                   std::span<const std::size_t> permutation);

/// phi(cos(x_r^(l), w_r^(l))) for every hidden unit h = r * m + l.
std::vector<double> hidden_activations(std::span<const double> x, const NetworkSpec& spec);

/// connectivity[i][h]: input i feeds hidden unit h.
std::vector<std::vector<bool>> connectivity_mask(const NetworkSpec& spec);

/// Exact classical two-layer network equal to the expectation of the sampled
/// model: y_q = (1/R) sum_{r,l} p_{rl,q} phi(cos(x_r^(l), w_r^(l))).
Prediction oracle_network(std::span<const double> x, const NetworkSpec& spec);

/// Efficiencies of the spec override config.efficiencies in every predictor.
Prediction predict_modular(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config);
Prediction predict_full(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config);
Prediction predict_block(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config);
/// Dispatches on spec.topology.
Prediction predict(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config);

// ------------------------------------------------------------ quantum data

/// Model-level P_l(0) of each module for an input state over m * k qubits
/// (module l's input register is qubits [l k, (l + 1) k)).
std::vector<double> module_zero_probabilities(const DensityMatrix& input, const NetworkSpec& spec);
std::vector<double> module_zero_probabilities(const QState& input, const NetworkSpec& spec);

/// sum_l p_l P_l(0).
double expected_quantum_output(const DensityMatrix& input, const NetworkSpec& spec);
double expected_quantum_output(const QState& input, const NetworkSpec& spec);

/// Post-circuit state of all m modules (m (2k + 1) qubits, module l at
/// [l (2k+1), (l+1)(2k+1)) ordered control, input register, weight register).
QState joint_circuit_state(const QState& input, const NetworkSpec& spec, int max_qubits = kDefaultMaxQubits);

/// Exact control zero-pattern distribution for a (possibly mixed) input.
std::vector<double> joint_zero_patterns(const DensityMatrix& input, const NetworkSpec& spec,
                                        int max_qubits = kDefaultMaxQubits);

/// MODULAR prediction for quantum data. With joint = false the control qubits
/// are sampled independently from their reduced-state probabilities; with
/// joint = true they are sampled from the exact joint distribution.
Prediction predict_quantum_input(const QState& input, const NetworkSpec& spec, const ProtocolConfig& config,
                                 bool joint);
Prediction predict_quantum_input(const DensityMatrix& input, const NetworkSpec& spec,
                                 const ProtocolConfig& config, bool joint);

/// Random network for fixtures and initialization: Gaussian weights,
/// efficiencies uniform in [p_min, p_max].
NetworkSpec random_network(ModuleLayout layout, Topology topology, int repetitions, int outputs,
                           std::uint64_t seed, double p_min = 0.0, double p_max = 1.0);

}  // namespace qnn
