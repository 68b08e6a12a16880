#include "qnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "qnn/errors.hpp"
#include "qnn/rng.hpp"
#include "qnn/swap_test.hpp"

namespace qnn {

namespace {

double piece_norm(std::span<const double> v) {
  double scale = 0.0;
  for (double e : v) scale = std::max(scale, std::abs(e));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double e : v) sum += (e / scale) * (e / scale);
  return scale * std::sqrt(sum);
}

void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) throw Error(code, message);
}

ProtocolConfig batch_config(const ProtocolConfig& base, const NetworkSpec& spec, int r, int q) {
  ProtocolConfig cfg = base;
  cfg.efficiencies.resize(static_cast<std::size_t>(spec.layout.m));
  for (int l = 0; l < spec.layout.m; ++l) cfg.efficiencies[static_cast<std::size_t>(l)] = spec.efficiency(r, l, q);
  return cfg;
}

/// Model-level P(0) of every module of repetition r for a classical input.
std::vector<double> repetition_zero_probabilities(std::span<const double> x, const NetworkSpec& spec, int r) {
  const auto perm = input_permutation(spec.layout.N, spec.partition_mode, spec.partition_seed,
                                      static_cast<std::uint64_t>(r));
  const auto pieces = partition(x, spec.layout, perm, spec.pad_value);
  std::vector<double> p_zeros(pieces.size());
  for (std::size_t l = 0; l < pieces.size(); ++l) {
    const QState input = amplitude_encode(pieces[l]);
    const QState weight = amplitude_encode(spec.weights[static_cast<std::size_t>(r)][l]);
    p_zeros[l] = swap_test_analytic(input, weight).p_zero;
  }
  return p_zeros;
}

void require_modular_quantum(const NetworkSpec& spec, int input_qubits) {
  spec.validate();
  require(spec.topology == Topology::Modular, ErrorCode::InvalidConfig,
          "quantum inputs are supported for the modular topology only");
  require(spec.partition_mode == PartitionMode::Contiguous, ErrorCode::InvalidConfig,
          "quantum inputs cannot be permuted; use contiguous partitioning");
  require(input_qubits == spec.layout.m * spec.layout.k, ErrorCode::DimensionMismatch,
          "input state has " + std::to_string(input_qubits) + " qubits, network expects m*k = " +
              std::to_string(spec.layout.m * spec.layout.k));
}

std::vector<int> module_register(const ModuleLayout& layout, int l) {
  std::vector<int> qubits(static_cast<std::size_t>(layout.k));
  std::iota(qubits.begin(), qubits.end(), l * layout.k);
  return qubits;
}

Prediction sampled_prediction(std::span<const OutcomeString> strings, std::uint64_t shots) {
  const auto report = estimate(strings, shots);
  Prediction p;
  p.values = {report.f_hat};
  p.shots_used = shots;
  p.error_bound = report.std_error_bound;
  return p;
}

}  // namespace

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Modular: return "modular";
    case Topology::FullRQ: return "full_rq";
    case Topology::Block: return "block";
  }
  return "unknown";
}

std::string_view to_string(PartitionMode p) {
  return p == PartitionMode::Contiguous ? "contiguous" : "seeded_random_permutation";
}

Topology topology_from_string(std::string_view s) {
  if (s == "modular") return Topology::Modular;
  if (s == "full_rq") return Topology::FullRQ;
  if (s == "block") return Topology::Block;
  throw Error(ErrorCode::InvalidConfig, "unknown topology '" + std::string(s) + "'");
}

PartitionMode partition_mode_from_string(std::string_view s) {
  if (s == "contiguous") return PartitionMode::Contiguous;
  if (s == "seeded_random_permutation") return PartitionMode::SeededRandomPermutation;
  throw Error(ErrorCode::InvalidConfig, "unknown partition_mode '" + std::string(s) + "'");
}

// ------------------------------------------------------------ NetworkSpec

void NetworkSpec::validate() const {
  require(layout.k >= 1 && layout.k <= 30, ErrorCode::DimensionMismatch, "k must lie in [1, 30]");
  require(layout.N >= 1, ErrorCode::DimensionMismatch, "N must be positive");
  require(layout.is_minimal(), ErrorCode::DimensionMismatch,
          "layout m=" + std::to_string(layout.m) + " is not ceil(N / 2^k) for N=" + std::to_string(layout.N) +
              ", k=" + std::to_string(layout.k));
  require(repetitions >= 1 && outputs >= 1, ErrorCode::DimensionMismatch, "R and Q must be positive");
  switch (topology) {
    case Topology::Modular:
      require(repetitions == 1 && outputs == 1, ErrorCode::DimensionMismatch, "modular topology has R = Q = 1");
      break;
    case Topology::FullRQ:
      require(layout.m == 1, ErrorCode::DimensionMismatch, "full_rq topology uses a single module (N <= 2^k)");
      break;
    case Topology::Block: break;
  }
  require(std::isfinite(pad_value), ErrorCode::InvalidConfig, "pad_value must be finite");

  require(weights.size() == static_cast<std::size_t>(repetitions), ErrorCode::DimensionMismatch,
          "expected " + std::to_string(repetitions) + " weight sets, got " + std::to_string(weights.size()));
  const auto piece_len = static_cast<std::size_t>(layout.register_dim());
  for (int r = 0; r < repetitions; ++r) {
    const auto& set = weights[static_cast<std::size_t>(r)];
    require(set.size() == static_cast<std::size_t>(layout.m), ErrorCode::DimensionMismatch,
            "weight set " + std::to_string(r) + " has " + std::to_string(set.size()) + " pieces, expected " +
                std::to_string(layout.m));
    for (int l = 0; l < layout.m; ++l) {
      const auto& piece = set[static_cast<std::size_t>(l)];
      require(piece.size() == piece_len, ErrorCode::DimensionMismatch,
              "weight piece " + std::to_string(r * layout.m + l) + " has length " + std::to_string(piece.size()) +
                  ", expected 2^k = " + std::to_string(piece_len));
      if (piece_norm(piece) <= kZeroNormFloor) {
        throw ZeroNormPieceError(static_cast<std::size_t>(r * layout.m + l), "weight");
      }
    }
  }
  require(efficiencies.size() == static_cast<std::size_t>(hidden_units()), ErrorCode::DimensionMismatch,
          "expected " + std::to_string(hidden_units()) + " efficiency rows, got " +
              std::to_string(efficiencies.size()));
  for (const auto& row : efficiencies) {
    require(row.size() == static_cast<std::size_t>(outputs), ErrorCode::DimensionMismatch,
            "efficiency rows must have Q = " + std::to_string(outputs) + " entries");
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidEfficiency, "efficiency " + std::to_string(p) + " outside [0, 1]");
      }
    }
  }
}

NetworkSpec NetworkSpec::modular(int k, int N, std::vector<Vector> pieces, std::vector<double> efficiencies) {
  NetworkSpec spec;
  spec.layout = plan_layout(N, k);
  spec.topology = Topology::Modular;
  spec.weights = {std::move(pieces)};
  for (double p : efficiencies) spec.efficiencies.push_back({p});
  spec.validate();
  return spec;
}

NetworkSpec NetworkSpec::full(int k, std::vector<Vector> weights, std::vector<std::vector<double>> efficiencies) {
  NetworkSpec spec;
  spec.layout = plan_layout(1 << k, k);
  spec.topology = Topology::FullRQ;
  spec.repetitions = static_cast<int>(weights.size());
  spec.outputs = efficiencies.empty() ? 0 : static_cast<int>(efficiencies.front().size());
  for (auto& w : weights) spec.weights.push_back({std::move(w)});
  spec.efficiencies = std::move(efficiencies);
  spec.validate();
  return spec;
}

NetworkSpec NetworkSpec::block(ModuleLayout layout, std::vector<std::vector<Vector>> weights,
                               std::vector<std::vector<double>> efficiencies) {
  NetworkSpec spec;
  spec.layout = layout;
  spec.topology = Topology::Block;
  spec.repetitions = static_cast<int>(weights.size());
  spec.outputs = efficiencies.empty() ? 0 : static_cast<int>(efficiencies.front().size());
  spec.weights = std::move(weights);
  spec.efficiencies = std::move(efficiencies);
  spec.validate();
  return spec;
}

// -------------------------------------------------------------- layout

ModuleLayout plan_layout(int N, int k) {
  require(N >= 1, ErrorCode::InvalidConfig, "N must be positive");
  require(k >= 1 && k <= 30, ErrorCode::InvalidConfig, "k must lie in [1, 30]");
  const long long cap = 1LL << k;
  ModuleLayout layout;
  layout.k = k;
  layout.N = N;
  layout.m = static_cast<int>((N + cap - 1) / cap);
  return layout;
}

std::vector<std::size_t> input_permutation(int N, PartitionMode mode, std::uint64_t seed, std::uint64_t repetition) {
  std::vector<std::size_t> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (mode == PartitionMode::Contiguous) return perm;
  // Fisher-Yates over a counter-based stream so the permutation is the same
  // on every platform.
  rng::StreamEngine engine(rng::derive(seed, rng::Purpose::Partition, {repetition}));
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>((static_cast<unsigned __int128>(engine()) * i) >> 64);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<Vector> partition(std::span<const double> x, const ModuleLayout& layout,
                              std::span<const std::size_t> permutation, double pad_value) {
  require(x.size() == static_cast<std::size_t>(layout.N), ErrorCode::DimensionMismatch,
          "input has " + std::to_string(x.size()) + " entries, layout expects N = " + std::to_string(layout.N));
  require(permutation.size() == x.size(), ErrorCode::DimensionMismatch, "permutation length differs from N");
  const auto len = static_cast<std::size_t>(layout.register_dim());
  std::vector<Vector> pieces(static_cast<std::size_t>(layout.m), Vector(len, pad_value));
  for (std::size_t i = 0; i < x.size(); ++i) pieces[i / len][i % len] = x[permutation[i]];
  for (std::size_t l = 0; l < pieces.size(); ++l) {
    if (piece_norm(pieces[l]) <= kZeroNormFloor) throw ZeroNormPieceError(l, "input");
  }
  return pieces;
}

std::vector<Vector> partition(std::span<const double> x, const ModuleLayout& layout, PartitionMode mode,
                              double pad_value, std::uint64_t seed, std::uint64_t repetition) {
  const auto perm = input_permutation(layout.N, mode, seed, repetition);
  return partition(x, layout, perm, pad_value);
}

Vector unpartition(std::span<const Vector> pieces, const ModuleLayout& layout,
                   std::span<const std::size_t> permutation) {
  const auto len = static_cast<std::size_t>(layout.register_dim());
  require(pieces.size() == static_cast<std::size_t>(layout.m), ErrorCode::DimensionMismatch, "piece count differs from m");
  require(permutation.size() == static_cast<std::size_t>(layout.N), ErrorCode::DimensionMismatch,
          "permutation length differs from N");
  Vector x(permutation.size());
  for (std::size_t i = 0; i < permutation.size(); ++i) x[permutation[i]] = pieces[i / len][i % len];
  return x;
}

// -------------------------------------------------------------- oracle

std::vector<double> hidden_activations(std::span<const double> x, const NetworkSpec& spec) {
  std::vector<double> act;
  act.reserve(static_cast<std::size_t>(spec.hidden_units()));
  for (int r = 0; r < spec.repetitions; ++r) {
    const auto pieces = partition(x, spec.layout, spec.partition_mode, spec.pad_value, spec.partition_seed,
                                  static_cast<std::uint64_t>(r));
    for (int l = 0; l < spec.layout.m; ++l) {
      const double c = cosine_similarity(pieces[static_cast<std::size_t>(l)],
                                         spec.weights[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)]);
      act.push_back(quadratic_activation(c));
    }
  }
  return act;
}

std::vector<std::vector<bool>> connectivity_mask(const NetworkSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.layout.N);
  const auto len = static_cast<std::size_t>(spec.layout.register_dim());
  std::vector<std::vector<bool>> mask(n, std::vector<bool>(static_cast<std::size_t>(spec.hidden_units()), false));
  for (int r = 0; r < spec.repetitions; ++r) {
    const auto perm = input_permutation(spec.layout.N, spec.partition_mode, spec.partition_seed,
                                        static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const auto h = static_cast<std::size_t>(r * spec.layout.m) + i / len;
      mask[perm[i]][h] = true;
    }
  }
  return mask;
}

Prediction oracle_network(std::span<const double> x, const NetworkSpec& spec) {
  spec.validate();
  const auto act = hidden_activations(x, spec);
  Prediction out;
  out.values.assign(static_cast<std::size_t>(spec.outputs), 0.0);
  for (int q = 0; q < spec.outputs; ++q) {
    double y = 0.0;
    for (int h = 0; h < spec.hidden_units(); ++h) {
      y += spec.efficiencies[static_cast<std::size_t>(h)][static_cast<std::size_t>(q)] * act[static_cast<std::size_t>(h)];
    }
    out.values[static_cast<std::size_t>(q)] = y / spec.repetitions;
  }
  return out;
}

// ----------------------------------------------------------- predictors

Prediction predict_modular(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config) {
  spec.validate();
  require(spec.topology == Topology::Modular, ErrorCode::InvalidConfig, "predict_modular needs a modular spec");
  const auto p_zeros = repetition_zero_probabilities(x, spec, 0);
  const auto strings = run_protocol(p_zeros, batch_config(config, spec, 0, 0));
  return sampled_prediction(strings, config.shots);
}

Prediction predict_full(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config) {
  spec.validate();
  config.validate();
  require(spec.topology == Topology::FullRQ, ErrorCode::InvalidConfig, "predict_full needs a full_rq spec");
  const int R = spec.repetitions;
  const int Q = spec.outputs;
  // b[q][r] = b_rq
  std::vector<std::vector<OutcomeString>> b(static_cast<std::size_t>(Q), std::vector<OutcomeString>(static_cast<std::size_t>(R)));
  for (int r = 0; r < R; ++r) {
    const double p_zero = repetition_zero_probabilities(x, spec, r).front();
    for (int q = 0; q < Q; ++q) {
      b[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] =
          measure_lossy(p_zero, spec.efficiency(r, 0, q), config.shots, config.loss_mode,
                        protocol_stream(config.seed, 0, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(q)));
    }
  }
  const std::uint64_t denominator = static_cast<std::uint64_t>(R) * config.shots;
  Prediction out;
  for (int q = 0; q < Q; ++q) {
    const OutcomeString b_q = concat(b[static_cast<std::size_t>(q)]);
    out.values.push_back(static_cast<double>(b_q.count(Symbol::Zero)) / static_cast<double>(denominator));
  }
  out.shots_used = static_cast<std::uint64_t>(Q) * denominator;
  out.error_bound = 1.0 / std::sqrt(static_cast<double>(denominator));
  return out;
}

Prediction predict_block(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config) {
  spec.validate();
  config.validate();
  const int R = spec.repetitions;
  const int Q = spec.outputs;
  std::vector<std::vector<OutcomeString>> per_output(static_cast<std::size_t>(Q));
  for (int r = 0; r < R; ++r) {
    const auto p_zeros = repetition_zero_probabilities(x, spec, r);
    for (int q = 0; q < Q; ++q) {
      auto strings = run_protocol(p_zeros, batch_config(config, spec, r, q), static_cast<std::uint64_t>(r),
                                  static_cast<std::uint64_t>(q));
      auto& dst = per_output[static_cast<std::size_t>(q)];
      for (auto& s : strings) dst.push_back(std::move(s));
    }
  }
  const std::uint64_t denominator = static_cast<std::uint64_t>(R) * config.shots;
  Prediction out;
  for (int q = 0; q < Q; ++q) {
    out.values.push_back(estimate(per_output[static_cast<std::size_t>(q)], denominator).f_hat);
  }
  out.shots_used = static_cast<std::uint64_t>(Q) * denominator;
  out.error_bound = 1.0 / std::sqrt(static_cast<double>(denominator));
  return out;
}

Prediction predict(std::span<const double> x, const NetworkSpec& spec, const ProtocolConfig& config) {
  switch (spec.topology) {
    case Topology::Modular: return predict_modular(x, spec, config);
    case Topology::FullRQ: return predict_full(x, spec, config);
    case Topology::Block: return predict_block(x, spec, config);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown topology");
}

// --------------------------------------------------------- quantum data

std::vector<double> module_zero_probabilities(const DensityMatrix& input, const NetworkSpec& spec) {
  require_modular_quantum(spec, input.num_qubits());
  std::vector<double> p(static_cast<std::size_t>(spec.layout.m));
  for (int l = 0; l < spec.layout.m; ++l) {
    const auto reg = module_register(spec.layout, l);
    const DensityMatrix local = input.num_qubits() == spec.layout.k ? input : partial_trace(input, reg);
    p[static_cast<std::size_t>(l)] = swap_test_mixed(local, amplitude_encode(spec.weights[0][static_cast<std::size_t>(l)])).p_zero;
  }
  return p;
}

std::vector<double> module_zero_probabilities(const QState& input, const NetworkSpec& spec) {
  require_modular_quantum(spec, input.num_qubits());
  std::vector<double> p(static_cast<std::size_t>(spec.layout.m));
  for (int l = 0; l < spec.layout.m; ++l) {
    const auto local = reduced_density(input, module_register(spec.layout, l));
    p[static_cast<std::size_t>(l)] = swap_test_mixed(local, amplitude_encode(spec.weights[0][static_cast<std::size_t>(l)])).p_zero;
  }
  return p;
}

double expected_quantum_output(const DensityMatrix& input, const NetworkSpec& spec) {
  const auto p = module_zero_probabilities(input, spec);
  double f = 0.0;
  for (int l = 0; l < spec.layout.m; ++l) f += spec.efficiency(0, l, 0) * p[static_cast<std::size_t>(l)];
  return f;
}

double expected_quantum_output(const QState& input, const NetworkSpec& spec) {
  const auto p = module_zero_probabilities(input, spec);
  double f = 0.0;
  for (int l = 0; l < spec.layout.m; ++l) f += spec.efficiency(0, l, 0) * p[static_cast<std::size_t>(l)];
  return f;
}

QState joint_circuit_state(const QState& input, const NetworkSpec& spec, int max_qubits) {
  require_modular_quantum(spec, input.num_qubits());
  const int k = spec.layout.k;
  const int m = spec.layout.m;
  const int per_module = 2 * k + 1;
  const int n = m * per_module;
  if (n > max_qubits) {
    throw Error(ErrorCode::RegisterTooLarge,
                std::to_string(n) + " qubits exceed the limit of " + std::to_string(max_qubits));
  }
  // |0>|x^(1)>|w^(1)> ... |0>|x^(m)>|w^(m)> with the data registers entangled
  // as given by `input`.
  QState weights = amplitude_encode(spec.weights[0][0]);
  for (int l = 1; l < m; ++l) weights = tensor_product(weights, amplitude_encode(spec.weights[0][static_cast<std::size_t>(l)]));

  const std::uint64_t reg_mask = (std::uint64_t{1} << k) - 1;
  std::vector<Complex> amps(std::size_t{1} << n, Complex{0.0, 0.0});
  for (std::uint64_t a = 0; a < input.dim(); ++a) {
    if (input[a] == Complex{0.0, 0.0}) continue;
    for (std::uint64_t b = 0; b < weights.dim(); ++b) {
      std::uint64_t full = 0;
      for (int l = 0; l < m; ++l) {
        const int shift = (m - 1 - l) * k;
        const std::uint64_t block = (((a >> shift) & reg_mask) << k) | ((b >> shift) & reg_mask);
        full |= block << ((m - 1 - l) * per_module);
      }
      amps[full] = input[a] * weights[b];
    }
  }
  for (int l = 0; l < m; ++l) {
    const int control = l * per_module;
    apply_swap_test_circuit(amps, n, control, control + 1, control + 1 + k, k);
  }
  return QState::normalized(std::move(amps));
}

std::vector<double> joint_zero_patterns(const DensityMatrix& input, const NetworkSpec& spec, int max_qubits) {
  require_modular_quantum(spec, input.num_qubits());
  std::vector<double> total(std::size_t{1} << spec.layout.m, 0.0);
  for (const auto& [weight, state] : input.spectral_mixture()) {
    const auto patterns = control_zero_patterns(joint_circuit_state(state, spec, max_qubits), spec.layout.m);
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += weight * patterns[j];
  }
  double sum = 0.0;
  for (double p : total) sum += p;
  for (double& p : total) p /= sum;
  return total;
}

Prediction predict_quantum_input(const QState& input, const NetworkSpec& spec, const ProtocolConfig& config,
                                 bool joint) {
  const ProtocolConfig cfg = batch_config(config, spec, 0, 0);
  if (joint) {
    return sampled_prediction(run_protocol_joint(joint_circuit_state(input, spec, config.max_qubits), cfg),
                              config.shots);
  }
  return sampled_prediction(run_protocol(module_zero_probabilities(input, spec), cfg), config.shots);
}

Prediction predict_quantum_input(const DensityMatrix& input, const NetworkSpec& spec,
                                 const ProtocolConfig& config, bool joint) {
  const ProtocolConfig cfg = batch_config(config, spec, 0, 0);
  if (joint) {
    return sampled_prediction(sample_zero_patterns(joint_zero_patterns(input, spec, config.max_qubits), cfg),
                              config.shots);
  }
  return sampled_prediction(run_protocol(module_zero_probabilities(input, spec), cfg), config.shots);
}

// -------------------------------------------------------------- fixtures

NetworkSpec random_network(ModuleLayout layout, Topology topology, int repetitions, int outputs,
                           std::uint64_t seed, double p_min, double p_max) {
  rng::StreamEngine engine(rng::derive(seed, rng::Purpose::Fixture, {}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  NetworkSpec spec;
  spec.layout = layout;
  spec.topology = topology;
  spec.repetitions = repetitions;
  spec.outputs = outputs;
  const auto len = static_cast<std::size_t>(layout.register_dim());
  spec.weights.assign(static_cast<std::size_t>(repetitions), std::vector<Vector>(static_cast<std::size_t>(layout.m)));
  for (auto& set : spec.weights) {
    for (auto& piece : set) {
      piece.resize(len);
      for (auto& w : piece) w = gauss(engine);
    }
  }
  spec.efficiencies.assign(static_cast<std::size_t>(spec.hidden_units()),
                           std::vector<double>(static_cast<std::size_t>(outputs)));
  for (auto& row : spec.efficiencies) {
    for (auto& p : row) p = p_min + (p_max - p_min) * engine.uniform01();
  }
  spec.validate();
  return spec;
}

}  // namespace qnn
