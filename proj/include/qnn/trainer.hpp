#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qnn/measurement.hpp"
#include "qnn/model.hpp"

namespace qnn {

struct Sample {
  Vector x;
  std::vector<double> y;
};

/// Supervised pairs sharing one input length N and one target length Q.
struct Dataset {
  std::vector<Sample> pairs;

  std::size_t input_dim() const { return pairs.empty() ? 0 : pairs.front().x.size(); }
  std::size_t output_dim() const { return pairs.empty() ? 0 : pairs.front().y.size(); }
  void validate() const;
};

enum class LossMetric { SquaredError };

struct TrainConfig {
  double learning_rate = 1e-2;
  int max_epochs = 5000;
  LossMetric loss_metric = LossMetric::SquaredError;
  std::uint64_t seed = 0;
  /// Stop once 0 <= loss(t-1) - loss(t) < tolerance.
  double tolerance = 1e-12;
  /// Called after every projected step with the epoch number, the updated
  /// spec and its loss.
  std::function<void(int, const NetworkSpec&, double)> on_epoch;

  void validate() const;
};

/// Weight pieces below this norm during training raise ZeroNormPiece.
inline constexpr double kWeightNormFloor = 1e-8;

/// Same shape as NetworkSpec::weights and NetworkSpec::efficiencies.
struct Gradient {
  std::vector<std::vector<Vector>> weights;
  std::vector<std::vector<double>> efficiencies;
};

/// sum_i || y_i - oracle_network(x_i) ||^2
double loss(const NetworkSpec& spec, const Dataset& data);

/// Exact partials of `loss` with respect to every weight entry and efficiency.
Gradient gradient(const NetworkSpec& spec, const Dataset& data);

struct TrainResult {
  NetworkSpec spec;
  std::vector<double> loss_trace;  // entry 0 is the initial loss
  int epochs_run = 0;
  bool converged = false;
};

/// Projected gradient descent: a plain step on (w, p), then every efficiency
/// clipped to [0, 1].
TrainResult train(const NetworkSpec& initial, const Dataset& data, const TrainConfig& config);

struct SampledEvaluation {
  double oracle_loss = 0.0;
  double sampled_loss = 0.0;
  double gap = 0.0;  // |sampled_loss - oracle_loss|
  std::vector<Prediction> oracle;
  std::vector<Prediction> sampled;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

/// Runs the sampled predictor on every datum (datum i uses a sub-seed derived
/// from config.seed and i) and compares its loss with the oracle loss.
SampledEvaluation evaluate_sampled(const NetworkSpec& spec, const Dataset& data, const ProtocolConfig& config);

}  // namespace qnn
