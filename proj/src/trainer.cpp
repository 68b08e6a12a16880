#include "qnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnn/errors.hpp"
#include "qnn/rng.hpp"

namespace qnn {

namespace {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

void check_compatible(const NetworkSpec& spec, const Dataset& data) {
  spec.validate();
  data.validate();
  if (data.pairs.empty()) return;
  if (data.input_dim() != static_cast<std::size_t>(spec.layout.N)) {
    throw Error(ErrorCode::DimensionMismatch, "dataset inputs have N = " + std::to_string(data.input_dim()) +
                                                  ", network expects " + std::to_string(spec.layout.N));
  }
  if (data.output_dim() != static_cast<std::size_t>(spec.outputs)) {
    throw Error(ErrorCode::DimensionMismatch, "dataset targets have Q = " + std::to_string(data.output_dim()) +
                                                  ", network has " + std::to_string(spec.outputs));
  }
}

void check_weight_floor(const NetworkSpec& spec) {
  for (int r = 0; r < spec.repetitions; ++r) {
    for (int l = 0; l < spec.layout.m; ++l) {
      if (norm2(spec.weights[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)]) < kWeightNormFloor) {
        throw ZeroNormPieceError(static_cast<std::size_t>(r * spec.layout.m + l), "weight");
      }
    }
  }
}

/// Pieces of x routed to each hidden unit h = r * m + l.
class Router {
 public:
  explicit Router(const NetworkSpec& spec) : spec_(spec) {
    for (int r = 0; r < spec.repetitions; ++r) {
      perms_.push_back(input_permutation(spec.layout.N, spec.partition_mode, spec.partition_seed,
                                         static_cast<std::uint64_t>(r)));
    }
  }

  std::vector<Vector> pieces(std::span<const double> x) const {
    std::vector<Vector> out;
    for (const auto& perm : perms_) {
      auto p = partition(x, spec_.layout, perm, spec_.pad_value);
      for (auto& v : p) out.push_back(std::move(v));
    }
    return out;
  }

 private:
  const NetworkSpec& spec_;
  std::vector<std::vector<std::size_t>> perms_;
};

const Vector& weight_of(const NetworkSpec& spec, int h) {
  return spec.weights[static_cast<std::size_t>(h / spec.layout.m)][static_cast<std::size_t>(h % spec.layout.m)];
}

/// Network outputs for pre-routed pieces; also returns the cosines.
std::vector<double> forward(const NetworkSpec& spec, const std::vector<Vector>& pieces, std::vector<double>& cosines) {
  const int H = spec.hidden_units();
  cosines.resize(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) cosines[static_cast<std::size_t>(h)] = cosine_similarity(pieces[static_cast<std::size_t>(h)], weight_of(spec, h));
  std::vector<double> y(static_cast<std::size_t>(spec.outputs), 0.0);
  for (int q = 0; q < spec.outputs; ++q) {
    double acc = 0.0;
    for (int h = 0; h < H; ++h) {
      acc += spec.efficiencies[static_cast<std::size_t>(h)][static_cast<std::size_t>(q)] *
             quadratic_activation(cosines[static_cast<std::size_t>(h)]);
    }
    y[static_cast<std::size_t>(q)] = acc / spec.repetitions;
  }
  return y;
}

std::size_t parameter_count(const NetworkSpec& spec) {
  const auto H = static_cast<std::size_t>(spec.hidden_units());
  return H * static_cast<std::size_t>(spec.layout.register_dim()) + H * static_cast<std::size_t>(spec.outputs);
}

}  // namespace

void Dataset::validate() const {
  if (pairs.empty()) return;
  const std::size_t n = input_dim();
  const std::size_t q = output_dim();
  if (n == 0 || q == 0) throw Error(ErrorCode::DimensionMismatch, "dataset rows need inputs and targets");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].x.size() != n || pairs[i].y.size() != q) {
      throw Error(ErrorCode::DimensionMismatch, "dataset row " + std::to_string(i) + " has inconsistent lengths");
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be a finite non-negative number");
  }
  if (max_epochs < 1) throw Error(ErrorCode::InvalidConfig, "max_epochs must be >= 1");
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be >= 0");
}

double loss(const NetworkSpec& spec, const Dataset& data) {
  check_compatible(spec, data);
  const Router router(spec);
  const auto n = static_cast<std::int64_t>(data.pairs.size());
  std::vector<double> per_datum(data.pairs.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& s = data.pairs[static_cast<std::size_t>(i)];
    std::vector<double> cosines;
    const auto y = forward(spec, router.pieces(s.x), cosines);
    double acc = 0.0;
    for (std::size_t q = 0; q < y.size(); ++q) acc += (s.y[q] - y[q]) * (s.y[q] - y[q]);
    per_datum[static_cast<std::size_t>(i)] = acc;
  }
  CompensatedSum total;
  for (double v : per_datum) total.add(v);
  return total.value();
}

Gradient gradient(const NetworkSpec& spec, const Dataset& data) {
  check_compatible(spec, data);
  check_weight_floor(spec);
  const Router router(spec);
  const int H = spec.hidden_units();
  const int Q = spec.outputs;
  const auto len = static_cast<std::size_t>(spec.layout.register_dim());
  const std::size_t P = parameter_count(spec);
  const std::size_t w_block = static_cast<std::size_t>(H) * len;
  const double inv_r = 1.0 / spec.repetitions;

  // Row i holds datum i's contribution; rows are summed in datum order.
  const auto n = static_cast<std::int64_t>(data.pairs.size());
  std::vector<double> rows(data.pairs.size() * P, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& s = data.pairs[static_cast<std::size_t>(i)];
    double* row = rows.data() + static_cast<std::size_t>(i) * P;
    const auto pieces = router.pieces(s.x);
    std::vector<double> cosines;
    const auto y = forward(spec, pieces, cosines);
    for (int h = 0; h < H; ++h) {
      const auto hs = static_cast<std::size_t>(h);
      const double c = cosines[hs];
      const double act = quadratic_activation(c);
      double upstream = 0.0;  // dL/dc_h
      for (int q = 0; q < Q; ++q) {
        const auto qs = static_cast<std::size_t>(q);
        const double g = 2.0 * (y[qs] - s.y[qs]);
        row[w_block + hs * static_cast<std::size_t>(Q) + qs] = g * inv_r * act;
        upstream += g * inv_r * spec.efficiencies[hs][qs] * (-c);
      }
      const Vector& xp = pieces[hs];
      const Vector& w = weight_of(spec, h);
      const double nx = norm2(xp);
      const double nw = norm2(w);
      for (std::size_t j = 0; j < len; ++j) {
        const double dc_dw = xp[j] / (nx * nw) - c * w[j] / (nw * nw);
        row[hs * len + j] = upstream * dc_dw;
      }
    }
  }

  std::vector<double> flat(P);
  for (std::size_t p = 0; p < P; ++p) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < data.pairs.size(); ++i) acc.add(rows[i * P + p]);
    flat[p] = acc.value();
  }

  Gradient g;
  g.weights.assign(static_cast<std::size_t>(spec.repetitions), std::vector<Vector>(static_cast<std::size_t>(spec.layout.m), Vector(len)));
  g.efficiencies.assign(static_cast<std::size_t>(H), std::vector<double>(static_cast<std::size_t>(Q)));
  for (int h = 0; h < H; ++h) {
    auto& wg = g.weights[static_cast<std::size_t>(h / spec.layout.m)][static_cast<std::size_t>(h % spec.layout.m)];
    for (std::size_t j = 0; j < len; ++j) wg[j] = flat[static_cast<std::size_t>(h) * len + j];
    for (int q = 0; q < Q; ++q) {
      g.efficiencies[static_cast<std::size_t>(h)][static_cast<std::size_t>(q)] =
          flat[w_block + static_cast<std::size_t>(h * Q + q)];
    }
  }
  return g;
}

TrainResult train(const NetworkSpec& initial, const Dataset& data, const TrainConfig& config) {
  config.validate();
  check_compatible(initial, data);
  TrainResult result{initial, {}, 0, false};
  NetworkSpec& spec = result.spec;

  double previous = loss(spec, data);
  if (!std::isfinite(previous)) throw Error(ErrorCode::DivergenceDetected, "initial loss is not finite");
  result.loss_trace.push_back(previous);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const Gradient g = gradient(spec, data);
    for (std::size_t r = 0; r < spec.weights.size(); ++r) {
      for (std::size_t l = 0; l < spec.weights[r].size(); ++l) {
        auto& w = spec.weights[r][l];
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= config.learning_rate * g.weights[r][l][j];
      }
    }
    for (std::size_t h = 0; h < spec.efficiencies.size(); ++h) {
      for (std::size_t q = 0; q < spec.efficiencies[h].size(); ++q) {
        double& p = spec.efficiencies[h][q];
        p = std::clamp(p - config.learning_rate * g.efficiencies[h][q], 0.0, 1.0);
      }
    }
    check_weight_floor(spec);

    const double current = loss(spec, data);
    if (!std::isfinite(current)) {
      throw Error(ErrorCode::DivergenceDetected, "loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(current);
    result.epochs_run = epoch;
    if (config.on_epoch) config.on_epoch(epoch, spec, current);
    const double decrease = previous - current;
    previous = current;
    if (decrease >= 0.0 && decrease < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

SampledEvaluation evaluate_sampled(const NetworkSpec& spec, const Dataset& data, const ProtocolConfig& config) {
  check_compatible(spec, data);
  config.validate();
  SampledEvaluation ev;
  ev.shots = config.shots;
  ev.seed = config.seed;
  CompensatedSum oracle_loss;
  CompensatedSum sampled_loss;
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    const auto& s = data.pairs[i];
    ProtocolConfig cfg = config;
    cfg.seed = rng::derive(config.seed, rng::Purpose::Datum, {i}).value;
    auto oracle = oracle_network(s.x, spec);
    auto sampled = predict(s.x, spec, cfg);
    for (std::size_t q = 0; q < s.y.size(); ++q) {
      oracle_loss.add((s.y[q] - oracle.values[q]) * (s.y[q] - oracle.values[q]));
      sampled_loss.add((s.y[q] - sampled.values[q]) * (s.y[q] - sampled.values[q]));
    }
    ev.oracle.push_back(std::move(oracle));
    ev.sampled.push_back(std::move(sampled));
  }
  ev.oracle_loss = oracle_loss.value();
  ev.sampled_loss = sampled_loss.value();
  ev.gap = std::abs(ev.sampled_loss - ev.oracle_loss);
  return ev;
}

}  // namespace qnn
