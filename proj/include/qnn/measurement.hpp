#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnn/kernels.hpp"
#include "qnn/quantum_core.hpp"
#include "qnn/rng.hpp"
#include "qnn/swap_test.hpp"

namespace qnn {

/// Record of one lossy measurement sequence over {Missing, Zero, One}.
class OutcomeString {
 public:
  OutcomeString() = default;
  explicit OutcomeString(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  std::size_t size() const noexcept { return symbols_.size(); }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::uint64_t count(Symbol s) const;

  /// '0', '1' and '.' (missing).
  std::string to_text() const;
  static OutcomeString from_text(std::string_view text);

  friend bool operator==(const OutcomeString&, const OutcomeString&) = default;

 private:
  std::vector<Symbol> symbols_;
};

/// Per-qubit efficiencies, shot budget, loss model and master seed of a
/// computational measurement protocol.
struct ProtocolConfig {
  std::uint64_t shots = 1000;
  std::vector<double> efficiencies;
  LossMode loss_mode = LossMode::StochasticThinning;
  std::uint64_t seed = 0;
  int max_qubits = kDefaultMaxQubits;

  void validate() const;
};

struct EstimateReport {
  std::uint64_t n_zero = 0;
  std::uint64_t shots_total = 0;
  double f_hat = 0.0;
  double std_error_bound = 0.0;
};

/// Sub-stream for qubit `module` of batch (repetition, column).
rng::StreamKey protocol_stream(std::uint64_t seed, std::uint64_t module, std::uint64_t repetition = 0,
                               std::uint64_t column = 0);

OutcomeString measure_lossy(double p_zero, double efficiency, std::uint64_t shots, LossMode mode,
                            rng::StreamKey stream);

/// Independent lossy measurements of m control qubits with model-level
/// zero probabilities `p_zeros`; qubit l draws from protocol_stream(seed, l,
/// repetition, column).
std::vector<OutcomeString> run_protocol(std::span<const double> p_zeros, const ProtocolConfig& config,
                                        std::uint64_t repetition = 0, std::uint64_t column = 0);

/// Probability of every model zero-pattern of the m control qubits of a
/// post-circuit joint state. Module l occupies qubits [l(2k+1), (l+1)(2k+1))
/// with its control first; bit (m-1-l) of the pattern index set means model
/// outcome Zero on control l.
std::vector<double> control_zero_patterns(const QState& joint_state, int modules);

/// Samples all control qubits jointly from an exact zero-pattern distribution,
/// then applies per-qubit loss.
std::vector<OutcomeString> sample_zero_patterns(std::span<const double> pattern_probabilities,
                                                const ProtocolConfig& config, std::uint64_t repetition = 0,
                                                std::uint64_t column = 0);

/// run_protocol for correlated modules: m = config.efficiencies.size().
std::vector<OutcomeString> run_protocol_joint(const QState& joint_state, const ProtocolConfig& config,
                                              std::uint64_t repetition = 0, std::uint64_t column = 0);

/// n_zero over all strings, f_hat = n_zero / denominator, bound 1/sqrt(denominator).
EstimateReport estimate(std::span<const OutcomeString> strings, std::uint64_t denominator);

OutcomeString concat(std::span<const OutcomeString> strings);

/// Newline-separated per-qubit text form.
std::string to_text(std::span<const OutcomeString> strings);
std::vector<OutcomeString> strings_from_text(std::string_view text);

}  // namespace qnn
