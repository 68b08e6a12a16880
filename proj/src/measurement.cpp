#include "qnn/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnn/errors.hpp"

namespace qnn {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, std::string(what) + " " + std::to_string(p) + " outside [0, 1]");
  }
}

void check_efficiency(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidEfficiency, "efficiency " + std::to_string(p) + " outside [0, 1]");
  }
}

std::vector<OutcomeString> split_qubit_major(std::vector<Symbol>&& flat, std::size_t m, std::uint64_t shots) {
  std::vector<OutcomeString> out;
  out.reserve(m);
  for (std::size_t l = 0; l < m; ++l) {
    const auto first = flat.begin() + static_cast<std::ptrdiff_t>(l * shots);
    out.emplace_back(std::vector<Symbol>(first, first + static_cast<std::ptrdiff_t>(shots)));
  }
  return out;
}

}  // namespace

std::uint64_t OutcomeString::count(Symbol s) const {
  return static_cast<std::uint64_t>(std::count(symbols_.begin(), symbols_.end(), s));
}

std::string OutcomeString::to_text() const {
  std::string text(symbols_.size(), '.');
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == Symbol::Zero) text[i] = '0';
    else if (symbols_[i] == Symbol::One) text[i] = '1';
  }
  return text;
}

OutcomeString OutcomeString::from_text(std::string_view text) {
  std::vector<Symbol> symbols;
  symbols.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case '0': symbols.push_back(Symbol::Zero); break;
      case '1': symbols.push_back(Symbol::One); break;
      case '.': symbols.push_back(Symbol::Missing); break;
      default:
        throw Error(ErrorCode::ParseError, "invalid outcome symbol at column " + std::to_string(i + 1));
    }
  }
  return OutcomeString(std::move(symbols));
}

void ProtocolConfig::validate() const {
  if (shots < 1) throw Error(ErrorCode::InvalidConfig, "shots must be >= 1");
  for (double p : efficiencies) check_efficiency(p);
}

rng::StreamKey protocol_stream(std::uint64_t seed, std::uint64_t module, std::uint64_t repetition,
                               std::uint64_t column) {
  return rng::derive(seed, rng::Purpose::MarginalShots, {module, repetition, column});
}

OutcomeString measure_lossy(double p_zero, double efficiency, std::uint64_t shots, LossMode mode,
                            rng::StreamKey stream) {
  check_probability(p_zero, "p_zero");
  check_efficiency(efficiency);
  std::vector<Symbol> symbols(shots);
  kernels::omp::sample_lossy(stream, p_zero, efficiency, mode, symbols);
  return OutcomeString(std::move(symbols));
}

std::vector<OutcomeString> run_protocol(std::span<const double> p_zeros, const ProtocolConfig& config,
                                        std::uint64_t repetition, std::uint64_t column) {
  config.validate();
  if (p_zeros.size() != config.efficiencies.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(p_zeros.size()) + " probabilities but " +
                                               std::to_string(config.efficiencies.size()) + " efficiencies");
  }
  std::vector<OutcomeString> out;
  out.reserve(p_zeros.size());
  for (std::size_t l = 0; l < p_zeros.size(); ++l) {
    out.push_back(measure_lossy(p_zeros[l], config.efficiencies[l], config.shots, config.loss_mode,
                                protocol_stream(config.seed, l, repetition, column)));
  }
  return out;
}

std::vector<double> control_zero_patterns(const QState& joint_state, int modules) {
  const int n = joint_state.num_qubits();
  if (modules < 1 || n % modules != 0 || (n / modules) % 2 == 0 || n / modules < 3) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(n) + " qubits do not split into " +
                                                  std::to_string(modules) + " modules of 2k+1 qubits");
  }
  const int per_module = n / modules;
  std::vector<int> controls(static_cast<std::size_t>(modules));
  for (int l = 0; l < modules; ++l) controls[static_cast<std::size_t>(l)] = l * per_module;

  const std::size_t patterns = std::size_t{1} << modules;
  std::vector<double> raw(patterns);
  kernels::omp::pattern_distribution(joint_state.amplitudes(), n, controls, raw);
  // Model Zero is raw outcome 1 (see SwapTestResult), so the zero-pattern is
  // the raw pattern itself when kRawOutcomeForModelZero == 1.
  static_assert(kRawOutcomeForModelZero == 1);
  return raw;
}

std::vector<OutcomeString> sample_zero_patterns(std::span<const double> pattern_probabilities,
                                                const ProtocolConfig& config, std::uint64_t repetition,
                                                std::uint64_t column) {
  config.validate();
  const std::size_t m = config.efficiencies.size();
  if (m == 0 || pattern_probabilities.size() != (std::size_t{1} << m)) {
    throw Error(ErrorCode::LengthMismatch, "pattern distribution size does not match 2^m");
  }
  std::vector<double> cdf(pattern_probabilities.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) {
    const double p = pattern_probabilities[j];
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw Error(ErrorCode::InvalidProbability, "pattern probability");
    acc += std::max(0.0, p);
    cdf[j] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw Error(ErrorCode::InvalidProbability, "pattern distribution does not sum to 1");
  for (auto& c : cdf) c /= acc;

  std::vector<Symbol> flat(m * config.shots);
  const auto key = rng::derive(config.seed, rng::Purpose::JointShots, {repetition, column});
  kernels::omp::sample_joint(key, cdf, config.efficiencies, config.loss_mode, config.shots, flat);
  return split_qubit_major(std::move(flat), m, config.shots);
}

std::vector<OutcomeString> run_protocol_joint(const QState& joint_state, const ProtocolConfig& config,
                                              std::uint64_t repetition, std::uint64_t column) {
  config.validate();
  if (joint_state.num_qubits() > config.max_qubits) {
    throw Error(ErrorCode::RegisterTooLarge, std::to_string(joint_state.num_qubits()) + " qubits exceed the limit of " +
                                                 std::to_string(config.max_qubits));
  }
  const auto patterns = control_zero_patterns(joint_state, static_cast<int>(config.efficiencies.size()));
  return sample_zero_patterns(patterns, config, repetition, column);
}

EstimateReport estimate(std::span<const OutcomeString> strings, std::uint64_t denominator) {
  if (denominator < 1) throw Error(ErrorCode::InvalidConfig, "estimate denominator must be >= 1");
  EstimateReport r;
  for (const auto& s : strings) r.n_zero += s.count(Symbol::Zero);
  r.shots_total = denominator;
  r.f_hat = static_cast<double>(r.n_zero) / static_cast<double>(denominator);
  r.std_error_bound = 1.0 / std::sqrt(static_cast<double>(denominator));
  return r;
}

OutcomeString concat(std::span<const OutcomeString> strings) {
  std::size_t total = 0;
  for (const auto& s : strings) total += s.size();
  std::vector<Symbol> out;
  out.reserve(total);
  for (const auto& s : strings) out.insert(out.end(), s.symbols().begin(), s.symbols().end());
  return OutcomeString(std::move(out));
}

std::string to_text(std::span<const OutcomeString> strings) {
  std::string text;
  for (const auto& s : strings) {
    text += s.to_text();
    text += '\n';
  }
  return text;
}

std::vector<OutcomeString> strings_from_text(std::string_view text) {
  std::vector<OutcomeString> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(OutcomeString::from_text(line));
    start = end + 1;
  }
  return out;
}

}  // namespace qnn
