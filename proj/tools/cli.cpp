#include "cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qnn/errors.hpp"
#include "qnn/io.hpp"
#include "qnn/measurement.hpp"
#include "qnn/model.hpp"
#include "qnn/swap_test.hpp"
#include "qnn/trainer.hpp"

namespace qnn::cli {

using nlohmann::json;

namespace {

constexpr const char* kTool = "qnn";

const std::map<std::string, LossMode> kLossModes{
    {"stochastic", LossMode::StochasticThinning},
    {"deterministic", LossMode::DeterministicCount},
};

std::string loss_mode_name(LossMode m) {
  return m == LossMode::StochasticThinning ? "stochastic" : "deterministic";
}

void apply_thread_override() {
  const char* env = std::getenv(kThreadsEnv);
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw Error(ErrorCode::InvalidConfig, std::string(kThreadsEnv) + " must be a positive integer");
  }
  omp_set_num_threads(static_cast<int>(n));
}

json report_header(const std::string& command) {
  json j;
  j["tool"] = kTool;
  j["version"] = QNN_VERSION;
  j["command"] = command;
  return j;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, what + ": '" + cell + "' is not a number");
    }
  }
  if (values.empty()) throw Error(ErrorCode::ParseError, what + " is empty");
  return values;
}

/// Entries are "re" or "re:im".
std::vector<Complex> parse_complex_list(const std::string& text, const std::string& what) {
  std::vector<Complex> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto colon = cell.find(':');
    const auto re = parse_real_list(cell.substr(0, colon), what);
    double im = 0.0;
    if (colon != std::string::npos) im = parse_real_list(cell.substr(colon + 1), what).front();
    values.emplace_back(re.front(), im);
  }
  if (values.empty()) throw Error(ErrorCode::ParseError, what + " is empty");
  return values;
}

std::vector<double> read_input_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open input file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    return parse_real_list(line, "input file");
  }
  throw Error(ErrorCode::ParseError, "input file '" + path + "' has no data row");
}

void emit(const json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write '" + out_path + "'");
    f << text;
  }
  out << text;
}

// ------------------------------------------------------------- commands

struct LayoutArgs {
  int N = 0;
  int k = 0;
};

int cmd_layout(const LayoutArgs& a, std::ostream& out) {
  if (a.N < 1 || a.k < 1) throw Error(ErrorCode::InvalidConfig, "N and k must be positive integers");
  const ModuleLayout layout = plan_layout(a.N, a.k);
  out << "layout: N=" << layout.N << ", k=" << layout.k << "\n";
  out << "m=" << layout.m << ", qubits=" << layout.total_qubits() << "\n";
  const int len = layout.register_dim();
  for (int l = 0; l < layout.m; ++l) {
    const int first = l * len + 1;
    const int last = std::min(layout.N, (l + 1) * len);
    out << "module " << l + 1 << ": inputs " << first << ".." << last << ", qubits "
        << layout.qubits_per_module() << " (1 control + " << layout.k << " input + " << layout.k << " weight)\n";
  }
  out << kTool << " " << QNN_VERSION << "\n";
  return kSuccess;
}

struct SwapTestArgs {
  std::string a;
  std::string b;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  std::string loss_mode = "stochastic";
  double efficiency = 1.0;
  std::string out;
};

int cmd_swaptest(const SwapTestArgs& a, std::ostream& out) {
  const QState psi = amplitude_encode(std::span<const Complex>(parse_complex_list(a.a, "--a")));
  const QState phi = amplitude_encode(std::span<const Complex>(parse_complex_list(a.b, "--b")));
  const auto analytic = swap_test_analytic(psi, phi);
  const auto circuit = swap_test_circuit(psi, phi);

  json r = report_header("swaptest");
  r["k"] = psi.num_qubits();
  r["seed"] = a.seed;
  r["overlap_sq"] = analytic.overlap_sq;
  r["p_zero_analytic"] = analytic.p_zero;
  r["p_zero_circuit"] = circuit.p_zero;
  r["circuit_analytic_diff"] = std::abs(circuit.p_zero - analytic.p_zero);
  r["outcome_labeling"] = "model symbol 0 = raw control outcome 1";
  if (a.shots) {
    const LossMode mode = kLossModes.at(a.loss_mode);
    const auto s = measure_lossy(analytic.p_zero, a.efficiency, *a.shots, mode, protocol_stream(a.seed, 0));
    const auto est = estimate(std::span<const OutcomeString>(&s, 1), *a.shots);
    r["shots"] = *a.shots;
    r["efficiency"] = a.efficiency;
    r["loss_mode"] = loss_mode_name(mode);
    r["p_zero_sampled"] = est.f_hat;
    r["expected_sampled"] = a.efficiency * analytic.p_zero;
    r["error_bound"] = est.std_error_bound;
    r["error_bound_formula"] = "1/sqrt(shots)";
  } else {
    r["shots"] = 0;
    r["error_bound_formula"] = "exact";
  }
  emit(r, a.out, out);
  return kSuccess;
}

struct PredictArgs {
  std::string config;
  std::string input;
  std::string input_file;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  std::string topology;
  std::string loss_mode = "stochastic";
  std::string out;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const NetworkSpec spec = io::load_spec(a.config);
  if (!a.topology.empty() && topology_from_string(a.topology) != spec.topology) {
    throw Error(ErrorCode::InvalidConfig, "--topology " + a.topology + " does not match the config topology '" +
                                              std::string(to_string(spec.topology)) + "'");
  }
  if (a.input.empty() == a.input_file.empty()) {
    throw Error(ErrorCode::InvalidConfig, "give exactly one of --input or --input-file");
  }
  const auto x = a.input.empty() ? read_input_file(a.input_file) : parse_real_list(a.input, "--input");

  ProtocolConfig config;
  config.shots = a.shots;
  config.seed = a.seed;
  config.loss_mode = kLossModes.at(a.loss_mode);

  const Prediction oracle = oracle_network(x, spec);
  const Prediction sampled = predict(x, spec, config);

  json r = report_header("predict");
  r["seed"] = a.seed;
  r["shots"] = a.shots;
  r["shots_used"] = sampled.shots_used;
  r["loss_mode"] = loss_mode_name(config.loss_mode);
  r["topology"] = std::string(to_string(spec.topology));
  r["k"] = spec.layout.k;
  r["m"] = spec.layout.m;
  r["N"] = spec.layout.N;
  r["R"] = spec.repetitions;
  r["Q"] = spec.outputs;
  r["prediction"] = sampled.values;
  r["oracle"] = oracle.values;
  std::vector<double> gaps;
  double max_gap = 0.0;
  for (std::size_t q = 0; q < oracle.values.size(); ++q) {
    gaps.push_back(std::abs(sampled.values[q] - oracle.values[q]));
    max_gap = std::max(max_gap, gaps.back());
  }
  r["gap"] = gaps;
  r["max_gap"] = max_gap;
  r["error_bound"] = sampled.error_bound;
  r["error_bound_formula"] = "1/sqrt(R*shots)";
  r["band"] = 5.0 * sampled.error_bound;
  r["within_band"] = max_gap <= 5.0 * sampled.error_bound;
  emit(r, a.out, out);
  return kSuccess;
}

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out;
  std::string trace;
  double learning_rate = 1e-2;
  int epochs = 5000;
  double tolerance = 1e-12;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  std::string loss_mode = "stochastic";
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const NetworkSpec initial = io::load_spec(a.config);
  const Dataset data = io::load_dataset(a.data);
  TrainConfig cfg;
  cfg.learning_rate = a.learning_rate;
  cfg.max_epochs = a.epochs;
  cfg.tolerance = a.tolerance;
  cfg.seed = a.seed;
  const TrainResult result = train(initial, data, cfg);

  if (!a.out.empty()) io::save_spec(result.spec, a.out);
  if (!a.trace.empty()) {
    std::ofstream f(a.trace);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write '" + a.trace + "'");
    io::write_loss_trace(f, result.loss_trace);
  }

  json r = report_header("train");
  r["seed"] = a.seed;
  r["learning_rate"] = cfg.learning_rate;
  r["max_epochs"] = cfg.max_epochs;
  r["epochs_run"] = result.epochs_run;
  r["converged"] = result.converged;
  r["initial_loss"] = result.loss_trace.front();
  r["final_loss"] = result.loss_trace.back();
  r["samples"] = data.pairs.size();
  if (a.shots > 0) {
    ProtocolConfig pc;
    pc.shots = a.shots;
    pc.seed = a.seed;
    pc.loss_mode = kLossModes.at(a.loss_mode);
    const auto ev = evaluate_sampled(result.spec, data, pc);
    r["shots"] = a.shots;
    r["oracle_loss"] = ev.oracle_loss;
    r["sampled_loss"] = ev.sampled_loss;
    r["loss_gap"] = ev.gap;
    r["error_bound_formula"] = "1/sqrt(R*shots) per output";
  } else {
    r["shots"] = 0;
    r["error_bound_formula"] = "exact (oracle network)";
  }
  emit(r, "", out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Swap-test quantum neural network simulator", kTool};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kTool) + " " + QNN_VERSION);

  LayoutArgs layout_args;
  auto* layout = app.add_subcommand("layout", "Plan modules and qubits for N inputs on k-qubit registers");
  layout->add_option("--N,N", layout_args.N, "Input dimension")->required();
  layout->add_option("--k,k", layout_args.k, "Qubits per register")->required();

  SwapTestArgs st;
  auto* swaptest = app.add_subcommand("swaptest", "Analytic, simulated and sampled swap test of two vectors");
  swaptest->add_option("--a", st.a, "First vector, comma separated (entries re or re:im)")->required();
  swaptest->add_option("--b", st.b, "Second vector")->required();
  swaptest->add_option("--shots", st.shots, "Also sample this many shots");
  swaptest->add_option("--seed", st.seed, "Master seed");
  swaptest->add_option("--loss-mode", st.loss_mode)->check(CLI::IsMember({"stochastic", "deterministic"}));
  swaptest->add_option("--efficiency", st.efficiency, "Measurement efficiency")->check(CLI::Range(0.0, 1.0));
  swaptest->add_option("--out", st.out, "Also write the report here");

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Sampled prediction with oracle comparison");
  predict_cmd->add_option("--config", pa.config, "Network spec JSON")->required();
  predict_cmd->add_option("--input", pa.input, "Input vector, comma separated");
  predict_cmd->add_option("--input-file", pa.input_file, "File whose first data row is the input");
  predict_cmd->add_option("--shots", pa.shots, "Protocol repetitions per batch")->check(CLI::PositiveNumber);
  predict_cmd->add_option("--seed", pa.seed, "Master seed");
  predict_cmd->add_option("--topology", pa.topology, "Expected topology")
      ->check(CLI::IsMember({"modular", "full_rq", "block"}));
  predict_cmd->add_option("--loss-mode", pa.loss_mode)->check(CLI::IsMember({"stochastic", "deterministic"}));
  predict_cmd->add_option("--out", pa.out, "Also write the report here");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Fit weights and efficiencies on the oracle network");
  train_cmd->add_option("--config", ta.config, "Initial network spec JSON")->required();
  train_cmd->add_option("--data", ta.data, "Dataset CSV")->required();
  train_cmd->add_option("--out", ta.out, "Write the trained spec here");
  train_cmd->add_option("--trace", ta.trace, "Write the loss trace CSV here");
  train_cmd->add_option("--lr", ta.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", ta.epochs, "Maximum epochs");
  train_cmd->add_option("--tolerance", ta.tolerance, "Stop when the loss decrease falls below this");
  train_cmd->add_option("--seed", ta.seed, "Seed for the sampled evaluation");
  train_cmd->add_option("--shots", ta.shots, "Evaluate the trained model with this many shots");
  train_cmd->add_option("--loss-mode", ta.loss_mode)->check(CLI::IsMember({"stochastic", "deterministic"}));

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--seed", vo.seed, "Master seed");
  verify->add_option("--shots", vo.shots, "Shots for the statistical checks")->check(CLI::Range(1000, 100000000));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kValidationError;
  }

  try {
    apply_thread_override();
    if (*layout) return cmd_layout(layout_args, out);
    if (*swaptest) return cmd_swaptest(st, out);
    if (*predict_cmd) return cmd_predict(pa, out);
    if (*train_cmd) return cmd_train(ta, out);
    if (*verify) return run_verify(vo, out) ? kSuccess : kRuntimeFailure;
  } catch (const ZeroNormPieceError& e) {
    err << "error: " << e.what() << " (piece index " << e.piece() << ")\n";
    return kValidationError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::DivergenceDetected ? kRuntimeFailure : kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kValidationError;
}

}  // namespace qnn::cli
