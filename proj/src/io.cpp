#include "qnn/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "qnn/errors.hpp"

namespace qnn::io {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::InvalidConfig, std::string("missing field '") + name + "'");
  return j.at(name);
}

template <typename T>
T get_as(const json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* name, T fallback) {
  return j.contains(name) ? get_as<T>(j, name) : fallback;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
  }
}

}  // namespace

json to_json(const NetworkSpec& spec) {
  json j;
  j["topology"] = std::string(to_string(spec.topology));
  j["k"] = spec.layout.k;
  j["N"] = spec.layout.N;
  j["m"] = spec.layout.m;
  j["R"] = spec.repetitions;
  j["Q"] = spec.outputs;
  j["partition_mode"] = std::string(to_string(spec.partition_mode));
  j["partition_seed"] = spec.partition_seed;
  j["pad_value"] = spec.pad_value;
  switch (spec.topology) {
    case Topology::Modular: {
      j["weights"] = spec.weights.front();
      json p = json::array();
      for (const auto& row : spec.efficiencies) p.push_back(row.front());
      j["efficiencies"] = p;
      break;
    }
    case Topology::FullRQ: {
      json w = json::array();
      for (const auto& set : spec.weights) w.push_back(set.front());
      j["weights"] = w;
      j["efficiencies"] = spec.efficiencies;
      break;
    }
    case Topology::Block:
      j["weights"] = spec.weights;
      j["efficiencies"] = spec.efficiencies;
      break;
  }
  return j;
}

NetworkSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "spec must be a JSON object");
  NetworkSpec spec;
  spec.topology = topology_from_string(get_as<std::string>(j, "topology"));
  const int k = get_as<int>(j, "k");
  if (k < 1 || k > 30) throw Error(ErrorCode::InvalidConfig, "field 'k' must lie in [1, 30]");
  spec.partition_mode = partition_mode_from_string(get_or<std::string>(j, "partition_mode", "contiguous"));
  spec.partition_seed = get_or<std::uint64_t>(j, "partition_seed", 0);
  spec.pad_value = get_or<double>(j, "pad_value", 0.0);

  switch (spec.topology) {
    case Topology::Modular: {
      auto pieces = get_as<std::vector<Vector>>(j, "weights");
      auto p = get_as<std::vector<double>>(j, "efficiencies");
      const int m = get_or<int>(j, "m", static_cast<int>(pieces.size()));
      spec.layout = plan_layout(get_or<int>(j, "N", m * (1 << k)), k);
      if (spec.layout.m != m) {
        throw Error(ErrorCode::InvalidConfig, "field 'm' = " + std::to_string(m) + " but ceil(N / 2^k) = " +
                                                  std::to_string(spec.layout.m));
      }
      spec.weights = {std::move(pieces)};
      for (double e : p) spec.efficiencies.push_back({e});
      break;
    }
    case Topology::FullRQ: {
      auto w = get_as<std::vector<Vector>>(j, "weights");
      spec.layout = plan_layout(get_or<int>(j, "N", 1 << k), k);
      spec.repetitions = get_or<int>(j, "R", static_cast<int>(w.size()));
      spec.efficiencies = get_as<std::vector<std::vector<double>>>(j, "efficiencies");
      spec.outputs = get_or<int>(j, "Q", spec.efficiencies.empty() ? 0 : static_cast<int>(spec.efficiencies.front().size()));
      for (auto& v : w) spec.weights.push_back({std::move(v)});
      break;
    }
    case Topology::Block: {
      spec.weights = get_as<std::vector<std::vector<Vector>>>(j, "weights");
      const int m = get_as<int>(j, "m");
      spec.layout = plan_layout(get_or<int>(j, "N", m * (1 << k)), k);
      if (spec.layout.m != m) {
        throw Error(ErrorCode::InvalidConfig, "field 'm' = " + std::to_string(m) + " but ceil(N / 2^k) = " +
                                                  std::to_string(spec.layout.m));
      }
      spec.repetitions = get_or<int>(j, "R", static_cast<int>(spec.weights.size()));
      spec.efficiencies = get_as<std::vector<std::vector<double>>>(j, "efficiencies");
      spec.outputs = get_or<int>(j, "Q", spec.efficiencies.empty() ? 0 : static_cast<int>(spec.efficiencies.front().size()));
      break;
    }
  }
  spec.validate();
  return spec;
}

NetworkSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open spec file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const NetworkSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  out << to_json(spec).dump(2) << '\n';
}

Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  std::size_t q = 0;
  char delim = ',';
  bool have_header = false;
  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!have_header) {
      delim = t.find(',') != std::string::npos ? ',' : (t.find(';') != std::string::npos ? ';' : '\t');
      for (auto cell : split(t, delim)) {
        cell = trim(cell);
        if (!cell.empty() && (cell.front() == 'x' || cell.front() == 'X') && q == 0) {
          ++n;
        } else if (!cell.empty() && (cell.front() == 'y' || cell.front() == 'Y')) {
          ++q;
        } else {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                                 ": header must list x columns then y columns, got '" + cell + "'");
        }
      }
      if (n == 0 || q == 0) throw Error(ErrorCode::ParseError, "header declares no inputs or no targets");
      have_header = true;
      continue;
    }
    const auto cells = split(t, delim);
    if (cells.size() != n + q) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(n + q) +
                                             " values, got " + std::to_string(cells.size()));
    }
    Sample s;
    for (std::size_t c = 0; c < n; ++c) s.x.push_back(parse_number(trim(cells[c]), line_no));
    for (std::size_t c = n; c < n + q; ++c) s.y.push_back(parse_number(trim(cells[c]), line_no));
    data.pairs.push_back(std::move(s));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "dataset has no header row");
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open dataset '" + path.string() + "'");
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const std::size_t n = data.input_dim();
  const std::size_t q = data.output_dim();
  for (std::size_t c = 0; c < n; ++c) out << (c ? "," : "") << 'x' << c + 1;
  for (std::size_t c = 0; c < q; ++c) out << ',' << 'y' << c + 1;
  out << '\n' << std::setprecision(17);
  for (const auto& s : data.pairs) {
    for (std::size_t c = 0; c < n; ++c) out << (c ? "," : "") << s.x[c];
    for (double y : s.y) out << ',' << y;
    out << '\n';
  }
}

void write_loss_trace(std::ostream& out, std::span<const double> trace) {
  out << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < trace.size(); ++e) out << e << ',' << trace[e] << '\n';
}

}  // namespace qnn::io
