#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"
#include "qnn/model.hpp"
#include "qnn/trainer.hpp"

namespace qnn::io {

// Network spec JSON schema:
//
//   {
//     "topology": "modular" | "full_rq" | "block",
//     "k": <int>,                 register size
//     "N": <int>,                 optional; modular/block default m * 2^k, full_rq 2^k
//     "m": <int>,                 modular/block; checked against ceil(N / 2^k)
//     "R": <int>, "Q": <int>,     full_rq/block (modular: R = Q = 1)
//     "partition_mode": "contiguous" | "seeded_random_permutation",   optional
//     "partition_seed": <uint>,   optional
//     "pad_value": <number>,      optional, default 0
//     "weights":       modular: [m][2^k]   full_rq: [R][2^k]   block: [R][m][2^k]
//     "efficiencies":  modular: [m]        full_rq: [R][Q]     block: [R*m][Q]
//   }
//
// Missing or mistyped fields raise Error(InvalidConfig) naming the field.

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& j);

/// Parses and validates a spec file. Syntax errors become ParseError with the
/// line and column reported by the JSON parser.
NetworkSpec load_spec(const std::filesystem::path& path);
void save_spec(const NetworkSpec& spec, const std::filesystem::path& path);

// Dataset text: a header row x1,...,xN,y1,...,yQ declaring N and Q, then one
// row per pair. Comma, semicolon or tab delimited; blank lines and lines
// starting with '#' are skipped.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const Dataset& data);

/// CSV "epoch,loss" with one row per trace entry.
void write_loss_trace(std::ostream& out, std::span<const double> trace);

}  // namespace qnn::io
