#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qnn/errors.hpp"
#include "qnn/io.hpp"
#include "support.hpp"

using namespace qnn;
using namespace qnn::testing;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qnn_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("specs round-trip through JSON for every topology") {
    Gen gen(91);
    for (int t = 0; t < 30; ++t) {
      const Topology topo = static_cast<Topology>(t % 3);
      const int k = uniform_int(gen, 1, 3);
      const int N = topo == Topology::FullRQ ? (1 << k) : uniform_int(gen, 1, 4 << k);
      const int R = topo == Topology::Modular ? 1 : uniform_int(gen, 1, 3);
      const int Q = topo == Topology::Modular ? 1 : uniform_int(gen, 1, 3);
      auto spec = random_network(plan_layout(N, k), topo, R, Q, gen());
      spec.partition_mode = t % 2 ? PartitionMode::SeededRandomPermutation : PartitionMode::Contiguous;
      spec.partition_seed = gen();
      spec.pad_value = 0.25;
      const auto back = io::spec_from_json(json::parse(io::to_json(spec).dump()));
      CHECK(back.layout == spec.layout);
      CHECK(back.topology == spec.topology);
      CHECK(back.repetitions == R);
      CHECK(back.outputs == Q);
      CHECK(back.weights == spec.weights);
      CHECK(back.efficiencies == spec.efficiencies);
      CHECK(back.partition_mode == spec.partition_mode);
      CHECK(back.partition_seed == spec.partition_seed);
      CHECK(back.pad_value == spec.pad_value);
    }
  }

  TEST_CASE("spec files") {
    const auto spec = NetworkSpec::modular(1, 3, {{1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.25});
    const auto path = scratch("spec.json");
    io::save_spec(spec, path);
    const auto back = io::load_spec(path);
    CHECK(back.weights == spec.weights);
    CHECK(back.layout.N == 3);
  }

  TEST_CASE("spec errors name the problem") {
    auto j = io::to_json(NetworkSpec::modular(1, 4, {{1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.25}));
    j.erase("weights");
    CHECK(error_text([&] { io::spec_from_json(j); }).find("'weights'") != std::string::npos);

    j = io::to_json(NetworkSpec::modular(1, 4, {{1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.25}));
    j["m"] = 3;
    CHECK(error_text([&] { io::spec_from_json(j); }).find("'m'") != std::string::npos);

    j["m"] = 2;
    j["efficiencies"] = "high";
    CHECK(error_text([&] { io::spec_from_json(j); }).find("'efficiencies'") != std::string::npos);

    j["efficiencies"] = {0.5, 1.5};
    CHECK_THROWS_AS(io::spec_from_json(j), Error);

    j["efficiencies"] = {0.5, 0.5};
    j["topology"] = "mesh";
    CHECK_THROWS_AS(io::spec_from_json(j), Error);

    const auto path = scratch("broken.json");
    std::ofstream(path) << "{\n  \"topology\": \"modular\",\n  \"k\": 1,\n  oops\n}\n";
    const auto msg = error_text([&] { io::load_spec(path); });
    CHECK(msg.find("ParseError") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);

    CHECK(error_text([] { io::load_spec("/nonexistent/spec.json"); }).find("cannot open") != std::string::npos);
  }

  TEST_CASE("datasets") {
    std::istringstream in("# toy\nx1;x2;y1\n1;2;0.5\n\n3;4.5;0.25\n");
    const auto d = io::parse_dataset(in);
    REQUIRE(d.pairs.size() == 2);
    CHECK(d.input_dim() == 2);
    CHECK(d.output_dim() == 1);
    CHECK(d.pairs[1].x[1] == 4.5);

    std::istringstream tabs("x1\tx2\ty1\ty2\n1\t2\t3\t4\n");
    CHECK(io::parse_dataset(tabs).output_dim() == 2);

    std::ostringstream out;
    io::write_dataset(out, d);
    std::istringstream again(out.str());
    const auto back = io::parse_dataset(again);
    CHECK(back.pairs[0].x == d.pairs[0].x);
    CHECK(back.pairs[1].y == d.pairs[1].y);
  }

  TEST_CASE("dataset errors carry line numbers") {
    std::istringstream short_row("x1,x2,y1\n1,2,3\n1,2\n");
    CHECK(error_text([&] { io::parse_dataset(short_row); }).find("line 3") != std::string::npos);
    std::istringstream bad_cell("x1,y1\n1,abc\n");
    CHECK(error_text([&] { io::parse_dataset(bad_cell); }).find("line 2") != std::string::npos);
    std::istringstream no_header("");
    CHECK_THROWS_AS(io::parse_dataset(no_header), Error);
    std::istringstream bad_header("a,b\n");
    CHECK_THROWS_AS(io::parse_dataset(bad_header), Error);
  }

  TEST_CASE("loss trace") {
    std::ostringstream out;
    const std::vector<double> trace{0.5, 0.25};
    io::write_loss_trace(out, trace);
    CHECK(out.str().rfind("epoch,loss\n0,0.5", 0) == 0);
  }
}
