#include "doctest.h"

#include "renyisc/io.hpp"
#include "renyisc/random.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace renyisc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "renyisc_test_io";
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const FileError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("state files round trip") {
  Rng rng(31);
  const Operator rho = random_state(SystemSpace{{"A", 2}, {"B", 3}}, rng);
  const std::string path = (scratch_dir() / "rho.json").string();
  write_state(path, rho);
  const Operator back = read_state(path);
  CHECK(back.space() == rho.space());
  CHECK((back.matrix() - rho.matrix()).norm() == 0.0);

  const std::string mm2 = write_text(
      "mm2.json", R"({"systems":[{"label":"A","dim":2}],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]})");
  CHECK(renyi_entropy(read_state(mm2), 2.0) == doctest::Approx(1.0));
}

TEST_CASE("malformed state files name the path and field") {
  const std::string bad_dim =
      write_text("bad_dim.json", R"({"systems":[{"label":"A","dim":0}],"matrix":[[[1,0]]]})");
  std::string msg = error_of([&] { read_state(bad_dim); });
  CHECK(msg.find(bad_dim) != std::string::npos);
  CHECK(msg.find("systems[0].dim") != std::string::npos);

  const std::string short_row = write_text(
      "short_row.json", R"({"systems":[{"label":"A","dim":2}],"matrix":[[[1,0],[0,0]],[[0,0]]]})");
  msg = error_of([&] { read_state(short_row); });
  CHECK(msg.find("matrix[1]") != std::string::npos);

  const std::string not_psd = write_text(
      "not_psd.json", R"({"systems":[{"label":"A","dim":2}],"matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]})");
  msg = error_of([&] { read_state(not_psd); });
  CHECK(msg.find("'matrix'") != std::string::npos);

  const std::string broken = write_text("broken.json", "{\"systems\": [");
  msg = error_of([&] { read_state(broken); });
  CHECK(msg.find("invalid JSON") != std::string::npos);

  msg = error_of([&] { read_state((scratch_dir() / "missing.json").string()); });
  CHECK(msg.find("cannot open") != std::string::npos);

  const std::string no_matrix = write_text("no_matrix.json", R"({"systems":[{"label":"A","dim":2}]})");
  msg = error_of([&] { read_state(no_matrix); });
  CHECK(msg.find("'matrix': missing") != std::string::npos);
}

TEST_CASE("channel files keep output then environment order") {
  Rng rng(32);
  const Channel ch = random_channel(SystemSpace{{"A", 2}}, SystemSpace{{"B", 2}, {"C", 2}}, 3, rng);
  const Json j = channel_to_json(ch);
  const std::string path = (scratch_dir() / "channel.json").string();
  save_json(path, j);
  const Channel back = read_channel(path);
  const Operator rho = random_state(SystemSpace{{"A", 2}}, rng);
  const Operator x = apply_channel(ch, rho);
  const Operator y = align_to(apply_channel(back, rho), x.space());
  CHECK((x.matrix() - y.matrix()).norm() < 1e-14);
  CHECK(j["environment"].size() == 1);

  // Environment listed first inside the isometry is reordered on output.
  const Channel env_first{random_isometry(SystemSpace{{"A", 2}}, SystemSpace{{"E", 2}, {"B", 2}}, rng), {"E"}};
  const Channel moved = channel_from_json(channel_to_json(env_first), "mem");
  const Operator r1 = apply_channel(env_first, rho);
  const Operator r2 = align_to(apply_channel(moved, rho), r1.space());
  CHECK((r1.matrix() - r2.matrix()).norm() < 1e-14);

  const std::string not_iso = write_text(
      "not_iso.json",
      R"({"input":[{"label":"A","dim":2}],"output":[{"label":"B","dim":2}],"isometry":[[[1,0],[0,0]],[[0,0],[0,0]]]})");
  CHECK(error_of([&] { read_channel(not_iso); }).find("'isometry'") != std::string::npos);
}

TEST_CASE("instance files") {
  const std::string state = write_text(
      "bit.json",
      R"({"systems":[{"label":"X","dim":2},{"label":"B","dim":1}],"matrix":[[[0.8,0],[0,0]],[[0,0],[0.2,0]]]})");
  const std::string inst = write_text("extract.json", R"({
    "kind": "randomness-extraction", "copies": 2, "state": "bit.json",
    "registers": {"z": 4},
    "e_table": {"00": "0", "01": "1", "10": "2", "11": "3"}
  })");
  const ProtocolFile f = read_instance(inst);
  CHECK(f.kind == ProtocolKind::randomness_extraction);
  CHECK(f.extraction.e_table == std::vector<int>{0, 1, 2, 3});
  const ProtocolOutcome out = run_instance(f);
  CHECK(out.merit == doctest::Approx(std::pow((std::sqrt(0.8) + std::sqrt(0.2)) / std::sqrt(2.0), 2)).epsilon(1e-10));
  CHECK(bound_state(f).copies == 2);
  const Json report = outcome_to_json(f, out);
  CHECK(report["kind"] == "randomness-extraction");
  CHECK(report["costs"]["l"] == 1.0);

  const std::string partial = write_text("partial.json", R"({
    "kind": "data-compression", "copies": 2, "state": "bit.json", "registers": {"c": 2},
    "e_table": {"00": "0", "01": "1", "10": "1"}
  })");
  std::string msg = error_of([&] { read_instance(partial); });
  CHECK(msg.find("'e_table'") != std::string::npos);
  CHECK(msg.find("not total") != std::string::npos);

  const std::string range = write_text("range.json", R"({
    "kind": "data-compression", "state": "bit.json", "registers": {"c": 1}, "e_table": {"0": "0", "1": "1"}
  })");
  CHECK(error_of([&] { read_instance(range); }).find("e_table.1") != std::string::npos);

  const std::string kind = write_text("kind.json", R"({"kind": "teleportation", "state": "bit.json"})");
  CHECK(error_of([&] { read_instance(kind); }).find("'kind'") != std::string::npos);

  const std::string dc = write_text("dc.json", R"({
    "kind": "data-compression", "state": "bit.json", "registers": {"c": 1}, "e_table": {"0": 0, "1": 0},
    "decoder": [[ [[[1,0]]], [[[0,0]]] ]]
  })");
  const ProtocolFile g = read_instance(dc);
  CHECK_FALSE(g.compression.pretty_good);
  CHECK(run_instance(g).merit == doctest::Approx(0.8));
}

TEST_CASE("redistribution instance with inline channels") {
  Json wire_e = Json{{"input", Json::array({Json{{"label", "A"}, {"dim", 2}}, Json{{"label", "C"}, {"dim", 1}}})},
                     {"output", Json::array({Json{{"label", "Q"}, {"dim", 2}}, Json{{"label", "C'"}, {"dim", 1}}})},
                     {"isometry", matrix_to_json(Matrix::Identity(2, 2))}};
  Json wire_d = Json{{"input", Json::array({Json{{"label", "Q"}, {"dim", 2}}, Json{{"label", "B"}, {"dim", 2}}})},
                     {"output", Json::array({Json{{"label", "A'"}, {"dim", 2}}, Json{{"label", "B'"}, {"dim", 2}}})},
                     {"isometry", matrix_to_json(Matrix::Identity(4, 4))}};
  Rng rng(33);
  const Json inst{{"kind", "redistribution"},
                  {"state", state_to_json(random_state(SystemSpace{{"A", 2}, {"B", 2}, {"C", 1}}, rng))},
                  {"encoder", wire_e},
                  {"decoder", wire_d}};
  const std::string path = (scratch_dir() / "redistribution.json").string();
  save_json(path, inst);
  const ProtocolOutcome out = run_instance(read_instance(path));
  CHECK(out.merit == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(out.costs.at("q") == 1.0);
}

TEST_CASE("reports serialize") {
  const SuiteReport r = run_inequality_suite("subadditivity", 3, {}, 1);
  const Json j = suite_report_to_json(r);
  CHECK(j["suite"] == "subadditivity");
  CHECK(j["passed"] == true);
  CHECK(j["failures"].empty());
  CHECK(j.dump() == suite_report_to_json(run_inequality_suite("subadditivity", 3, {}, 1)).dump());
}

TEST_CASE("grid and dims parsing") {
  const auto g = parse_grid("0.51:0.99:25");
  CHECK(g.size() == 25);
  CHECK(g.front() == 0.51);
  CHECK(g.back() == 0.99);
  CHECK_THROWS_AS(parse_grid("0.4:0.9:3"), UsageError);
  CHECK_THROWS_AS(parse_grid("0.6:0.9"), UsageError);
  CHECK_THROWS_AS(parse_grid("0.6:0.9:x"), UsageError);
  CHECK(parse_dims("2,3,2") == std::vector<int>{2, 3, 2});
  CHECK_THROWS_AS(parse_dims("2,,3"), UsageError);
}
