#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "hypspec/commands.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/io.hpp"
#include "hypspec/manifest.hpp"

using namespace hypspec;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HYPSPEC_TEST_DATA;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hypspec_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

commands::RunOptions to(const fs::path& dir) {
  commands::RunOptions o;
  o.out = dir;
  return o;
}

}  // namespace

TEST_CASE("manifest parsing") {
  const auto m = manifest::parse(R"({
    "cell": {"v": 3, "cuff_length": 0.8, "topology": "pants_ring", "funnels": [true, false, false]},
    "graph": {"kind": "regular_tree", "v": 3},
    "radii": [1, 2], "epsilons": [0.4, 0.05],
    "mc": {"n_paths": 5000, "t_max": 3.0, "seed": 9, "walk": "collar"},
    "out_dir": "somewhere", "mesh_h": 0.15})");
  CHECK(m.cell.v == 3);
  CHECK(m.cell.cuff_length == 0.8);
  CHECK(m.cell.funnel_count() == 1);
  CHECK(m.graph.kind == "regular_tree");
  CHECK(m.radii == std::vector<int>{1, 2});
  CHECK(m.mc.seed == 9);
  CHECK(m.mc.walk == manifest::WalkKind::collar);
  CHECK(m.out_dir == "somewhere");
  // round trip
  const auto again = manifest::parse(manifest::to_json(m));
  CHECK(manifest::to_json(again) == manifest::to_json(m));
}

TEST_CASE("manifest rejections") {
  CHECK_THROWS_AS(manifest::parse("{\"cel\": {}}"), ValidationError);
  CHECK_THROWS_AS(manifest::load(kData / "bad_key.json"), ValidationError);
  CHECK_THROWS_AS(manifest::load(kData / "nowhere.json"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"mc\": {\"n_paths\": 10}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"mc\": {\"walk\": \"brownian\"}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"radii\": [2, 1]}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"epsilons\": [0.01]}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"mesh_h\": 0}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"cell\": {\"topology\": \"klein\"}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"graph\": {\"kind\": \"lattice\", \"d\": 3}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"graph\": {\"file\": \"missing.json\"}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("{\"graph\": {\"vertices\": 0, \"edges\": []}}"), ValidationError);
  CHECK_THROWS_AS(manifest::parse("not json"), ValidationError);
}

TEST_CASE("graph from a file next to the manifest") {
  const auto m = manifest::load(kData / "file_graph.json");
  CHECK(m.graph.kind == "explicit");
  CHECK(m.graph.build().size() == 5);
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  io::write_atomic(dir / "a" / "x.txt", "one");
  io::write_atomic(dir / "a" / "x.txt", "two");
  CHECK(io::read_file(dir / "a" / "x.txt") == "two");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "a")) ++files;
  CHECK(files == 1);
}

TEST_CASE("svg plot") {
  const auto s = io::svg_plot({"t", "x", "y", true}, {{"a", {1, 2, 3}, {1.0, 0.1, 0.0}}});
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("nan") == std::string::npos);
}

TEST_CASE("graph command") {
  const auto dir = scratch("graph");
  auto m = manifest::parse(R"({"graph": {"kind": "lattice", "d": 1}, "radii": [2, 3]})");
  const auto out = commands::cmd_graph(m, to(dir));
  const auto csv = io::read_file(dir / "cheeger.csv");
  CHECK(csv.rfind("radius,vertices,interior,edges,mu0_tagged,", 0) == 0);
  CHECK(csv.find("\n2,5,3,4,0.5857864376269") != std::string::npos);
  CHECK(fs::exists(dir / "graph_spectrum_r2.csv"));
  CHECK(fs::exists(dir / "witness_r3.json"));
  CHECK(io::read_file(dir / "graph_spectrum_r2.csv").rfind("index,eigenvalue\n0,0.5857", 0) == 0);
}

TEST_CASE("cell command") {
  const auto dir = scratch("cell");
  const auto m = manifest::parse(R"({"cell": {"v": 3, "cuff_length": 1.0}, "mesh_h": 0.2})");
  auto o = to(dir);
  o.plot = false;
  commands::cmd_cell(m, o);
  const auto j = nlohmann::json::parse(io::read_file(dir / "cell.json"));
  CHECK(std::abs(j["lambda0N"].get<double>()) < 1e-6);
  CHECK(j["symmetry_defect"].get<double>() < 1e-8);
  CHECK(fs::exists(dir / "convergence.csv"));
  CHECK_FALSE(fs::exists(dir / "convergence.svg"));
  CHECK_THROWS_AS(manifest::parse(R"({"cell": {"v": 3, "topology": "pretzel"}})"), ValidationError);
}

TEST_CASE("assemble command on a small tree") {
  const auto dir = scratch("assemble");
  const auto m = manifest::parse(R"({"cell": {"v": 3, "cuff_length": 1.0},
    "graph": {"kind": "regular_tree", "v": 3}, "radii": [1, 2], "mesh_h": 0.2})");
  const auto out = commands::cmd_assemble(m, to(dir));
  CHECK(io::read_file(dir / "sequence.csv").rfind("radius,lambda0_dirichlet,upper_bound,lower_bound,mu0,h_upper\n1,", 0) == 0);
  const auto j = nlohmann::json::parse(io::read_file(dir / "report.json"));
  CHECK(j["lower_holds"].get<bool>());
  CHECK(j["upper_holds"].get<bool>());
  CHECK(fs::exists(dir / "convergence.svg"));
  CHECK_THROWS_AS(commands::cmd_assemble(manifest::load(kData / "too_big.json"), to(dir)), ValidationError);
}

TEST_CASE("mc command is reproducible") {
  const auto a = scratch("mc_a"), b = scratch("mc_b");
  const auto m = manifest::load(kData / "file_graph.json");
  commands::cmd_mc(m, to(a));
  commands::cmd_mc(m, to(b));
  CHECK(io::read_file(a / "survival.csv") == io::read_file(b / "survival.csv"));
  CHECK(io::read_file(a / "fit.json") == io::read_file(b / "fit.json"));
  auto o = to(b);
  o.seed = 77;
  commands::cmd_mc(m, o);
  CHECK(io::read_file(a / "survival.csv") != io::read_file(b / "survival.csv"));
  CHECK(nlohmann::json::parse(io::read_file(b / "fit.json"))["seed"].get<int>() == 77);
  CHECK_THROWS_AS(commands::cmd_mc(manifest::load(kData / "thin_tail.json"), to(a)), NumericalError);
}

TEST_CASE("pinch and bounds commands") {
  const auto dir = scratch("pinch");
  const auto m = manifest::parse(R"({"cell": {"v": 3, "cuff_length": 2.0, "funnels": [true, true, true]},
    "epsilons": [1.0, 0.4], "mesh_h": 0.2})");
  const auto out = commands::cmd_pinch(m, to(dir));
  CHECK(io::read_file(dir / "pinch.csv").rfind("epsilon,lambda0,ratio,target\n", 0) == 0);
  CHECK(out.summary.find("target 0.303964") != std::string::npos);

  const auto bd = scratch("bounds");
  const auto mb = manifest::parse(R"({"cell": {"v": 3, "cuff_length": 1.0},
    "graph": {"kind": "regular_tree", "v": 3, "radius": 1}, "mesh_h": 0.2})");
  const auto ob = commands::cmd_bounds(mb, to(bd));
  CHECK(ob.summary.find("A_tripleprime") != std::string::npos);
  CHECK(fs::exists(bd / "bounds.json"));
  CHECK_THROWS_AS(commands::run("plot", mb, to(bd)), ValidationError);
}
