#include "hypspec/manifest.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "hypspec/errors.hpp"
#include "hypspec/io.hpp"

namespace hypspec::manifest {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  require(j.is_object(), where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

hyp::CellSpec parse_cell(const json& j) {
  only_keys(j, "cell", {"v", "cuff_length", "topology", "funnels", "r_trunc", "custom"});
  hyp::CellSpec c;
  c.v = j.value("v", c.v);
  c.cuff_length = j.value("cuff_length", c.cuff_length);
  if (j.contains("topology")) c.topology = hyp::topology_from_string(j.at("topology").get<std::string>());
  if (j.contains("funnels")) c.funnels = j.at("funnels").get<std::vector<bool>>();
  c.r_trunc = j.value("r_trunc", c.r_trunc);
  if (j.contains("custom")) {
    const auto& cj = j.at("custom");
    only_keys(cj, "cell.custom", {"pants", "gluings", "symmetry"});
    hyp::CustomPantsGraph g;
    g.pants = cj.at("pants").get<int>();
    for (const auto& e : cj.at("gluings")) {
      require(e.is_array() && e.size() == 4, "cell.custom: a gluing is [pants, cuff, pants, cuff]");
      g.gluings.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>()});
    }
    g.symmetry = cj.at("symmetry").get<std::vector<int>>();
    c.custom = g;
  }
  c.validate();
  return c;
}

graph::GraphSpec parse_structured_graph(const json& j, const std::string& where) {
  only_keys(j, where, {"vertices", "edges", "boundary", "valence"});
  graph::GraphSpec g;
  g.kind = "explicit";
  g.n = j.at("vertices").get<int>();
  for (const auto& e : j.at("edges")) {
    require(e.is_array() && e.size() == 2, where + ": an edge is [i, j]");
    g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  g.boundary = j.value("boundary", std::vector<int>{});
  g.valence = j.value("valence", 0);
  return g;
}

graph::GraphSpec parse_graph(const json& j, const fs::path& base) {
  require(j.is_object(), "graph must be an object");
  graph::GraphSpec g;
  if (j.contains("file")) {
    only_keys(j, "graph", {"file"});
    const fs::path p = base / j.at("file").get<std::string>();
    if (!fs::exists(p)) throw ValidationError("graph file " + p.string() + " does not exist");
    g = parse_structured_graph(json::parse(io::read_file(p)), p.string());
  } else if (j.contains("vertices")) {
    g = parse_structured_graph(j, "graph");
  } else {
    only_keys(j, "graph", {"kind", "d", "v", "radius", "preset", "rank"});
    g.kind = j.value("kind", g.kind);
    g.d = j.value("d", g.d);
    g.v = j.value("v", g.v);
    g.radius = j.value("radius", g.radius);
    g.preset = j.value("preset", g.preset);
    g.rank = j.value("rank", g.rank);
    require(g.kind != "explicit", "graph: explicit graphs take vertices/edges or a file");
  }
  g.build();  // validates kind, parameters and connectivity
  return g;
}

MonteCarlo parse_mc(const json& j) {
  only_keys(j, "mc", {"n_paths", "t_max", "seed", "walk", "paths_per_state"});
  MonteCarlo mc;
  mc.n_paths = j.value("n_paths", mc.n_paths);
  mc.t_max = j.value("t_max", mc.t_max);
  mc.seed = j.value("seed", mc.seed);
  mc.paths_per_state = j.value("paths_per_state", mc.paths_per_state);
  const auto w = j.value("walk", std::string("graph"));
  if (w == "graph") mc.walk = WalkKind::graph;
  else if (w == "collar") mc.walk = WalkKind::collar;
  else if (w == "truncation") mc.walk = WalkKind::truncation;
  else throw ValidationError("mc.walk must be graph, collar or truncation");
  require(mc.n_paths >= 1000, "mc.n_paths must be at least 1000");
  require(mc.t_max > 0.0, "mc.t_max must be positive");
  require(mc.paths_per_state >= 1, "mc.paths_per_state must be positive");
  return mc;
}

std::string walk_name(WalkKind w) {
  switch (w) {
    case WalkKind::graph: return "graph";
    case WalkKind::collar: return "collar";
    case WalkKind::truncation: return "truncation";
  }
  return "graph";
}

}  // namespace

RunManifest parse(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    only_keys(j, "manifest", {"cell", "graph", "radii", "epsilons", "mc", "out_dir", "mesh_h"});
    RunManifest m;
    if (j.contains("cell")) m.cell = parse_cell(j.at("cell"));
    if (j.contains("graph")) m.graph = parse_graph(j.at("graph"), base_dir);
    m.radii = j.value("radii", std::vector<int>{});
    m.epsilons = j.value("epsilons", std::vector<double>{});
    if (j.contains("mc")) m.mc = parse_mc(j.at("mc"));
    if (j.contains("out_dir")) m.out_dir = j.at("out_dir").get<std::string>();
    m.mesh_h = j.value("mesh_h", m.mesh_h);
    require(m.mesh_h > 0.0 && m.mesh_h <= 1.0, "mesh_h must lie in (0, 1]");
    for (int r : m.radii) require(r >= 0, "radii must be nonnegative");
    require(std::is_sorted(m.radii.begin(), m.radii.end()) &&
                std::adjacent_find(m.radii.begin(), m.radii.end()) == m.radii.end(),
            "radii must be strictly increasing");
    for (double e : m.epsilons) require(e >= 0.05 && e <= 1.0, "epsilons must lie in [0.05, 1]");
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

RunManifest load(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("manifest " + path.string() + " does not exist");
  return parse(io::read_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::string to_json(const RunManifest& m) {
  json j;
  json c;
  c["v"] = m.cell.v;
  c["cuff_length"] = m.cell.cuff_length;
  c["topology"] = hyp::to_string(m.cell.topology);
  if (!m.cell.funnels.empty()) c["funnels"] = m.cell.funnels;
  c["r_trunc"] = m.cell.r_trunc;
  if (m.cell.custom) {
    json g;
    g["pants"] = m.cell.custom->pants;
    g["gluings"] = m.cell.custom->gluings;
    g["symmetry"] = m.cell.custom->symmetry;
    c["custom"] = g;
  }
  j["cell"] = c;
  json g;
  if (m.graph.kind == "explicit") {
    g["vertices"] = m.graph.n;
    g["edges"] = m.graph.edges;
    g["boundary"] = m.graph.boundary;
    g["valence"] = m.graph.valence;
  } else {
    g["kind"] = m.graph.kind;
    g["d"] = m.graph.d;
    g["v"] = m.graph.v;
    g["radius"] = m.graph.radius;
    if (!m.graph.preset.empty()) g["preset"] = m.graph.preset;
    g["rank"] = m.graph.rank;
  }
  j["graph"] = g;
  j["radii"] = m.radii;
  j["epsilons"] = m.epsilons;
  j["mc"] = {{"n_paths", m.mc.n_paths},
             {"t_max", m.mc.t_max},
             {"seed", m.mc.seed},
             {"walk", walk_name(m.mc.walk)},
             {"paths_per_state", m.mc.paths_per_state}};
  j["out_dir"] = m.out_dir.string();
  j["mesh_h"] = m.mesh_h;
  return j.dump(2) + "\n";
}

}  // namespace hypspec::manifest
