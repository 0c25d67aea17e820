#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hypspec/graph.hpp"
#include "hypspec/hyperbolic.hpp"

namespace hypspec::manifest {

enum class WalkKind { graph, collar, truncation };

struct MonteCarlo {
  int n_paths = 100000;
  double t_max = 10.0;
  std::uint64_t seed = 1;
  WalkKind walk = WalkKind::graph;
  int paths_per_state = 4000;  // harmonic extension
};

/// One format for every subcommand. Parsing rejects unknown keys at every
/// level and checks ranges; a graph may be given inline or as {"file": path}
/// relative to the manifest.
struct RunManifest {
  hyp::CellSpec cell;
  graph::GraphSpec graph;
  std::vector<int> radii;
  std::vector<double> epsilons;
  MonteCarlo mc;
  std::filesystem::path out_dir = "out";
  double mesh_h = 0.1;
};

RunManifest parse(const std::string& text, const std::filesystem::path& base_dir = ".");
RunManifest load(const std::filesystem::path& path);

std::string to_json(const RunManifest& m);

}  // namespace hypspec::manifest
