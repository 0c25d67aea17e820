#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypspec/manifest.hpp"

// Subcommands of the command-line driver. Each writes its artifacts
// atomically under the output directory and returns a printable summary;
// failures surface as ValidationError or NumericalError.
namespace hypspec::commands {

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool plot = true;
};

struct Outcome {
  std::vector<std::filesystem::path> artifacts;
  std::string summary;
};

Outcome cmd_graph(const manifest::RunManifest& m, const RunOptions& o);
Outcome cmd_cell(const manifest::RunManifest& m, const RunOptions& o);
Outcome cmd_assemble(const manifest::RunManifest& m, const RunOptions& o);
Outcome cmd_pinch(const manifest::RunManifest& m, const RunOptions& o);
Outcome cmd_mc(const manifest::RunManifest& m, const RunOptions& o);
Outcome cmd_bounds(const manifest::RunManifest& m, const RunOptions& o);

const std::vector<std::string>& names();
Outcome run(const std::string& name, const manifest::RunManifest& m, const RunOptions& o);

}  // namespace hypspec::commands
