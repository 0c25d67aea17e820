#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hypspec::io {

/// Writes through a sibling temp file and renames it into place, creating
/// parent directories as needed.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel, ylabel;
  bool log_y = false;
  int width = 640, height = 420;
};

/// Plain line plot with markers; nonpositive values are skipped on a log axis.
std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace hypspec::io
