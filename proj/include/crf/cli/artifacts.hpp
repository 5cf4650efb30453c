#pragma once

#include <string>
#include <utility>
#include <vector>

namespace crf::cli {

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

/// %.17g, with nan / inf spelled out, so identical runs give identical bytes.
std::string fmt_num(double v);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line plot; non-finite points are dropped, log_y drops non-positive ones.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool log_y);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

/// One SVG per numeric column of frames.csv and phase. Returns the files written.
std::vector<std::string> plot_run_dir(const std::string& run_dir);

}  // namespace crf::cli
