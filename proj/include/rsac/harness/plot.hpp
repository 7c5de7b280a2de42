#pragma once

#include "rsac/harness/run.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rsac::harness {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
};

/// One series per algo label across all reports, points sorted by
/// multiplier.
std::vector<PlotSeries> plot_series(const std::vector<EvalReport>& reports);

/// Return-vs-multiplier SVG: a polyline per series over a shaded ±std band.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title);

/// Reads evaluation CSVs and writes the SVG. Throws on empty input.
void emit_plot(const std::vector<std::filesystem::path>& csvs, const std::filesystem::path& out,
               const std::string& title = "Return vs. length multiplier");

}  // namespace rsac::harness
