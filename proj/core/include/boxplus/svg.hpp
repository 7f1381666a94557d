#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace boxplus {

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool bars = false;  // render as histogram bars instead of a polyline
};

// Self-contained SVG (inline styling only) with simple axes.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<SvgSeries>& series, const std::string& x_label = "",
                    const std::string& y_label = "", int width = 720, int height = 460);

// Histogram of samples with an optional reference curve sampled on the same range.
void write_svg_histogram(const std::filesystem::path& path, const std::string& title,
                         const std::vector<double>& samples, int n_bins,
                         const std::vector<std::pair<double, double>>& reference_curve = {});

}  // namespace boxplus
