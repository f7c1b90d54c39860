#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qcvz/artifacts.hpp"

namespace qcvz {

enum class PlotKind { heatmap, line };

PlotKind plot_kind_from_string(std::string_view name);

/// SVG heatmap of a (x, y, value) table on a rectangular grid.
std::string heatmap_svg(const CsvTable& t);
/// SVG line plot of every column against the first one.
std::string line_svg(const CsvTable& t);

/// Renders `csv_path` next to itself as `<stem>.svg`. Throws
/// std::invalid_argument when the table is empty or has the wrong shape.
std::filesystem::path emit_plot(const std::filesystem::path& csv_path, PlotKind kind);

}  // namespace qcvz
