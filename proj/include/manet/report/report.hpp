#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "manet/harness/sweep.hpp"

namespace manet {

enum class ChartMetric { Pdf, Delay, Nrl, Throughput };

std::string_view to_string(ChartMetric m);
inline constexpr ChartMetric kChartMetrics[] = {ChartMetric::Pdf, ChartMetric::Delay, ChartMetric::Nrl,
                                                ChartMetric::Throughput};

struct ChartSpec {
    ChartMetric metric = ChartMetric::Pdf;
    int connections = 10;
    bool error_bars = true;
};

/// Line chart, x = node count, one series per protocol present in cells.
/// Byte-for-byte deterministic for the same input.
std::string render_chart_svg(const std::vector<CellSummary>& cells, const ChartSpec& spec);

/// Qualitative comparison table: for each
/// metric, each protocol's rank and trend over node counts.
std::string summary_table(const std::vector<CellSummary>& cells);

/// Writes `<metric>_c<connections>.svg` for every metric and connection count
/// present, plus summary.txt. Returns the paths written. Throws EmptyInput
/// when cells is empty.
std::vector<std::filesystem::path> write_report(const std::vector<CellSummary>& cells, const std::filesystem::path& out_dir);

}  // namespace manet
