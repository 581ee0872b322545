#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "manet/report/report.hpp"
#include "manet/sim/errors.hpp"

using namespace manet;

namespace {

MetricSummary stat(double mean, double sd)
{
    MetricSummary m;
    m.mean = mean;
    m.stddev = sd;
    m.n = 10;
    return m;
}

std::vector<CellSummary> synthetic()
{
    std::vector<CellSummary> cells;
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        const double k = static_cast<double>(static_cast<int>(p) + 1);
        for (int conn : {5, 10}) {
            for (int n : {25, 50, 75, 100}) {
                CellSummary c;
                c.protocol = p;
                c.nodes = n;
                c.connections = conn;
                c.stats.runs = 10;
                c.stats.pdf = stat(100.0 - k * n / 4.0, 1.5);
                c.stats.avg_delay = stat(0.01 * k, 0.001);
                c.stats.nrl = stat(k * n / 25.0, 0.2);
                c.stats.throughput_kbps = stat(40.0 - k, 2.0);
                c.stats.throughput_pps = stat(10.0 - k, 0.5);
                cells.push_back(c);
            }
        }
    }
    return cells;
}

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("chart rendering is deterministic and well formed")
{
    const auto cells = synthetic();
    const ChartSpec spec{ChartMetric::Pdf, 10, true};
    const std::string a = render_chart_svg(cells, spec);
    CHECK(a == render_chart_svg(cells, spec));
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("</svg>\n") == a.size() - 7);
    CHECK(count(a, "<polyline") == 3);
    CHECK(count(a, "<circle") == 12);
    CHECK(a.find("AODV") != std::string::npos);
    CHECK(a.find("(10 connections)") != std::string::npos);
}

TEST_CASE("error bars can be turned off")
{
    const auto cells = synthetic();
    const std::string with = render_chart_svg(cells, {ChartMetric::Nrl, 5, true});
    const std::string without = render_chart_svg(cells, {ChartMetric::Nrl, 5, false});
    CHECK(count(with, "<line") > count(without, "<line"));
    CHECK(count(with, "<circle") == count(without, "<circle"));
}

TEST_CASE("single protocol input yields a single series")
{
    std::vector<CellSummary> cells;
    for (const CellSummary& c : synthetic()) {
        if (c.protocol == Protocol::Dsr) cells.push_back(c);
    }
    const std::string svg = render_chart_svg(cells, {ChartMetric::Throughput, 10, true});
    CHECK(count(svg, "<polyline") == 1);
    CHECK(svg.find("DSR") != std::string::npos);
    CHECK(svg.find("AODV") == std::string::npos);
    CHECK(summary_table(cells).find("Only") != std::string::npos);
}

TEST_CASE("cells with an absent mean are skipped")
{
    auto cells = synthetic();
    for (CellSummary& c : cells) {
        if (c.protocol == Protocol::Dsdv) c.stats.avg_delay = MetricSummary{};
    }
    const std::string svg = render_chart_svg(cells, {ChartMetric::Delay, 10, true});
    CHECK(count(svg, "<polyline") == 2);
    CHECK(svg.find("DSDV") == std::string::npos);
}

TEST_CASE("summary table ranks and trends")
{
    const std::string t = summary_table(synthetic());
    CHECK(t.find("5 connections") != std::string::npos);
    CHECK(t.find("10 connections") != std::string::npos);
    std::istringstream in(t);
    std::string line;
    bool saw_pdf = false;
    while (std::getline(in, line)) {
        if (line.rfind("pdf", 0) != 0) continue;
        saw_pdf = true;
        // DSR falls fastest and is ranked last.
        const auto best = line.find("Best");
        const auto worst = line.find("Worst");
        REQUIRE(best != std::string::npos);
        REQUIRE(worst != std::string::npos);
        CHECK(best < worst);
        CHECK(line.find("declines") != std::string::npos);
    }
    CHECK(saw_pdf);
}

TEST_CASE("write_report emits eight charts and the summary")
{
    const auto dir = std::filesystem::temp_directory_path() / "manetsim_report_test";
    std::filesystem::remove_all(dir);
    const auto files = write_report(synthetic(), dir);
    CHECK(files.size() == 9);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
    CHECK(std::filesystem::exists(dir / "pdf_c5.svg"));
    CHECK(std::filesystem::exists(dir / "throughput_c10.svg"));
    CHECK(std::filesystem::exists(dir / "summary.txt"));

    std::ifstream f(dir / "nrl_c10.svg", std::ios::binary);
    std::ostringstream body;
    body << f.rdbuf();
    CHECK(body.str() == render_chart_svg(synthetic(), {ChartMetric::Nrl, 10, true}));
    std::filesystem::remove_all(dir);
}

TEST_CASE("empty input is rejected")
{
    CHECK_THROWS_AS(write_report({}, std::filesystem::temp_directory_path() / "manetsim_empty"), EmptyInput);
}
