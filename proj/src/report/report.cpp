#include "manet/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "manet/sim/errors.hpp"

namespace manet {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* color_for(Protocol p)
{
    switch (p) {
    case Protocol::Aodv: return "#1f77b4";
    case Protocol::Dsdv: return "#d62728";
    case Protocol::Dsr: return "#2ca02c";
    }
    return "#000000";
}

std::string label_for(Protocol p)
{
    switch (p) {
    case Protocol::Aodv: return "AODV";
    case Protocol::Dsdv: return "DSDV";
    case Protocol::Dsr: return "DSR";
    }
    return "?";
}

const MetricSummary& summary_of(const CellSummary& c, ChartMetric m)
{
    switch (m) {
    case ChartMetric::Pdf: return c.stats.pdf;
    case ChartMetric::Delay: return c.stats.avg_delay;
    case ChartMetric::Nrl: return c.stats.nrl;
    case ChartMetric::Throughput: return c.stats.throughput_kbps;
    }
    return c.stats.pdf;
}

std::string title_for(ChartMetric m)
{
    switch (m) {
    case ChartMetric::Pdf: return "Packet Delivery Fraction vs. Number of Nodes";
    case ChartMetric::Delay: return "Average End-to-End Delay vs. Number of Nodes";
    case ChartMetric::Nrl: return "Normalized Routing Load vs. Number of Nodes";
    case ChartMetric::Throughput: return "Throughput vs. Number of Nodes";
    }
    return "";
}

std::string axis_for(ChartMetric m)
{
    switch (m) {
    case ChartMetric::Pdf: return "Packet delivery fraction (%)";
    case ChartMetric::Delay: return "Average delay (s)";
    case ChartMetric::Nrl: return "Routing packets per delivered packet";
    case ChartMetric::Throughput: return "Throughput (kbit/s)";
    }
    return "";
}

bool lower_is_better(ChartMetric m)
{
    return m == ChartMetric::Delay || m == ChartMetric::Nrl;
}

std::string num(double v, int decimals = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

double nice_step(double span)
{
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (raw <= f * mag) return f * mag;
    }
    return 10.0 * mag;
}

int tick_decimals(double step)
{
    int d = 0;
    while (d < 9 && std::fabs(step * std::pow(10.0, d) - std::round(step * std::pow(10.0, d))) > 1e-9) ++d;
    return d;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '&') {
            out += "&amp;";
        } else if (c == '<') {
            out += "&lt;";
        } else if (c == '>') {
            out += "&gt;";
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(ChartMetric m)
{
    switch (m) {
    case ChartMetric::Pdf: return "pdf";
    case ChartMetric::Delay: return "delay";
    case ChartMetric::Nrl: return "nrl";
    case ChartMetric::Throughput: return "throughput";
    }
    return "?";
}

std::string render_chart_svg(const std::vector<CellSummary>& cells, const ChartSpec& spec)
{
    struct Point {
        int x;
        double y;
        std::optional<double> sd;
    };
    std::map<Protocol, std::vector<Point>> series;
    std::set<int> xs;
    double ymax = 0.0;
    for (const CellSummary& c : cells) {
        if (c.connections != spec.connections) continue;
        const MetricSummary& m = summary_of(c, spec.metric);
        xs.insert(c.nodes);
        if (!m.mean) continue;
        series[c.protocol].push_back({c.nodes, *m.mean, m.stddev});
        ymax = std::max(ymax, *m.mean + (spec.error_bars && m.stddev ? *m.stddev : 0.0));
    }
    for (auto& [p, pts] : series) std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });

    const double step = nice_step(ymax > 0.0 ? ymax : 1.0);
    const double ytop = std::max(step, std::ceil(ymax / step) * step);
    const int decimals = tick_decimals(step);
    const double xmin = xs.empty() ? 0.0 : *xs.begin();
    const double xmax = xs.empty() ? 1.0 : *xs.rbegin();
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return xmax > xmin ? kLeft + (x - xmin) / (xmax - xmin) * plot_w : kLeft + plot_w / 2.0; };
    auto py = [&](double y) { return kTop + plot_h - y / ytop * plot_h; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, 0) + "\" height=\"" + num(kHeight, 0) +
         "\" viewBox=\"0 0 " + num(kWidth, 0) + " " + num(kHeight, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kLeft + plot_w / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title_for(spec.metric)) + " (" + std::to_string(spec.connections) + " connections)</text>\n";

    // Grid and y ticks.
    for (double v = 0.0; v <= ytop + step * 1e-9; v += step) {
        const double y = py(v);
        s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" + num(y) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + num(kLeft - 6.0) + "\" y=\"" + num(y + 4.0) + "\" text-anchor=\"end\">" + num(v, decimals) +
             "</text>\n";
    }
    for (int x : xs) {
        s += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(px(x)) + "\" y2=\"" +
             num(kTop + plot_h + 5.0) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + plot_h + 18.0) + "\" text-anchor=\"middle\">" +
             std::to_string(x) + "</text>\n";
    }
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft + plot_w / 2.0) + "\" y=\"" + num(kHeight - 12.0) +
         "\" text-anchor=\"middle\">Number of nodes</text>\n";
    s += "<text transform=\"translate(18," + num(kTop + plot_h / 2.0) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(axis_for(spec.metric)) + "</text>\n";

    int row = 0;
    for (const auto& [proto, pts] : series) {
        const std::string color = color_for(proto);
        std::string path;
        for (const Point& p : pts) path += (path.empty() ? "" : " ") + num(px(p.x)) + "," + num(py(p.y));
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
        for (const Point& p : pts) {
            if (spec.error_bars && p.sd) {
                const double lo = std::max(0.0, p.y - *p.sd);
                const double hi = p.y + *p.sd;
                s += "<line x1=\"" + num(px(p.x)) + "\" y1=\"" + num(py(lo)) + "\" x2=\"" + num(px(p.x)) + "\" y2=\"" +
                     num(py(hi)) + "\" stroke=\"" + color + "\"/>\n";
                for (double v : {lo, hi}) {
                    s += "<line x1=\"" + num(px(p.x) - 4.0) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(px(p.x) + 4.0) +
                         "\" y2=\"" + num(py(v)) + "\" stroke=\"" + color + "\"/>\n";
                }
            }
            s += "<circle cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) + "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
        }
        const double ly = kTop + 12.0 + row * 20.0;
        const double lx = kLeft + plot_w + 20.0;
        s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24.0) + "\" y2=\"" + num(ly) +
             "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(lx + 30.0) + "\" y=\"" + num(ly + 4.0) + "\">" + label_for(proto) + "</text>\n";
        ++row;
    }
    s += "</svg>\n";
    return s;
}

std::string summary_table(const std::vector<CellSummary>& cells)
{
    std::set<Protocol> protocols;
    std::set<int> conns;
    for (const CellSummary& c : cells) {
        protocols.insert(c.protocol);
        conns.insert(c.connections);
    }

    std::string out = "Qualitative comparison computed from the aggregated sweep\n";
    out += "(rank by mean over node counts; trend from smallest to largest network)\n\n";
    char buf[256];
    for (int conn : conns) {
        std::snprintf(buf, sizeof buf, "%d connections\n", conn);
        out += buf;
        std::snprintf(buf, sizeof buf, "%-12s", "metric");
        out += buf;
        for (Protocol p : protocols) {
            std::snprintf(buf, sizeof buf, " | %-34s", label_for(p).c_str());
            out += buf;
        }
        out += "\n";
        for (ChartMetric m : kChartMetrics) {
            struct Stat {
                double mean = 0.0;
                double first = 0.0;
                double last = 0.0;
                double cv = 0.0;
                bool ok = false;
            };
            std::map<Protocol, Stat> stats;
            for (Protocol p : protocols) {
                std::vector<std::pair<int, double>> pts;
                for (const CellSummary& c : cells) {
                    const auto& s = summary_of(c, m);
                    if (c.protocol == p && c.connections == conn && s.mean) pts.emplace_back(c.nodes, *s.mean);
                }
                if (pts.empty()) continue;
                std::sort(pts.begin(), pts.end());
                Stat st;
                st.ok = true;
                double sum = 0.0;
                for (const auto& pt : pts) sum += pt.second;
                st.mean = sum / static_cast<double>(pts.size());
                double ss = 0.0;
                for (const auto& pt : pts) ss += (pt.second - st.mean) * (pt.second - st.mean);
                const double sd = pts.size() > 1 ? std::sqrt(ss / static_cast<double>(pts.size() - 1)) : 0.0;
                st.cv = st.mean != 0.0 ? sd / std::fabs(st.mean) : 0.0;
                st.first = pts.front().second;
                st.last = pts.back().second;
                stats[p] = st;
            }
            std::vector<Protocol> order;
            for (const auto& [p, st] : stats) order.push_back(p);
            std::stable_sort(order.begin(), order.end(), [&](Protocol a, Protocol b) {
                return lower_is_better(m) ? stats[a].mean < stats[b].mean : stats[a].mean > stats[b].mean;
            });
            std::snprintf(buf, sizeof buf, "%-12s", std::string(to_string(m)).c_str());
            out += buf;
            for (Protocol p : protocols) {
                std::string cell = "n/a";
                if (stats.contains(p)) {
                    const Stat& st = stats[p];
                    const auto rank = static_cast<std::size_t>(std::find(order.begin(), order.end(), p) - order.begin());
                    const char* label = rank == 0 ? "Best" : (rank + 1 == order.size() ? "Worst" : "Average");
                    if (order.size() == 1) label = "Only";
                    const char* trend = "constant";
                    if (st.cv >= 0.15) {
                        trend = st.last > st.first ? "increases" : "declines";
                    }
                    char c2[128];
                    std::snprintf(c2, sizeof c2, "%s, %s (mean %.4g)", label, trend, st.mean);
                    cell = c2;
                }
                std::snprintf(buf, sizeof buf, " | %-34s", cell.c_str());
                out += buf;
            }
            out += "\n";
        }
        out += "\n";
    }
    return out;
}

std::vector<std::filesystem::path> write_report(const std::vector<CellSummary>& cells, const std::filesystem::path& out_dir)
{
    if (cells.empty()) throw EmptyInput("no aggregated rows");
    std::filesystem::create_directories(out_dir);
    std::set<int> conns;
    for (const CellSummary& c : cells) conns.insert(c.connections);
    std::vector<std::filesystem::path> written;
    for (int conn : conns) {
        for (ChartMetric m : kChartMetrics) {
            const auto path = out_dir / (std::string(to_string(m)) + "_c" + std::to_string(conn) + ".svg");
            std::ofstream f(path, std::ios::binary);
            f << render_chart_svg(cells, {m, conn, true});
            if (!f) throw std::runtime_error("cannot write " + path.string());
            written.push_back(path);
        }
    }
    const auto table = out_dir / "summary.txt";
    std::ofstream f(table, std::ios::binary);
    f << summary_table(cells);
    if (!f) throw std::runtime_error("cannot write " + table.string());
    written.push_back(table);
    return written;
}

}  // namespace manet
