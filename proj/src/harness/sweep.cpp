#include "manet/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "manet/sim/errors.hpp"

namespace manet {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int to_int(std::string_view s)
{
    int v = 0;
    s = trim(s);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(0, "not an integer: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) break;
        s = s.substr(p + 1);
    }
    return out;
}

auto cell_key(const ScenarioConfig& c)
{
    return std::make_tuple(static_cast<int>(c.protocol), c.nodes, c.connections);
}

auto run_key(const ScenarioConfig& c)
{
    return std::make_tuple(static_cast<int>(c.protocol), c.nodes, c.connections, c.seed);
}

std::string fmt(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

std::string fmt_delay(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", *v);
    return buf;
}

std::optional<double> opt_double(std::string_view s, int line)
{
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(line, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

bool SweepResult::all_ok() const
{
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.metrics.has_value(); });
}

std::vector<ScenarioConfig> expand(const SweepSpec& spec)
{
    std::vector<ScenarioConfig> out;
    for (Protocol p : spec.protocols) {
        for (int n : spec.node_counts) {
            for (int c : spec.connection_counts) {
                for (int s = 0; s < spec.seeds; ++s) {
                    ScenarioConfig cfg = spec.base;
                    cfg.protocol = p;
                    cfg.nodes = n;
                    cfg.connections = c;
                    cfg.flows.clear();
                    cfg.seed = spec.base.seed + static_cast<std::uint64_t>(s);
                    out.push_back(cfg);
                }
            }
        }
    }
    return out;
}

std::vector<CellSummary> summarize(std::vector<RunRecord>& runs)
{
    std::sort(runs.begin(), runs.end(),
              [](const RunRecord& a, const RunRecord& b) { return run_key(a.config) < run_key(b.config); });
    std::vector<CellSummary> cells;
    std::size_t i = 0;
    while (i < runs.size()) {
        std::size_t j = i;
        std::vector<MetricsReport> ok;
        CellSummary cell;
        cell.protocol = runs[i].config.protocol;
        cell.nodes = runs[i].config.nodes;
        cell.connections = runs[i].config.connections;
        while (j < runs.size() && cell_key(runs[j].config) == cell_key(runs[i].config)) {
            if (runs[j].metrics) {
                ok.push_back(*runs[j].metrics);
            } else {
                ++cell.failed;
            }
            ++j;
        }
        if (!ok.empty()) cell.stats = aggregate(ok);
        cells.push_back(cell);
        i = j;
    }
    return cells;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress)
{
    const std::vector<ScenarioConfig> configs = expand(spec);
    SweepResult result;
    result.runs.resize(configs.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex mu;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            RunRecord rec;
            rec.config = configs[i];
            try {
                rec.metrics = run_scenario(configs[i], nullptr).metrics;
            } catch (const std::exception& e) {
                rec.status = e.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            result.runs[i] = rec;
            ++done;
            if (progress) progress(done, configs.size(), rec);
        }
    };
    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.cells = summarize(result.runs);
    return result;
}

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    for (std::string_view item : split(text, ',')) {
        item = trim(item);
        if (item.empty()) throw ParseError(0, "empty list item");
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(to_int(item));
            continue;
        }
        const int a = to_int(item.substr(0, dots));
        std::string_view rest = item.substr(dots + 2);
        int step = 1;
        if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
            step = to_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const int b = to_int(rest);
        if (step <= 0 || b < a) throw ParseError(0, "bad range '" + std::string(item) + "'");
        for (int v = a; v <= b; v += step) out.push_back(v);
    }
    return out;
}

std::vector<Protocol> parse_protocol_list(std::string_view text)
{
    std::vector<Protocol> out;
    for (std::string_view item : split(text, ',')) {
        auto p = protocol_from(trim(item));
        if (!p) throw ParseError(0, "unknown protocol '" + std::string(trim(item)) + "'");
        out.push_back(*p);
    }
    return out;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs)
{
    out << csv_header() << ",status\n";
    for (const RunRecord& r : runs) {
        if (r.metrics) {
            out << csv_row(r.config, *r.metrics) << ",ok\n";
        } else {
            std::string status = r.status;
            std::replace(status.begin(), status.end(), ',', ';');
            std::replace(status.begin(), status.end(), '\n', ' ');
            out << to_string(r.config.protocol) << ',' << r.config.nodes << ',' << r.config.connections << ','
                << r.config.seed << ",,,,,,,,,,,," << status << '\n';
        }
    }
}

std::string aggregate_csv_header()
{
    return "protocol,nodes,connections,runs,failed,pdf_mean,pdf_std,pdf_n,avg_delay_mean,avg_delay_std,avg_delay_n,"
           "nrl_mean,nrl_std,nrl_n,throughput_kbps_mean,throughput_kbps_std,throughput_pps_mean,throughput_pps_std";
}

void write_aggregate_csv(std::ostream& out, const std::vector<CellSummary>& cells)
{
    out << aggregate_csv_header() << '\n';
    for (const CellSummary& c : cells) {
        const AggregateReport& s = c.stats;
        out << to_string(c.protocol) << ',' << c.nodes << ',' << c.connections << ',' << s.runs << ',' << c.failed
            << ',' << fmt(s.pdf.mean) << ',' << fmt(s.pdf.stddev) << ',' << s.pdf.n << ',' << fmt_delay(s.avg_delay.mean)
            << ',' << fmt_delay(s.avg_delay.stddev) << ',' << s.avg_delay.n << ',' << fmt(s.nrl.mean) << ','
            << fmt(s.nrl.stddev) << ',' << s.nrl.n << ',' << fmt(s.throughput_kbps.mean) << ','
            << fmt(s.throughput_kbps.stddev) << ',' << fmt(s.throughput_pps.mean) << ','
            << fmt(s.throughput_pps.stddev) << '\n';
    }
}

std::vector<CellSummary> read_aggregate_csv(std::istream& in)
{
    std::vector<CellSummary> cells;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != aggregate_csv_header()) throw ParseError(lineno, "unexpected aggregate CSV header");
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 18) throw ParseError(lineno, "expected 18 fields, got " + std::to_string(f.size()));
        CellSummary c;
        auto p = protocol_from(f[0]);
        if (!p) throw ParseError(lineno, "unknown protocol");
        c.protocol = *p;
        try {
            c.nodes = to_int(f[1]);
            c.connections = to_int(f[2]);
            c.stats.runs = static_cast<std::size_t>(to_int(f[3]));
            c.failed = static_cast<std::size_t>(to_int(f[4]));
            auto summary = [&](std::size_t mean, std::size_t sd, std::optional<std::size_t> n) {
                MetricSummary m;
                m.mean = opt_double(f[mean], lineno);
                m.stddev = opt_double(f[sd], lineno);
                m.n = n ? static_cast<std::size_t>(to_int(f[*n])) : c.stats.runs;
                m.excluded = c.stats.runs - m.n;
                return m;
            };
            c.stats.pdf = summary(5, 6, 7);
            c.stats.avg_delay = summary(8, 9, 10);
            c.stats.nrl = summary(11, 12, 13);
            c.stats.throughput_kbps = summary(14, 15, std::nullopt);
            c.stats.throughput_pps = summary(16, 17, std::nullopt);
        } catch (const ParseError& e) {
            if (e.line() != 0) throw;
            throw ParseError(lineno, e.what());
        }
        cells.push_back(c);
    }
    return cells;
}

}  // namespace manet
