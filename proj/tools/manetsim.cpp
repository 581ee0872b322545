// manetsim: run, sweep, report, trace-metrics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "manet/harness/scenario.hpp"
#include "manet/harness/sweep.hpp"
#include "manet/metrics/metrics.hpp"
#include "manet/report/report.hpp"
#include "manet/sim/errors.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfigMissing = 2;
constexpr int kExitNoRows = 3;
constexpr int kExitMalformedTrace = 4;

void print_metrics(std::ostream& out, const MetricsReport& m)
{
    auto opt = [](const std::optional<double>& v, const char* f) {
        if (!v) return std::string("absent");
        char buf[64];
        std::snprintf(buf, sizeof buf, f, *v);
        return std::string(buf);
    };
    char buf[128];
    out << "sent            " << m.sent << "\n";
    out << "received        " << m.received << "\n";
    out << "pdf             " << opt(m.pdf, "%.6f %%") << "\n";
    out << "avg_delay       " << opt(m.avg_delay, "%.9f s") << "\n";
    out << "routing_tx      " << m.routing_tx << "\n";
    out << "nrl             " << opt(m.nrl, "%.6f") << "\n";
    std::snprintf(buf, sizeof buf, "%.6f kbit/s (%.6f pkt/s)", m.throughput_kbps, m.throughput_pps);
    out << "throughput      " << buf << "\n";
    out << "drops           IFQ " << m.drop_count(DropReason::Ifq) << " NRTE " << m.drop_count(DropReason::Nrte)
        << " COLLISION " << m.drop_count(DropReason::Collision) << " TTL " << m.drop_count(DropReason::Ttl)
        << " MALFORMED " << m.drop_count(DropReason::Malformed) << "\n";
    out << "in_flight       " << m.in_flight << "\n";
}

bool read_file(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int cmd_run(const std::string& config_path, const std::string& trace_path, const std::string& metrics_path)
{
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config not found: " << config_path << "\n";
        return kExitConfigMissing;
    }
    const ScenarioConfig cfg = parse_config(text);

    std::ofstream trace_file;
    std::ostream* trace_out = nullptr;
    if (trace_path == "-") {
        trace_out = &std::cout;
    } else if (!trace_path.empty()) {
        trace_file.open(trace_path, std::ios::binary);
        if (!trace_file) throw std::runtime_error("cannot write trace " + trace_path);
        trace_out = &trace_file;
    }
    const RunResult r = run_scenario(cfg, trace_out);
    if (trace_file.is_open()) trace_file.close();

    if (!metrics_path.empty()) {
        std::ofstream m(metrics_path, std::ios::binary);
        m << report_header(cfg) << csv_header() << "\n" << csv_row(cfg, r.metrics) << "\n";
        if (!m) throw std::runtime_error("cannot write metrics " + metrics_path);
    }
    print_metrics(trace_path == "-" ? std::cerr : std::cout, r.metrics);
    return 0;
}

int cmd_sweep(const std::string& protocols, const std::string& nodes, const std::string& connections, int seeds,
              const std::string& base_config, const std::string& out_dir, int jobs, bool quiet)
{
    SweepSpec spec;
    if (!base_config.empty()) {
        std::string text;
        if (!read_file(base_config, text)) {
            std::cerr << "config not found: " << base_config << "\n";
            return kExitConfigMissing;
        }
        spec.base = parse_config(text);
    } else {
        spec.base.seed = default_seed();
    }
    try {
        spec.protocols = parse_protocol_list(protocols);
        spec.node_counts = parse_int_list(nodes);
        spec.connection_counts = parse_int_list(connections);
    } catch (const ParseError& e) {
        std::cerr << "bad list: " << e.what() << "\n";
        return kExitFailure;
    }
    if (seeds < 1) {
        std::cerr << "--seeds must be at least 1\n";
        return kExitFailure;
    }
    spec.seeds = seeds;
    spec.jobs = jobs;

    const SweepResult res = run_sweep(spec, [&](std::size_t done, std::size_t total, const RunRecord& r) {
        if (quiet) return;
        std::cerr << "[" << done << "/" << total << "] " << to_string(r.config.protocol) << " nodes=" << r.config.nodes
                  << " connections=" << r.config.connections << " seed=" << r.config.seed << " " << r.status << "\n";
    });

    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "runs.csv", std::ios::binary);
        write_runs_csv(f, res.runs);
    }
    {
        std::ofstream f(fs::path(out_dir) / "aggregate.csv", std::ios::binary);
        write_aggregate_csv(f, res.cells);
    }
    {
        std::ofstream f(fs::path(out_dir) / "header.txt", std::ios::binary);
        f << report_header(spec.base);
        f << "# sweep: protocols=" << protocols << " nodes=" << nodes << " connections=" << connections
          << " seeds=" << seeds << " (seed values " << spec.base.seed << ".." << spec.base.seed + seeds - 1 << ")\n";
    }
    if (!res.all_ok()) {
        std::cerr << "some runs failed; see runs.csv\n";
        return kExitFailure;
    }
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_dir)
{
    const fs::path csv = fs::path(in_dir) / "aggregate.csv";
    std::ifstream in(csv, std::ios::binary);
    if (!in) {
        std::cerr << "aggregate CSV not found: " << csv.string() << "\n";
        return kExitNoRows;
    }
    const auto cells = read_aggregate_csv(in);
    if (cells.empty()) {
        std::cerr << "no aggregated rows\n";
        return kExitNoRows;
    }
    for (const auto& p : write_report(cells, out_dir)) std::cout << p.string() << "\n";
    return 0;
}

int cmd_trace_metrics(const std::string& trace_path, double window, const std::string& nrl_mode)
{
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) {
        std::cerr << "trace not found: " << trace_path << "\n";
        return kExitFailure;
    }
    const auto mode = nrl_mode_from(nrl_mode);
    if (!mode) {
        std::cerr << "--nrl-mode must be perhop or originated\n";
        return kExitFailure;
    }
    try {
        print_metrics(std::cout, metrics_from_trace(in, window, *mode));
    } catch (const ParseError& e) {
        std::cerr << "malformed trace: " << e.what() << "\n";
        return kExitMalformedTrace;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event MANET simulator: AODV, DSDV and DSR"};
    app.require_subcommand(1);

    std::string config_path, trace_path, metrics_path;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("--config", config_path, "Scenario config (key=value lines)")->required();
    run->add_option("--trace", trace_path, "Trace output path, '-' for standard output");
    run->add_option("--metrics", metrics_path, "One-row metrics CSV output path");

    std::string protocols = "aodv,dsdv,dsr", nodes = "25..200:25", connections = "5,10", out_dir, base_config;
    int seeds = 10;
    int jobs = 1;
    bool quiet = false;
    auto* sweep = app.add_subcommand("sweep", "Run the protocol x nodes x connections x seeds grid");
    sweep->add_option("--protocols", protocols, "Comma list of aodv, dsdv, dsr")->capture_default_str();
    sweep->add_option("--nodes", nodes, "Node counts, e.g. 25..200:25 or 25,50")->capture_default_str();
    sweep->add_option("--connections", connections, "Connection counts")->capture_default_str();
    sweep->add_option("--seeds", seeds, "Seeds per cell")->capture_default_str();
    sweep->add_option("--config", base_config, "Base scenario config");
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    sweep->add_flag("--quiet", quiet, "No per-run progress");

    std::string report_in, report_out;
    auto* report = app.add_subcommand("report", "Render charts and the comparison table from a sweep");
    report->add_option("--in", report_in, "Sweep output directory")->required();
    report->add_option("--out", report_out, "Chart output directory")->required();

    std::string tm_trace, tm_mode = "perhop";
    double tm_window = 100.0;
    auto* tm = app.add_subcommand("trace-metrics", "Recompute metrics from a trace file");
    tm->add_option("--trace", tm_trace, "Trace file")->required();
    tm->add_option("--window", tm_window, "Throughput window in seconds (the run's sim_time)")->capture_default_str();
    tm->add_option("--nrl-mode", tm_mode, "perhop or originated")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, trace_path, metrics_path);
        if (*sweep) return cmd_sweep(protocols, nodes, connections, seeds, base_config, out_dir, jobs, quiet);
        if (*report) return cmd_report(report_in, report_out);
        if (*tm) return cmd_trace_metrics(tm_trace, tm_window, tm_mode);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
