#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manet/harness/scenario.hpp"

namespace manet {

struct SweepSpec {
    std::vector<Protocol> protocols{Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr};
    std::vector<int> node_counts{25, 50, 75, 100, 125, 150, 175, 200};
    std::vector<int> connection_counts{5, 10};
    int seeds = 10;  // seed values base.seed, base.seed+1, ...
    ScenarioConfig base;
    int jobs = 1;
};

struct RunRecord {
    ScenarioConfig config;
    std::optional<MetricsReport> metrics;
    std::string status = "ok";  // error message for failed runs
};

struct CellSummary {
    Protocol protocol = Protocol::Aodv;
    int nodes = 0;
    int connections = 0;
    std::size_t failed = 0;
    AggregateReport stats;
};

struct SweepResult {
    std::vector<RunRecord> runs;    // sorted by (protocol, nodes, connections, seed)
    std::vector<CellSummary> cells; // one per (protocol, nodes, connections)
    bool all_ok() const;
};

/// The cartesian product of the spec, in canonical order.
std::vector<ScenarioConfig> expand(const SweepSpec& spec);

using SweepProgress = std::function<void(std::size_t done, std::size_t total, const RunRecord&)>;

/// Executes every run (on spec.jobs worker threads), then aggregates per cell.
/// A failed run is kept with its status and left out of the aggregates.
SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress = {});

/// Aggregates already executed runs, in any order.
std::vector<CellSummary> summarize(std::vector<RunRecord>& runs);

/// `a..b:step` (inclusive of b when aligned), `a..b` (step 1), or comma lists
/// of either. Throws ParseError(0) on malformed input.
std::vector<int> parse_int_list(std::string_view text);
std::vector<Protocol> parse_protocol_list(std::string_view text);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_aggregate_csv(std::ostream& out, const std::vector<CellSummary>& cells);

std::string aggregate_csv_header();

/// Reads an aggregate CSV written by write_aggregate_csv. Throws ParseError.
std::vector<CellSummary> read_aggregate_csv(std::istream& in);

}  // namespace manet
