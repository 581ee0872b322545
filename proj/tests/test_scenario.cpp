#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "manet/harness/scenario.hpp"
#include "manet/harness/sweep.hpp"
#include "manet/sim/errors.hpp"

using namespace manet;

namespace {

ScenarioConfig small(Protocol p, std::uint64_t seed)
{
    ScenarioConfig c;
    c.protocol = p;
    c.nodes = 15;
    c.connections = 3;
    c.sim_time = 20.0;
    c.seed = seed;
    return c;
}

std::string trace_of(const ScenarioConfig& c)
{
    std::ostringstream out;
    run_scenario(c, &out);
    return out.str();
}

}  // namespace

TEST_CASE("config defaults fill unspecified keys")
{
    const ScenarioConfig c = parse_config("nodes=50\nprotocol=aodv\nseed=7\n");
    CHECK(c.nodes == 50);
    CHECK(c.protocol == Protocol::Aodv);
    CHECK(c.seed == 7);
    CHECK(c.area_x == 1000.0);
    CHECK(c.area_y == 1000.0);
    CHECK(c.packet_size == 512);
    CHECK(c.sim_time == 100.0);
    CHECK(c.pause_time == 0.0);
    CHECK(c.link.tx_range == 250.0);
}

TEST_CASE("config rejects bad input")
{
    CHECK_THROWS_AS(parse_config("nodes=1\n"), ValidationError);
    try {
        parse_config("nodes=1\n");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "nodes");
    }
    try {
        parse_config("# comment\nprotcol=aodv\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_config("nodes=abc\n"), ParseError);
    CHECK_THROWS_AS(parse_config("protocol=olsr\n"), ParseError);
    CHECK_THROWS_AS(parse_config("speed_min=5\nspeed_max=1\n"), ValidationError);
}

TEST_CASE("protocol constants and explicit flows parse")
{
    const ScenarioConfig c =
        parse_config("aodv.hello=false\ndsdv.update_interval=5\ndsr.cache_per_dest=2\nflows=0-4,1-3\nstatic=true\n");
    CHECK(!c.aodv.hello_enabled);
    CHECK(c.dsdv.update_interval == seconds(5));
    CHECK(c.dsr.cache_per_dest == 2);
    REQUIRE(c.flows.size() == 2);
    CHECK(c.flows[1] == std::pair<NodeId, NodeId>{1, 3});
    CHECK(c.stationary);
}

TEST_CASE("formatted config parses back to the same values")
{
    ScenarioConfig c = small(Protocol::Dsr, 3);
    c.dsdv.trigger_min_gap = micros(250000);
    c.link.tx_range = 200.0;
    c.flows = {{0, 1}, {2, 3}};
    c.connections = 2;
    const std::string text = format_config(c);
    CHECK(format_config(parse_config(text)) == text);
    CHECK(report_header(c).find("tx_range=200") != std::string::npos);
}

TEST_CASE("default seed comes from the environment")
{
    ::setenv("MANETSIM_SEED", "42", 1);
    CHECK(default_seed() == 42);
    ::unsetenv("MANETSIM_SEED");
    CHECK(default_seed() == 1);
}

TEST_CASE("identical configs give byte-identical traces and rows")
{
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        const ScenarioConfig c = small(p, 1);
        const std::string a = trace_of(c);
        const std::string b = trace_of(c);
        CHECK(!a.empty());
        CHECK(a == b);
        CHECK(csv_row(c, run_scenario(c, nullptr).metrics) == csv_row(c, run_scenario(c, nullptr).metrics));
    }
    CHECK(trace_of(small(Protocol::Aodv, 1)) != trace_of(small(Protocol::Aodv, 2)));
}

TEST_CASE("online metrics equal the metrics recomputed from the trace")
{
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        const ScenarioConfig c = small(p, 5);
        std::ostringstream out;
        const RunResult r = run_scenario(c, &out);
        std::istringstream in(out.str());
        CHECK(metrics_from_trace(in, c.sim_time, c.nrl_mode) == r.metrics);
        CHECK(r.diagnostics.link_conservation);
    }
}

TEST_CASE("static line delivers everything")
{
    for (Protocol p : {Protocol::Aodv, Protocol::Dsdv, Protocol::Dsr}) {
        ScenarioConfig c;
        c.protocol = p;
        c.nodes = 5;
        c.stationary = true;
        c.placement = Placement::Line;
        c.line_spacing = 200.0;
        c.flows = {{0, 4}};
        c.connections = 1;
        const RunResult r = run_scenario(c, nullptr);
        REQUIRE(r.metrics.pdf);
        CHECK(*r.metrics.pdf >= 99.0);
    }
}

TEST_CASE("grid corner completes with all four metrics")
{
    ScenarioConfig c;
    c.protocol = Protocol::Aodv;
    c.nodes = 200;
    c.connections = 10;
    const RunResult r = run_scenario(c, nullptr);
    CHECK(r.metrics.pdf);
    CHECK(r.metrics.avg_delay);
    CHECK(r.metrics.nrl);
    CHECK(r.metrics.throughput_kbps > 0.0);
}

TEST_CASE("CSV row layout")
{
    const std::string header = csv_header();
    CHECK(header.rfind("protocol,nodes,connections,seed", 0) == 0);
    MetricsReport m;
    m.sent = 10;
    const std::string row = csv_row(small(Protocol::Dsdv, 4), m);
    CHECK(row.rfind("dsdv,15,3,4,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("sweep expansion counts")
{
    SweepSpec spec;
    CHECK(expand(spec).size() == 480);
    spec.node_counts = {25};
    CHECK(expand(spec).size() == 60);
    spec.base.seed = 9;
    const auto runs = expand(spec);
    CHECK(runs.front().seed == 9);
    CHECK(runs[9].seed == 18);
}

TEST_CASE("list arguments")
{
    CHECK(parse_int_list("25..200:25") == std::vector<int>{25, 50, 75, 100, 125, 150, 175, 200});
    CHECK(parse_int_list("5,10") == std::vector<int>{5, 10});
    CHECK(parse_int_list("1..3,7") == std::vector<int>{1, 2, 3, 7});
    CHECK_THROWS_AS(parse_int_list("5..1"), ParseError);
    CHECK_THROWS_AS(parse_int_list("a"), ParseError);
    CHECK(parse_protocol_list("aodv,dsr") == std::vector<Protocol>{Protocol::Aodv, Protocol::Dsr});
    CHECK_THROWS_AS(parse_protocol_list("aodv,tora"), ParseError);
}

TEST_CASE("one seed per cell aggregates to the run itself")
{
    SweepSpec spec;
    spec.protocols = {Protocol::Dsdv};
    spec.node_counts = {10};
    spec.connection_counts = {2};
    spec.seeds = 1;
    spec.base.sim_time = 10.0;
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.runs.size() == 1);
    REQUIRE(res.cells.size() == 1);
    CHECK(res.cells[0].stats.pdf.mean == res.runs[0].metrics->pdf);
    CHECK(!res.cells[0].stats.pdf.stddev);

    std::ostringstream out;
    write_aggregate_csv(out, res.cells);
    std::istringstream in(out.str());
    const auto back = read_aggregate_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].nodes == 10);
    CHECK(*back[0].stats.nrl.mean == doctest::Approx(*res.cells[0].stats.nrl.mean).epsilon(1e-6));

    std::ostringstream runs;
    write_runs_csv(runs, res.runs);
    CHECK(runs.str().find(",ok\n") != std::string::npos);
}

TEST_CASE("aggregate CSV reader rejects malformed files")
{
    std::istringstream bad_header("protocol,nodes\n");
    CHECK_THROWS_AS(read_aggregate_csv(bad_header), ParseError);
    std::istringstream short_row(aggregate_csv_header() + "\naodv,25,5\n");
    CHECK_THROWS_AS(read_aggregate_csv(short_row), ParseError);
    std::istringstream empty(aggregate_csv_header() + "\n");
    CHECK(read_aggregate_csv(empty).empty());
}
