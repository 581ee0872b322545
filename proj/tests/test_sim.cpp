#include <array>
#include <vector>

#include "doctest.h"
#include "manet/sim/event_queue.hpp"
#include "manet/sim/rng.hpp"
#include "manet/sim/sim_time.hpp"

using namespace manet;

TEST_CASE("SimTime converts and formats")
{
    CHECK(seconds(1.5).micros() == 1500000);
    CHECK(seconds(2.2800000001).micros() == 2280000);
    CHECK(micros(12004321).to_string() == "12.004321");
    CHECK(SimTime::zero().to_string() == "0.000000");
    CHECK(micros(5).seconds() == doctest::Approx(5e-6));
}

TEST_CASE("event queue dispatches in time order")
{
    EventQueue<int> q;
    q.schedule(seconds(5), 0, 5);
    q.schedule(seconds(3), 0, 3);
    q.schedule(seconds(4), 0, 4);
    std::vector<int> order;
    q.run_until(seconds(10), [&](const auto& ev) { order.push_back(ev.action); });
    CHECK(order == std::vector<int>{3, 4, 5});
}

TEST_CASE("event queue breaks ties by insertion order")
{
    EventQueue<int> q;
    q.schedule(seconds(3), 0, 1);
    q.schedule(seconds(3), 0, 2);
    std::vector<std::uint64_t> seqs;
    std::vector<int> order;
    q.run_until(seconds(3), [&](const auto& ev) {
        order.push_back(ev.action);
        seqs.push_back(ev.seq);
    });
    CHECK(order == std::vector<int>{1, 2});
    CHECK(seqs[0] < seqs[1]);
}

TEST_CASE("event queue rejects scheduling in the past")
{
    EventQueue<int> q;
    q.run_until(seconds(3), [](const auto&) {});
    CHECK_THROWS_AS(q.schedule(seconds(2), 0, 0), SchedulingInPast);
    CHECK_THROWS_AS(q.run_until(seconds(1), [](const auto&) {}), SchedulingInPast);
    CHECK_NOTHROW(q.schedule(seconds(3), 0, 0));
}

TEST_CASE("run_until on an empty queue advances the clock")
{
    EventQueue<int> q;
    CHECK(q.run_until(seconds(100), [](const auto&) {}) == 0);
    CHECK(q.now() == seconds(100));
}

TEST_CASE("run_until keeps events past the end")
{
    EventQueue<int> q;
    for (int t : {1, 2, 101}) q.schedule(seconds(t), 0, t);
    CHECK(q.run_until(seconds(100), [](const auto&) {}) == 2);
    CHECK(q.pending() == 1);
    CHECK(q.now() == seconds(100));
    int last = 0;
    q.run_until(seconds(200), [&](const auto& ev) { last = ev.action; });
    CHECK(last == 101);
}

TEST_CASE("events scheduled during dispatch at the current instant still fire")
{
    EventQueue<int> q;
    q.schedule(seconds(1), 0, 1);
    std::vector<int> order;
    q.run_until(seconds(2), [&](const auto& ev) {
        order.push_back(ev.action);
        if (ev.action == 1) q.schedule(q.now(), 0, 2);
    });
    CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("rng degenerate and invalid ranges")
{
    RngStream r(1, "x/0");
    CHECK(r.uniform_real(0, 0) == 0.0);
    CHECK(r.uniform_int(7, 7) == 7);
    CHECK_THROWS_AS(r.uniform_real(1, 0), InvalidRange);
    CHECK_THROWS_AS(r.uniform_int(1, 0), InvalidRange);
}

TEST_CASE("rng streams are reproducible")
{
    RngStream a(42, "mobility/7");
    RngStream b(42, "mobility/7");
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng draws stay inside their bounds")
{
    RngStream r(3, "mac/1");
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform_real(2.0, 5.0);
        CHECK((u >= 2.0 && u < 5.0));
        const auto k = r.uniform_int(-3, 3);
        CHECK((k >= -3 && k <= 3));
    }
}

TEST_CASE("rng key hash is FNV-1a 64")
{
    CHECK(RngStream::hash_key("") == 0xcbf29ce484222325ULL);
    CHECK(RngStream::hash_key("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(stream_key("mobility", 7) == "mobility/7");
}

TEST_CASE("differently keyed streams differ and look independent")
{
    RngStream a(1, "mobility/7");
    RngStream b(1, "traffic/7");
    constexpr int kBins = 10;
    constexpr int kDraws = 100000;
    std::array<std::array<int, kBins>, kBins> counts{};
    int equal = 0;
    for (int i = 0; i < kDraws; ++i) {
        const auto x = a.uniform_int(0, kBins - 1);
        const auto y = b.uniform_int(0, kBins - 1);
        ++counts[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
        equal += x == y;
    }
    CHECK(equal < kDraws);
    // Independence of paired draws: chi-square over the 10x10 table, df = 81.
    std::array<double, kBins> row{}, col{};
    for (int i = 0; i < kBins; ++i) {
        for (int j = 0; j < kBins; ++j) {
            row[i] += counts[i][j];
            col[j] += counts[i][j];
        }
    }
    double chi2 = 0.0;
    for (int i = 0; i < kBins; ++i) {
        for (int j = 0; j < kBins; ++j) {
            const double expected = row[i] * col[j] / kDraws;
            const double d = counts[i][j] - expected;
            chi2 += d * d / expected;
        }
    }
    constexpr double kCritical = 126.0826;  // chi-square 0.999 quantile, df 81
    CHECK(chi2 < kCritical);
}
