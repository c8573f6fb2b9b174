#include <doctest.h>

#include <stdexcept>

#include "qzmac/metrics.hpp"

using namespace qzmac;

namespace {

SlotRecord rec(std::uint64_t asn, std::vector<std::uint8_t> arrivals, SlotPhaseOutcome o, DeliveryResult d,
               std::optional<std::int64_t> arrival_slot, std::vector<std::size_t> queues) {
    SlotRecord r;
    r.asn = asn;
    r.arrivals = std::move(arrivals);
    r.outcome = std::move(o);
    r.delivery = std::move(d);
    r.departed_arrival_slot = arrival_slot;
    r.state = init_protocol_state(2, node(0), node(1));
    r.queue_lengths = std::move(queues);
    return r;
}

// Hand-checked ten-slot trace, n = 2.
std::vector<SlotRecord> fixture() {
    const auto n0 = node(0);
    const auto n1 = node(1);
    return {
        rec(0, {1, 0}, IdleSlot{}, NothingSent{}, {}, {1, 0}),
        rec(1, {0, 1}, PuTransmit{n0}, Delivered{n0}, 0, {0, 1}),
        rec(2, {1, 1}, PolledTransmit{n1}, Delivered{n1}, 1, {1, 1}),
        rec(3, {0, 0}, ContentionCollision{{n0, n1}}, CollisionLoss{}, {}, {1, 1}),
        rec(4, {0, 0}, ContentionWin{n1, {2}}, Delivered{n1}, 2, {1, 0}),
        rec(5, {0, 1}, PuTransmit{n0}, Delivered{n0}, 2, {0, 1}),
        rec(6, {0, 0}, SuTransmit{n1}, ChannelLoss{n1}, {}, {0, 1}),
        rec(7, {0, 0}, SuTransmit{n1}, Delivered{n1}, 5, {0, 0}),
        rec(8, {1, 0}, IdleSlot{}, NothingSent{}, {}, {1, 0}),
        rec(9, {0, 0}, ContentionWin{n0, {1}}, Delivered{n0}, 8, {0, 0}),
    };
}

}  // namespace

TEST_CASE("summarize the hand-built trace") {
    const auto records = fixture();
    const auto r = summarize(records, 0);
    CHECK(r.measured_slots == 10);
    CHECK(r.arrivals == 6);
    CHECK(r.deliveries == 6);
    CHECK(r.queued_at_horizon == 0);
    CHECK(r.throughput == doctest::Approx(0.6));
    REQUIRE(r.mean_delay_slots.has_value());
    CHECK(*r.mean_delay_slots == doctest::Approx(10.0 / 6.0));
    CHECK(*r.mean_delay_ms() == doctest::Approx(100.0 / 6.0));
    CHECK(r.p50_delay_slots == 1);
    CHECK(r.p95_delay_slots == 3);
    CHECK(r.p99_delay_slots == 3);

    const OutcomeHistogram expected{2, 1, 2, 2, 1, 2, 1};
    CHECK(r.outcomes == expected);
    CHECK(*r.polled_share == doctest::Approx(4.0 / 6.0));
    CHECK(*r.contention_share == doctest::Approx(2.0 / 6.0));

    CHECK(r.node_deliveries == std::vector<std::uint64_t>{3, 3});
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(*r.node_mean_delay_slots[i] == doctest::Approx(5.0 / 3.0));
        CHECK(r.node_throughput[i] == doctest::Approx(0.3));
    }
}

TEST_CASE("warmup excludes early slots") {
    const auto records = fixture();
    const auto r = summarize(records, 5);
    CHECK(r.measured_slots == 5);
    CHECK(r.arrivals == 2);
    CHECK(r.deliveries == 3);
    CHECK(*r.mean_delay_slots == doctest::Approx(2.0));
    CHECK(r.throughput == doctest::Approx(0.6));
}

TEST_CASE("accumulator matches summarize") {
    const auto records = fixture();
    MetricsAccumulator acc(2, 3);
    for (const auto& r : records) acc.add(r);
    CHECK(acc.finish() == summarize(records, 3));
}

TEST_CASE("no deliveries leaves delay statistics absent") {
    std::vector<SlotRecord> idle;
    for (std::uint64_t t = 0; t < 4; ++t) idle.push_back(rec(t, {0, 0}, IdleSlot{}, NothingSent{}, {}, {0, 0}));
    const auto r = summarize(idle, 0);
    CHECK_FALSE(r.mean_delay_slots.has_value());
    CHECK_FALSE(r.p50_delay_slots.has_value());
    CHECK_FALSE(r.polled_share.has_value());
    CHECK_FALSE(r.mean_delay_ms().has_value());
    CHECK_FALSE(r.node_mean_delay_slots[0].has_value());
    CHECK(r.throughput == 0.0);
}

TEST_CASE("empty measurement window is rejected") {
    const auto records = fixture();
    CHECK_THROWS_AS(summarize(records, 10), std::invalid_argument);
    CHECK_THROWS_AS(summarize(std::span<const SlotRecord>{}, 0), std::invalid_argument);
    MetricsAccumulator acc(2, 0);
    CHECK_THROWS_AS(acc.finish(), std::invalid_argument);
}
