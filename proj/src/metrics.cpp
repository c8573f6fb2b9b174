#include "qzmac/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qzmac {

namespace {

// Nearest-rank percentile over a delay histogram.
std::int64_t percentile(const std::map<std::int64_t, std::uint64_t>& counts, std::uint64_t total, unsigned pct) {
    const std::uint64_t rank = std::max<std::uint64_t>(1, (pct * total + 99) / 100);
    std::uint64_t seen = 0;
    for (const auto& [delay, count] : counts) {
        seen += count;
        if (seen >= rank) return delay;
    }
    return counts.rbegin()->first;
}

}  // namespace

MetricsAccumulator::MetricsAccumulator(std::size_t n, std::uint64_t warmup_slots, double slot_us)
    : n_(n), warmup_(warmup_slots), slot_us_(slot_us), node_delay_sum_(n, 0), node_deliveries_(n, 0) {}

void MetricsAccumulator::add(const SlotRecord& rec) {
    queued_at_horizon_ = std::accumulate(rec.queue_lengths.begin(), rec.queue_lengths.end(), std::uint64_t{0});
    if (rec.asn < warmup_) return;
    ++measured_;
    for (auto a : rec.arrivals) arrivals_ += a;
    if (rec.diverged) ++divergence_;
    misaligned_ += rec.misaligned_nodes;

    switch (rec.outcome.index()) {
        case 0: ++outcomes_.pu_transmit; break;
        case 1: ++outcomes_.polled_transmit; break;
        case 2: ++outcomes_.su_transmit; break;
        case 3: ++outcomes_.contention_win; break;
        case 4: ++outcomes_.contention_collision; break;
        default: ++outcomes_.idle_slot; break;
    }
    if (std::holds_alternative<ChannelLoss>(rec.delivery)) ++outcomes_.channel_loss;

    if (const auto* d = std::get_if<Delivered>(&rec.delivery)) {
        ++deliveries_;
        if (is_polled(rec.outcome))
            ++polled_deliveries_;
        else if (std::holds_alternative<ContentionWin>(rec.outcome))
            ++contention_deliveries_;
        const auto i = d->node.index();
        if (i < n_) {
            ++node_deliveries_[i];
            if (auto delay = rec.delay()) node_delay_sum_[i] += *delay;
        }
        if (auto delay = rec.delay()) ++delay_counts_[*delay];
    }
}

MetricsReport MetricsAccumulator::finish() const {
    if (measured_ == 0) throw std::invalid_argument("summarize: no slots after warmup");
    MetricsReport r;
    r.warmup_slots = warmup_;
    r.measured_slots = measured_;
    r.arrivals = arrivals_;
    r.deliveries = deliveries_;
    r.queued_at_horizon = queued_at_horizon_;
    r.slot_us = slot_us_;
    r.outcomes = outcomes_;
    r.divergence_slots = divergence_;
    r.misaligned_node_slots = misaligned_;
    r.throughput = static_cast<double>(deliveries_) / static_cast<double>(measured_);

    std::uint64_t delayed = 0;
    std::int64_t delay_sum = 0;
    for (const auto& [delay, count] : delay_counts_) {
        delayed += count;
        delay_sum += delay * static_cast<std::int64_t>(count);
    }
    if (delayed > 0) {
        r.mean_delay_slots = static_cast<double>(delay_sum) / static_cast<double>(delayed);
        r.p50_delay_slots = percentile(delay_counts_, delayed, 50);
        r.p95_delay_slots = percentile(delay_counts_, delayed, 95);
        r.p99_delay_slots = percentile(delay_counts_, delayed, 99);
    }
    if (deliveries_ > 0) {
        r.polled_share = static_cast<double>(polled_deliveries_) / static_cast<double>(deliveries_);
        r.contention_share = static_cast<double>(contention_deliveries_) / static_cast<double>(deliveries_);
    }

    r.node_mean_delay_slots.resize(n_);
    r.node_throughput.resize(n_);
    r.node_deliveries = node_deliveries_;
    for (std::size_t i = 0; i < n_; ++i) {
        r.node_throughput[i] = static_cast<double>(node_deliveries_[i]) / static_cast<double>(measured_);
        if (node_deliveries_[i] > 0)
            r.node_mean_delay_slots[i] =
                static_cast<double>(node_delay_sum_[i]) / static_cast<double>(node_deliveries_[i]);
    }
    return r;
}

MetricsReport summarize(std::span<const SlotRecord> records, std::uint64_t warmup, double slot_us) {
    if (records.empty() || warmup >= records.size())
        throw std::invalid_argument("summarize: warmup must be shorter than the trace");
    MetricsAccumulator acc(records.front().queue_lengths.size(), warmup, slot_us);
    for (const auto& rec : records) acc.add(rec);
    return acc.finish();
}

}  // namespace qzmac
