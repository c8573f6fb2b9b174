#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qzmac/record.hpp"
#include "qzmac/sync.hpp"

namespace qzmac {

struct OutcomeHistogram {
    std::uint64_t pu_transmit = 0;
    std::uint64_t polled_transmit = 0;
    std::uint64_t su_transmit = 0;
    std::uint64_t contention_win = 0;
    std::uint64_t contention_collision = 0;
    std::uint64_t idle_slot = 0;
    std::uint64_t channel_loss = 0;

    bool operator==(const OutcomeHistogram&) const = default;
};

struct MetricsReport {
    std::uint64_t warmup_slots = 0;
    std::uint64_t measured_slots = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t queued_at_horizon = 0;
    double slot_us = kSlotUs;

    std::optional<double> mean_delay_slots;
    std::optional<std::int64_t> p50_delay_slots;
    std::optional<std::int64_t> p95_delay_slots;
    std::optional<std::int64_t> p99_delay_slots;
    double throughput = 0.0;

    std::vector<std::optional<double>> node_mean_delay_slots;
    std::vector<double> node_throughput;
    std::vector<std::uint64_t> node_deliveries;

    OutcomeHistogram outcomes;
    /// Share of deliveries made in a polling minislot (PU, argmax V or SU).
    std::optional<double> polled_share;
    /// Share of deliveries made after contention.
    std::optional<double> contention_share;

    std::uint64_t divergence_slots = 0;
    std::uint64_t misaligned_node_slots = 0;

    std::optional<double> mean_delay_ms() const {
        if (!mean_delay_slots) return std::nullopt;
        return *mean_delay_slots * slot_us / 1000.0;
    }

    bool operator==(const MetricsReport&) const = default;
};

/// Streaming form of summarize(); the engine feeds it slot by slot.
class MetricsAccumulator {
public:
    MetricsAccumulator(std::size_t n, std::uint64_t warmup_slots, double slot_us = kSlotUs);

    void add(const SlotRecord& rec);

    /// Throws std::invalid_argument if no post-warmup slot was added.
    MetricsReport finish() const;

private:
    std::size_t n_;
    std::uint64_t warmup_;
    double slot_us_;
    std::uint64_t measured_ = 0;
    std::uint64_t arrivals_ = 0;
    std::uint64_t deliveries_ = 0;
    std::uint64_t polled_deliveries_ = 0;
    std::uint64_t contention_deliveries_ = 0;
    std::uint64_t queued_at_horizon_ = 0;
    std::uint64_t divergence_ = 0;
    std::uint64_t misaligned_ = 0;
    OutcomeHistogram outcomes_;
    std::map<std::int64_t, std::uint64_t> delay_counts_;
    std::vector<std::int64_t> node_delay_sum_;
    std::vector<std::uint64_t> node_deliveries_;
};

/// Statistics over records with asn >= warmup. Delay averages cover departed
/// packets only; packets still queued after the last record are reported in
/// queued_at_horizon.
MetricsReport summarize(std::span<const SlotRecord> records, std::uint64_t warmup, double slot_us = kSlotUs);

}  // namespace qzmac
