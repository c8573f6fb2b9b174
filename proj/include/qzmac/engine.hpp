#pragma once

// The slot loop. Per slot, in order:
//   1. queues hold everything that arrived up to the previous slot
//   2. clocks drift; beacons realign them when due
//   3. QZMAC walks its polling then contention minislots, each node acting
//      on its own replica and CCA readings; baselines apply their one-shot rule
//   4. the transmission region is resolved into a delivery result
//   5. every replica applies the outcome it inferred
//   6. arrivals during this slot are generated and a SlotRecord is emitted

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "qzmac/channel.hpp"
#include "qzmac/config.hpp"
#include "qzmac/metrics.hpp"
#include "qzmac/protocol.hpp"
#include "qzmac/random.hpp"
#include "qzmac/sync.hpp"

namespace qzmac {

struct RunResult {
    std::vector<SlotRecord> records;
    MetricsReport report;
};

class Simulator {
public:
    explicit Simulator(SimConfig config);

    const SimConfig& config() const { return config_; }
    bool done() const { return asn_ >= config_.horizon_slots; }
    std::uint64_t asn() const { return asn_; }

    /// Runs the next slot and returns its record.
    const SlotRecord& step();

    /// State as seen by an error-free observer of the true outcomes.
    const ProtocolState& reference_state() const { return reference_; }
    /// Per-node replicas; for baselines these mirror the reference.
    const std::vector<ProtocolState>& replicas() const { return replicas_; }
    const std::vector<std::deque<std::int64_t>>& queues() const { return queues_; }
    const std::vector<ClockState>& clocks() const { return clocks_; }
    /// Ground truth of the most recent QZMAC slot.
    const MinislotTimeline& last_timeline() const { return timeline_; }
    /// Queue lengths before slot 0 (saturated nodes start with one packet).
    const std::vector<std::size_t>& initial_queue_lengths() const { return initial_queue_lengths_; }
    double max_abs_offset_us() const { return max_abs_offset_us_; }

private:
    void advance_clocks();
    void run_qzmac_slot(SlotRecord& rec);
    void run_baseline_slot(SlotRecord& rec);
    void finish_slot(SlotRecord& rec, const std::vector<NodeId>& transmitters, bool forced_loss);

    SimConfig config_;
    std::uint64_t asn_ = 0;

    ProtocolState reference_;
    std::vector<ProtocolState> replicas_;
    std::vector<std::deque<std::int64_t>> queues_;
    std::vector<std::size_t> initial_queue_lengths_;
    std::vector<ClockState> clocks_;
    std::vector<bool> aligned_;
    double max_abs_offset_us_ = 0.0;

    std::vector<RandomStream> arrival_rng_;
    std::vector<RandomStream> contention_rng_;
    std::vector<RandomStream> cca_rng_;
    std::vector<RandomStream> pcsma_rng_;
    std::vector<RandomStream> eb_rng_;
    RandomStream interference_rng_;
    RandomStream delivery_rng_;

    MinislotTimeline timeline_;
    SlotRecord record_;
};

using SlotSink = std::function<void(const SlotRecord&)>;

/// Validates, runs to the horizon and summarizes. Records are streamed to
/// `sink` as they are produced and not retained.
MetricsReport run(const SimConfig& config, const SlotSink& sink);

/// Same, keeping every record.
RunResult run(const SimConfig& config);

}  // namespace qzmac
