#pragma once

// Beacon-based slot alignment. The border router broadcasts Enhanced Beacons
// carrying the Absolute Slot Number; a node resets its boundary offset on
// every beacon it receives and drifts freely in between.

#include <cstdint>

namespace qzmac {

inline constexpr double kTsTxOffsetUs = 1800.0;
inline constexpr double kSlotUs = 10000.0;

struct SyncConfig {
    double ts_tx_offset_us = kTsTxOffsetUs;
    std::uint64_t eb_period_slots = 400;
    double slot_us = kSlotUs;
    double drift_min_ppm = 0.0;
    double drift_max_ppm = 0.0;
    double eb_loss_probability = 0.0;

    void validate() const;

    /// Worst offset a node can reach between two received beacons.
    double max_offset_bound_us() const;
};

struct ClockState {
    double offset_us = 0.0;
    double drift_ppm = 0.0;
    std::int64_t last_eb_asn = 0;
};

ClockState advance_clock(const ClockState& c, std::uint64_t slots, double slot_us = kSlotUs);

/// Throws std::invalid_argument if `asn` is older than the last beacon.
ClockState receive_eb(const ClockState& c, std::int64_t asn);

/// Strict: an offset equal to the guard is already misaligned.
bool is_aligned(const ClockState& c, const SyncConfig& cfg);

}  // namespace qzmac
