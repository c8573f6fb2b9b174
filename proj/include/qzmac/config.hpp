#pragma once

#include <cstdint>

#include "qzmac/baselines.hpp"
#include "qzmac/channel.hpp"
#include "qzmac/protocol.hpp"
#include "qzmac/sync.hpp"
#include "qzmac/traffic.hpp"

namespace qzmac {

inline constexpr std::uint32_t kPollingMinislots = 3;
inline constexpr std::uint32_t kContentionMinislots = 9;

/// Everything needed to reproduce one run.
struct SimConfig {
    std::size_t n = 4;
    SchedulerKind scheduler = SchedulerKind::qzmac();
    ArrivalSpec arrival = ArrivalSpec::symmetric(4, 0.0);
    std::uint32_t t_p = kPollingMinislots;
    std::uint32_t t_c = kContentionMinislots;
    double slot_us = kSlotUs;
    double minislot_us = kMinislotUs;
    CcaModel cca;
    InterferenceModel interference;
    SyncConfig sync;
    std::uint64_t horizon_slots = 10000;
    std::uint64_t warmup_slots = 0;
    std::uint64_t master_seed = 1;
    NodeId pu0{0};
    NodeId su0{1};

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

}  // namespace qzmac
