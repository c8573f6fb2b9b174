#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qzmac/channel.hpp"
#include "qzmac/protocol.hpp"

namespace qzmac {

/// One trace entry per slot.
struct SlotRecord {
    std::uint64_t asn = 0;
    std::vector<std::uint8_t> arrivals;          // arrived during this slot, eligible from asn + 1
    SlotPhaseOutcome outcome = IdleSlot{};       // true outcome
    DeliveryResult delivery = NothingSent{};
    std::optional<std::int64_t> departed_arrival_slot;
    ProtocolState state;                         // post-slot V, PU, SU of the reference observer
    std::vector<std::size_t> queue_lengths;      // at the next slot boundary
    bool diverged = false;                       // some node replica differs from the reference
    std::uint32_t misaligned_nodes = 0;

    std::optional<std::int64_t> delay() const {
        if (!departed_arrival_slot) return std::nullopt;
        return static_cast<std::int64_t>(asn) - *departed_arrival_slot;
    }

    bool operator==(const SlotRecord&) const = default;
};

}  // namespace qzmac
