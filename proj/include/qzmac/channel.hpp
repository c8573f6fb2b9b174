#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qzmac/protocol.hpp"

namespace qzmac {

class RandomStream;

inline constexpr double kCcaDurationUs = 128.0;
inline constexpr double kMinislotUs = 2 * kCcaDurationUs;

struct IdleMinislot { bool operator==(const IdleMinislot&) const = default; };
struct Occupied { NodeId node; bool operator==(const Occupied&) const = default; };
struct Collided { std::vector<NodeId> nodes; bool operator==(const Collided&) const = default; };
struct ExternalBusy { bool operator==(const ExternalBusy&) const = default; };

using MinislotOccupancy = std::variant<IdleMinislot, Occupied, Collided, ExternalBusy>;

inline bool is_busy(const MinislotOccupancy& m) { return !std::holds_alternative<IdleMinislot>(m); }

/// Ground-truth occupancy of one slot: `polling` minislots, then
/// `contention` minislots, then the transmission region.
class MinislotTimeline {
public:
    MinislotTimeline(std::uint32_t polling, std::uint32_t contention);

    std::uint32_t polling_minislots() const { return polling_; }
    std::uint32_t contention_minislots() const { return contention_; }
    std::uint32_t scheduling_minislots() const { return polling_ + contention_; }

    /// Minislots 1..scheduling_minislots(); index scheduling_minislots()+1 is
    /// the transmission region.
    const MinislotOccupancy& at(std::uint32_t minislot) const;
    const MinislotOccupancy& transmission_region() const { return cells_.back(); }

    /// In-network transmitters continue from their start minislot through
    /// the transmission region. External interference only occupies the
    /// cells it was drawn for and is masked by in-network transmissions.
    void add_transmitter(NodeId node, std::uint32_t start_minislot);
    void mark_external(std::uint32_t minislot);

    /// First minislot whose occupancy is not idle, 0 if none.
    std::uint32_t first_busy() const;

    std::span<const MinislotOccupancy> cells() const { return cells_; }

private:
    std::uint32_t polling_;
    std::uint32_t contention_;
    std::vector<MinislotOccupancy> cells_;
};

struct CcaModel {
    double p_false_busy = 0.0;
    double p_false_idle = 0.0;
    double cca_duration_us = kCcaDurationUs;

    void validate() const;
};

struct InterferenceModel {
    double p_minislot_busy = 0.0;
    double p_packet_loss = 0.0;

    void validate() const;
};

enum class CcaReading { Idle, Busy };

/// Consumes exactly one value from `rng`, whatever the error rates.
CcaReading sense(const MinislotOccupancy& truth, const CcaModel& cca, RandomStream& rng);

/// Reading of a node whose slot boundary is outside the guard offset: a fair
/// coin, again one value consumed.
CcaReading sense_misaligned(RandomStream& rng);

struct Delivered { NodeId node; bool operator==(const Delivered&) const = default; };
struct CollisionLoss { bool operator==(const CollisionLoss&) const = default; };
struct ChannelLoss { NodeId node; bool operator==(const ChannelLoss&) const = default; };
struct NothingSent { bool operator==(const NothingSent&) const = default; };

using DeliveryResult = std::variant<Delivered, CollisionLoss, ChannelLoss, NothingSent>;

std::string_view delivery_name(const DeliveryResult& d);

/// Consumes exactly one value from `rng` per call. `forced_loss` marks a lone
/// transmission that is lost regardless of the loss draw (misaligned
/// transmitter or external interference over the transmission region).
DeliveryResult resolve_slot_transmissions(std::span<const NodeId> transmitters, const InterferenceModel& interference,
                                          RandomStream& rng, bool forced_loss = false);

}  // namespace qzmac
