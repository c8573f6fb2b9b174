#pragma once

// Per-node QZMAC state machine.
//
// Every function here is a pure state transition over values a node can
// observe locally: its own queue, its CCA readings and the identity of an
// overheard transmitter. The simulator keeps one replica of
// (ElapsedVector, RoleState) per node and drives each through these.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace qzmac {

class RandomStream;

struct NodeId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const NodeId&) const = default;
    constexpr std::size_t index() const { return value; }
};

constexpr NodeId node(std::uint32_t v) { return NodeId{v}; }

/// Slots elapsed since each node last transmitted. Entries stay pairwise
/// distinct for every reachable state, so the argmax is always unique.
class ElapsedVector {
public:
    ElapsedVector() = default;
    explicit ElapsedVector(std::vector<std::int64_t> entries);

    /// V_i = i, the preprogrammed starting point shared by all nodes.
    static ElapsedVector initial(std::size_t n);

    std::size_t size() const { return entries_.size(); }
    std::int64_t operator[](std::size_t i) const { return entries_[i]; }
    std::span<const std::int64_t> entries() const { return entries_; }

    bool pairwise_distinct() const;

    /// In-place form of update_elapsed. Preserves distinctness: the
    /// transmitter's new 0 is below every incremented entry.
    void advance(std::optional<NodeId> transmitter);

    bool operator==(const ElapsedVector&) const = default;

private:
    std::vector<std::int64_t> entries_;
};

struct RoleState {
    NodeId pu;
    NodeId su;

    bool operator==(const RoleState&) const = default;
};

struct ContentionDraw {
    std::uint32_t r = 1;

    auto operator<=>(const ContentionDraw&) const = default;
};

struct PuTransmit { NodeId node; bool operator==(const PuTransmit&) const = default; };
struct PolledTransmit { NodeId node; bool operator==(const PolledTransmit&) const = default; };
struct SuTransmit { NodeId node; bool operator==(const SuTransmit&) const = default; };
struct ContentionWin {
    NodeId node;
    ContentionDraw draw;
    bool operator==(const ContentionWin&) const = default;
};
struct ContentionCollision {
    std::vector<NodeId> nodes;  // sorted ascending
    bool operator==(const ContentionCollision&) const = default;
};
struct IdleSlot { bool operator==(const IdleSlot&) const = default; };

using SlotPhaseOutcome =
    std::variant<PuTransmit, PolledTransmit, SuTransmit, ContentionWin, ContentionCollision, IdleSlot>;

/// Node that occupied the channel alone, if any.
std::optional<NodeId> transmitter_of(const SlotPhaseOutcome& outcome);

std::string_view outcome_name(const SlotPhaseOutcome& outcome);

/// True for outcomes produced by one of the polling minislots.
bool is_polled(const SlotPhaseOutcome& outcome);

struct ProtocolState {
    ElapsedVector v;
    RoleState roles;

    bool operator==(const ProtocolState&) const = default;
};

/// Throws std::invalid_argument if n < 2, pu0 == su0 or a role id is out of range.
ProtocolState init_protocol_state(std::size_t n, NodeId pu0, NodeId su0);

/// Transmitter's entry drops to zero, everyone else ages by one slot.
/// With no transmitter (idle or collided slot) every entry ages.
ElapsedVector update_elapsed(const ElapsedVector& v, std::optional<NodeId> transmitter);

/// Index of the unique maximum entry.
NodeId select_polled(const ElapsedVector& v);

enum class MinislotAction { TransmitPacket, PerformCca, Listen };

/// What a node knows when deciding what to do in a polling minislot.
struct NodeView {
    NodeId self;
    bool queue_nonempty = false;
    const ElapsedVector* v = nullptr;
    RoleState roles;
};

/// Decision for polling minislot `phase` (1-based, at most `polling_minislots`).
///
/// `observed_busy` is true if any CCA reading in an earlier minislot of this
/// slot returned busy; such a node only listens for the remainder of the
/// scheduling region. Phase 1 belongs to the PU, phase 2 to argmax V and
/// phase 3 to the SU. Polling minislots past the third carry no grant.
MinislotAction node_minislot_action(const NodeView& view, std::uint32_t phase, bool observed_busy,
                                    std::uint32_t polling_minislots = 3);

/// One uniform draw on {1, ..., contention_minislots}; consumes exactly one
/// value from `rng`.
ContentionDraw draw_backoff(RandomStream& rng, std::uint32_t contention_minislots);

/// Minimum draw wins; a shared minimum is a collision among the tied nodes.
SlotPhaseOutcome contention_resolve(const std::map<NodeId, ContentionDraw>& draws);

/// V follows the actual transmitter (none for idle or collided slots);
/// a polled transmission hands over the PU role and a contention win
/// installs a new SU.
ProtocolState apply_slot_outcome(const ProtocolState& state, const SlotPhaseOutcome& outcome);
void apply_slot_outcome_in_place(ProtocolState& state, const SlotPhaseOutcome& outcome);

}  // namespace qzmac
