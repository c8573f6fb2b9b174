#include "qzmac/protocol.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

#include "qzmac/random.hpp"

namespace qzmac {

ElapsedVector::ElapsedVector(std::vector<std::int64_t> entries) : entries_(std::move(entries)) {
    for (auto e : entries_)
        if (e < 0) throw std::invalid_argument("ElapsedVector: negative entry");
    if (!pairwise_distinct()) throw std::invalid_argument("ElapsedVector: entries must be pairwise distinct");
}

ElapsedVector ElapsedVector::initial(std::size_t n) {
    std::vector<std::int64_t> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = static_cast<std::int64_t>(i);
    return ElapsedVector(std::move(e));
}

bool ElapsedVector::pairwise_distinct() const {
    std::vector<std::int64_t> sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::optional<NodeId> transmitter_of(const SlotPhaseOutcome& outcome) {
    return std::visit(
        [](const auto& o) -> std::optional<NodeId> {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ContentionCollision> || std::is_same_v<T, IdleSlot>)
                return std::nullopt;
            else
                return o.node;
        },
        outcome);
}

std::string_view outcome_name(const SlotPhaseOutcome& outcome) {
    static constexpr std::string_view names[] = {"PuTransmit",    "PolledTransmit",      "SuTransmit",
                                                 "ContentionWin", "ContentionCollision", "IdleSlot"};
    return names[outcome.index()];
}

bool is_polled(const SlotPhaseOutcome& outcome) {
    return std::holds_alternative<PuTransmit>(outcome) || std::holds_alternative<PolledTransmit>(outcome) ||
           std::holds_alternative<SuTransmit>(outcome);
}

ProtocolState init_protocol_state(std::size_t n, NodeId pu0, NodeId su0) {
    if (n < 2) throw std::invalid_argument("init_protocol_state: need at least 2 nodes, got " + std::to_string(n));
    if (pu0.index() >= n || su0.index() >= n) throw std::invalid_argument("init_protocol_state: role id out of range");
    if (pu0 == su0) throw std::invalid_argument("init_protocol_state: initial PU and SU must differ");
    return ProtocolState{ElapsedVector::initial(n), RoleState{pu0, su0}};
}

void ElapsedVector::advance(std::optional<NodeId> transmitter) {
    if (transmitter && transmitter->index() >= entries_.size())
        throw std::invalid_argument("update_elapsed: transmitter out of range");
    for (auto& e : entries_) ++e;
    if (transmitter) entries_[transmitter->index()] = 0;
}

ElapsedVector update_elapsed(const ElapsedVector& v, std::optional<NodeId> transmitter) {
    ElapsedVector next = v;
    next.advance(transmitter);
    return next;
}

NodeId select_polled(const ElapsedVector& v) {
    assert(v.size() > 0);
    auto e = v.entries();
    auto it = std::max_element(e.begin(), e.end());
    assert(std::count(e.begin(), e.end(), *it) == 1);
    return NodeId{static_cast<std::uint32_t>(it - e.begin())};
}

MinislotAction node_minislot_action(const NodeView& view, std::uint32_t phase, bool observed_busy,
                                    std::uint32_t polling_minislots) {
    if (phase < 1 || phase > polling_minislots)
        throw std::out_of_range("node_minislot_action: phase " + std::to_string(phase) + " outside polling minislots");
    if (observed_busy) return MinislotAction::Listen;
    if (!view.queue_nonempty) return MinislotAction::PerformCca;

    bool granted = false;
    switch (phase) {
        case 1: granted = view.self == view.roles.pu; break;
        case 2: granted = view.v != nullptr && view.self == select_polled(*view.v); break;
        case 3: granted = view.self == view.roles.su; break;
        default: break;
    }
    return granted ? MinislotAction::TransmitPacket : MinislotAction::PerformCca;
}

ContentionDraw draw_backoff(RandomStream& rng, std::uint32_t contention_minislots) {
    if (contention_minislots < 1) throw std::invalid_argument("draw_backoff: need at least one contention minislot");
    return ContentionDraw{static_cast<std::uint32_t>(rng.uniform_int(1, contention_minislots))};
}

SlotPhaseOutcome contention_resolve(const std::map<NodeId, ContentionDraw>& draws) {
    if (draws.empty()) return IdleSlot{};
    auto best = std::min_element(draws.begin(), draws.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; })
                    ->second;
    std::vector<NodeId> tied;
    for (const auto& [id, d] : draws)
        if (d == best) tied.push_back(id);
    if (tied.size() == 1) return ContentionWin{tied.front(), best};
    return ContentionCollision{std::move(tied)};
}

void apply_slot_outcome_in_place(ProtocolState& state, const SlotPhaseOutcome& outcome) {
    state.v.advance(transmitter_of(outcome));
    if (const auto* polled = std::get_if<PolledTransmit>(&outcome)) state.roles.pu = polled->node;
    if (const auto* win = std::get_if<ContentionWin>(&outcome)) state.roles.su = win->node;
}

ProtocolState apply_slot_outcome(const ProtocolState& state, const SlotPhaseOutcome& outcome) {
    ProtocolState next = state;
    apply_slot_outcome_in_place(next, outcome);
    return next;
}

}  // namespace qzmac
