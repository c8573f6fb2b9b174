#pragma once

// Comparison disciplines sharing the simulator's slot loop.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qzmac/protocol.hpp"

namespace qzmac {

class RandomStream;

struct SchedulerKind {
    enum class Type { Qzmac, Tdma, PCsma, Oracle };

    Type type = Type::Qzmac;
    double p = 1.0;  // persistence, PCsma only

    static SchedulerKind qzmac() { return {Type::Qzmac, 1.0}; }
    static SchedulerKind tdma() { return {Type::Tdma, 1.0}; }
    static SchedulerKind pcsma(double p) { return {Type::PCsma, p}; }
    static SchedulerKind oracle() { return {Type::Oracle, 1.0}; }

    /// "qzmac", "tdma", "oracle", "pcsma" (p = 0.5) or "pcsma:<p>".
    static SchedulerKind parse(std::string_view text);
    std::string name() const;

    void validate() const;

    bool operator==(const SchedulerKind&) const = default;
};

/// 1-limited cyclic service: slot t belongs to node t mod n.
NodeId tdma_slot_owner(std::uint64_t t, std::size_t n);

/// Centralized full-information choice: the nonempty node that has waited
/// longest, or nothing when every queue is empty.
std::optional<NodeId> oracle_select(const std::vector<bool>& nonempty, const ElapsedVector& v);

/// Slotted p-persistent CSMA. Every node consumes exactly one value from its
/// stream per slot; nonempty nodes transmit when it falls below p. A lone
/// transmitter is reported as ContentionWin with draw 1.
SlotPhaseOutcome pcsma_slot(double p, const std::vector<bool>& nonempty, std::span<RandomStream> node_streams);

}  // namespace qzmac
