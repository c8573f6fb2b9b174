#include "qzmac/baselines.hpp"

#include <sstream>
#include <stdexcept>

#include "qzmac/random.hpp"

namespace qzmac {

SchedulerKind SchedulerKind::parse(std::string_view text) {
    if (text == "qzmac") return qzmac();
    if (text == "tdma") return tdma();
    if (text == "oracle") return oracle();
    if (text == "pcsma") return pcsma(0.5);
    if (text.starts_with("pcsma:")) {
        const std::string rest(text.substr(6));
        std::size_t used = 0;
        double p = 0;
        try {
            p = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rest.size() || rest.empty()) throw std::invalid_argument("bad pcsma persistence: " + rest);
        auto kind = pcsma(p);
        kind.validate();
        return kind;
    }
    throw std::invalid_argument("unknown protocol: " + std::string(text));
}

std::string SchedulerKind::name() const {
    switch (type) {
        case Type::Qzmac: return "qzmac";
        case Type::Tdma: return "tdma";
        case Type::Oracle: return "oracle";
        case Type::PCsma: {
            std::ostringstream os;
            os << "pcsma:" << p;
            return os.str();
        }
    }
    return "unknown";
}

void SchedulerKind::validate() const {
    if (type == Type::PCsma && !(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("pcsma persistence must lie in (0, 1]");
}

NodeId tdma_slot_owner(std::uint64_t t, std::size_t n) {
    if (n < 1) throw std::invalid_argument("tdma_slot_owner: need at least one node");
    return NodeId{static_cast<std::uint32_t>(t % n)};
}

std::optional<NodeId> oracle_select(const std::vector<bool>& nonempty, const ElapsedVector& v) {
    if (nonempty.size() != v.size()) throw std::invalid_argument("oracle_select: size mismatch");
    std::optional<NodeId> best;
    for (std::size_t i = 0; i < nonempty.size(); ++i)
        if (nonempty[i] && (!best || v[i] > v[best->index()])) best = NodeId{static_cast<std::uint32_t>(i)};
    return best;
}

SlotPhaseOutcome pcsma_slot(double p, const std::vector<bool>& nonempty, std::span<RandomStream> node_streams) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("pcsma_slot: p must lie in (0, 1]");
    if (nonempty.size() != node_streams.size()) throw std::invalid_argument("pcsma_slot: size mismatch");
    std::vector<NodeId> senders;
    for (std::size_t i = 0; i < nonempty.size(); ++i) {
        const double u = node_streams[i].uniform01();
        if (nonempty[i] && u < p) senders.push_back(NodeId{static_cast<std::uint32_t>(i)});
    }
    if (senders.empty()) return IdleSlot{};
    if (senders.size() == 1) return ContentionWin{senders.front(), ContentionDraw{1}};
    return ContentionCollision{std::move(senders)};
}

}  // namespace qzmac
