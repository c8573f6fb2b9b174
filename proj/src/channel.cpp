#include "qzmac/channel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "qzmac/random.hpp"

namespace qzmac {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

MinislotTimeline::MinislotTimeline(std::uint32_t polling, std::uint32_t contention)
    : polling_(polling), contention_(contention), cells_(polling + contention + 1, IdleMinislot{}) {
    if (polling < 1 || contention < 1) throw std::invalid_argument("MinislotTimeline: need T_p >= 1 and T_c >= 1");
}

const MinislotOccupancy& MinislotTimeline::at(std::uint32_t minislot) const {
    if (minislot < 1 || minislot > cells_.size()) throw std::out_of_range("MinislotTimeline: bad minislot index");
    return cells_[minislot - 1];
}

void MinislotTimeline::add_transmitter(NodeId node, std::uint32_t start_minislot) {
    if (start_minislot < 1 || start_minislot > cells_.size())
        throw std::out_of_range("MinislotTimeline: bad start minislot");
    for (std::size_t i = start_minislot - 1; i < cells_.size(); ++i) {
        auto& cell = cells_[i];
        if (auto* one = std::get_if<Occupied>(&cell)) {
            std::vector<NodeId> both{one->node, node};
            std::sort(both.begin(), both.end());
            cell = Collided{std::move(both)};
        } else if (auto* many = std::get_if<Collided>(&cell)) {
            many->nodes.insert(std::upper_bound(many->nodes.begin(), many->nodes.end(), node), node);
        } else {
            cell = Occupied{node};
        }
    }
}

void MinislotTimeline::mark_external(std::uint32_t minislot) {
    auto& cell = cells_.at(minislot - 1);
    if (std::holds_alternative<IdleMinislot>(cell)) cell = ExternalBusy{};
}

std::uint32_t MinislotTimeline::first_busy() const {
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i)
        if (is_busy(cells_[i])) return static_cast<std::uint32_t>(i + 1);
    return 0;
}

void CcaModel::validate() const {
    check_probability(p_false_busy, "p_false_busy");
    check_probability(p_false_idle, "p_false_idle");
    if (!(cca_duration_us > 0)) throw std::invalid_argument("cca_duration_us must be positive");
}

void InterferenceModel::validate() const {
    check_probability(p_minislot_busy, "p_minislot_busy");
    check_probability(p_packet_loss, "p_packet_loss");
}

CcaReading sense(const MinislotOccupancy& truth, const CcaModel& cca, RandomStream& rng) {
    const double u = rng.uniform01();
    if (is_busy(truth)) return u < cca.p_false_idle ? CcaReading::Idle : CcaReading::Busy;
    return u < cca.p_false_busy ? CcaReading::Busy : CcaReading::Idle;
}

CcaReading sense_misaligned(RandomStream& rng) { return rng.uniform01() < 0.5 ? CcaReading::Busy : CcaReading::Idle; }

std::string_view delivery_name(const DeliveryResult& d) {
    static constexpr std::string_view names[] = {"Delivered", "CollisionLoss", "ChannelLoss", "NothingSent"};
    return names[d.index()];
}

DeliveryResult resolve_slot_transmissions(std::span<const NodeId> transmitters, const InterferenceModel& interference,
                                          RandomStream& rng, bool forced_loss) {
    const double u = rng.uniform01();
    if (transmitters.empty()) return NothingSent{};
    if (transmitters.size() > 1) return CollisionLoss{};
    if (forced_loss || u < interference.p_packet_loss) return ChannelLoss{transmitters.front()};
    return Delivered{transmitters.front()};
}

}  // namespace qzmac
