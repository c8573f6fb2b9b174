#include "qzmac/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qzmac/baselines.hpp"
#include "qzmac/traffic.hpp"

namespace qzmac {

namespace {

std::vector<RandomStream> per_node_streams(StreamFactory& factory, std::string_view purpose, std::size_t n) {
    std::vector<RandomStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams.push_back(factory.derive(std::string(purpose) + "/" + std::to_string(i)));
    return streams;
}

// What the slot looks like from the minislot a transmission started in.
SlotPhaseOutcome classify_start(NodeId transmitter, std::uint32_t start_minislot, std::uint32_t t_p) {
    if (start_minislot == 1) return PuTransmit{transmitter};
    if (start_minislot == 2 && t_p >= 2) return PolledTransmit{transmitter};
    if (start_minislot == 3 && t_p >= 3) return SuTransmit{transmitter};
    return ContentionWin{transmitter, ContentionDraw{start_minislot - t_p}};
}

}  // namespace

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("node count must be positive");
    scheduler.validate();
    if (scheduler.type == SchedulerKind::Type::Qzmac && n < 2)
        throw std::invalid_argument("QZMAC needs at least 2 nodes");
    if (arrival.nodes() != n)
        throw std::invalid_argument("arrival spec has " + std::to_string(arrival.nodes()) + " nodes, expected " +
                                    std::to_string(n));
    arrival.validate();
    if (t_p < 1) throw std::invalid_argument("t_p must be at least 1");
    if (t_c < 1) throw std::invalid_argument("t_c must be at least 1");
    if (!(slot_us > 0) || !(minislot_us > 0)) throw std::invalid_argument("slot and minislot durations must be positive");
    cca.validate();
    interference.validate();
    sync.validate();
    if (horizon_slots == 0) throw std::invalid_argument("horizon must be positive");
    if (warmup_slots >= horizon_slots) throw std::invalid_argument("warmup must be shorter than the horizon");
    if (scheduler.type == SchedulerKind::Type::Qzmac) init_protocol_state(n, pu0, su0);
}

Simulator::Simulator(SimConfig config) : config_(std::move(config)), timeline_(1, 1) {
    config_.validate();
    const std::size_t n = config_.n;

    if (config_.scheduler.type == SchedulerKind::Type::Qzmac) {
        reference_ = init_protocol_state(n, config_.pu0, config_.su0);
    } else {
        // Baselines only use V (the oracle's longest-waiting rule).
        reference_ = ProtocolState{ElapsedVector::initial(n), RoleState{NodeId{0}, NodeId{n > 1 ? 1u : 0u}}};
    }
    replicas_.assign(n, reference_);

    StreamFactory factory(config_.master_seed);
    arrival_rng_ = per_node_streams(factory, "arrivals", n);
    contention_rng_ = per_node_streams(factory, "contention", n);
    cca_rng_ = per_node_streams(factory, "cca", n);
    pcsma_rng_ = per_node_streams(factory, "pcsma", n);
    eb_rng_ = per_node_streams(factory, "eb", n);
    interference_rng_ = factory.derive("interference");
    delivery_rng_ = factory.derive("delivery");

    auto drift_rng = per_node_streams(factory, "drift", n);
    clocks_.resize(n);
    aligned_.assign(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = drift_rng[i].uniform01();
        clocks_[i].drift_ppm = config_.sync.drift_min_ppm + u * (config_.sync.drift_max_ppm - config_.sync.drift_min_ppm);
    }

    queues_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (config_.arrival.is_saturated(i)) queues_[i].push_back(-1);
    initial_queue_lengths_.resize(n);
    for (std::size_t i = 0; i < n; ++i) initial_queue_lengths_[i] = queues_[i].size();

    timeline_ = MinislotTimeline(config_.t_p, config_.t_c);
}

void Simulator::advance_clocks() {
    const auto& sync = config_.sync;
    const bool beacon = asn_ > 0 && asn_ % sync.eb_period_slots == 0;
    for (std::size_t i = 0; i < clocks_.size(); ++i) {
        if (asn_ > 0) clocks_[i] = advance_clock(clocks_[i], 1, sync.slot_us);
        if (beacon) {
            const bool lost = eb_rng_[i].bernoulli(sync.eb_loss_probability);
            if (!lost) clocks_[i] = receive_eb(clocks_[i], static_cast<std::int64_t>(asn_));
        }
        aligned_[i] = is_aligned(clocks_[i], sync);
        max_abs_offset_us_ = std::max(max_abs_offset_us_, std::abs(clocks_[i].offset_us));
    }
}

const SlotRecord& Simulator::step() {
    if (done()) throw std::logic_error("Simulator::step past the horizon");
    SlotRecord& rec = record_;
    rec.asn = asn_;
    rec.departed_arrival_slot.reset();
    rec.diverged = false;

    advance_clocks();
    rec.misaligned_nodes = static_cast<std::uint32_t>(std::count(aligned_.begin(), aligned_.end(), false));

    if (config_.scheduler.type == SchedulerKind::Type::Qzmac)
        run_qzmac_slot(rec);
    else
        run_baseline_slot(rec);
    rec.diverged = std::any_of(replicas_.begin(), replicas_.end(), [&](const auto& r) { return !(r == reference_); });

    std::vector<std::size_t> lengths(queues_.size());
    for (std::size_t i = 0; i < queues_.size(); ++i) lengths[i] = queues_[i].size();
    rec.arrivals = generate_arrivals(config_.arrival, asn_, arrival_rng_, lengths);
    for (std::size_t i = 0; i < queues_.size(); ++i)
        if (rec.arrivals[i]) queues_[i].push_back(static_cast<std::int64_t>(asn_));
    rec.queue_lengths.resize(queues_.size());
    for (std::size_t i = 0; i < queues_.size(); ++i) rec.queue_lengths[i] = queues_[i].size();
    rec.state = reference_;

    ++asn_;
    return rec;
}

void Simulator::run_qzmac_slot(SlotRecord& rec) {
    const std::size_t n = config_.n;
    const std::uint32_t t_p = config_.t_p;
    const std::uint32_t t_c = config_.t_c;
    const std::uint32_t scheduling = t_p + t_c;

    timeline_ = MinislotTimeline(t_p, t_c);
    std::vector<bool> external(scheduling + 2, false);
    for (std::uint32_t m = 1; m <= scheduling + 1; ++m) {
        external[m] = interference_rng_.bernoulli(config_.interference.p_minislot_busy);
        if (external[m]) timeline_.mark_external(m);
    }

    std::vector<bool> nonempty(n);
    for (std::size_t i = 0; i < n; ++i) nonempty[i] = !queues_[i].empty();

    std::vector<std::uint32_t> start(n, 0);       // minislot a node began transmitting in
    std::vector<std::uint32_t> first_busy(n, 0);  // first minislot the node sensed busy
    std::vector<std::uint32_t> draw(n, 0);
    std::vector<NodeId> transmitters;

    for (std::uint32_t m = 1; m <= scheduling; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            if (start[i] != 0) continue;
            const NodeId self{static_cast<std::uint32_t>(i)};
            const bool busy_seen = first_busy[i] != 0;
            if (m <= t_p) {
                const NodeView view{self, nonempty[i], &replicas_[i].v, replicas_[i].roles};
                if (node_minislot_action(view, m, busy_seen, t_p) == MinislotAction::TransmitPacket) start[i] = m;
            } else {
                const std::uint32_t c = m - t_p;
                if (c == 1 && !busy_seen && nonempty[i]) draw[i] = draw_backoff(contention_rng_[i], t_c).r;
                if (!busy_seen && draw[i] == c) start[i] = m;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (start[i] != m) continue;
            const NodeId self{static_cast<std::uint32_t>(i)};
            timeline_.add_transmitter(self, m);
            transmitters.push_back(self);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (start[i] != 0 || first_busy[i] != 0) continue;
            const CcaReading reading =
                aligned_[i] ? sense(timeline_.at(m), config_.cca, cca_rng_[i]) : sense_misaligned(cca_rng_[i]);
            if (reading == CcaReading::Busy) first_busy[i] = m;
        }
    }

    if (transmitters.empty())
        rec.outcome = IdleSlot{};
    else if (transmitters.size() == 1)
        rec.outcome = classify_start(transmitters.front(), start[transmitters.front().index()], t_p);
    else {
        std::vector<NodeId> colliders = transmitters;
        std::sort(colliders.begin(), colliders.end());
        rec.outcome = ContentionCollision{std::move(colliders)};
    }

    // Each replica moves on what its node could infer: its own transmission,
    // or the overheard transmitter id placed by the minislot it first sensed
    // busy. Collided or empty slots carry no decodable id.
    for (std::size_t i = 0; i < n; ++i) {
        SlotPhaseOutcome local = IdleSlot{};
        if (transmitters.size() == 1) {
            const NodeId who = transmitters.front();
            const std::uint32_t seen_at = start[i] != 0 ? start[i] : first_busy[i];
            local = seen_at != 0 ? classify_start(who, seen_at, t_p) : classify_start(who, scheduling, t_p);
        } else if (transmitters.size() > 1) {
            local = ContentionCollision{};
        }
        apply_slot_outcome_in_place(replicas_[i], local);
    }

    bool forced_loss = external[scheduling + 1];
    if (transmitters.size() == 1 && !aligned_[transmitters.front().index()]) forced_loss = true;
    finish_slot(rec, transmitters, forced_loss);
}

void Simulator::run_baseline_slot(SlotRecord& rec) {
    const std::size_t n = config_.n;
    std::vector<bool> nonempty(n);
    for (std::size_t i = 0; i < n; ++i) nonempty[i] = !queues_[i].empty();

    switch (config_.scheduler.type) {
        case SchedulerKind::Type::Tdma: {
            const NodeId owner = tdma_slot_owner(asn_, n);
            rec.outcome = nonempty[owner.index()] ? SlotPhaseOutcome{PolledTransmit{owner}} : SlotPhaseOutcome{IdleSlot{}};
            break;
        }
        case SchedulerKind::Type::Oracle: {
            const auto chosen = oracle_select(nonempty, reference_.v);
            rec.outcome = chosen ? SlotPhaseOutcome{PolledTransmit{*chosen}} : SlotPhaseOutcome{IdleSlot{}};
            break;
        }
        case SchedulerKind::Type::PCsma:
            rec.outcome = pcsma_slot(config_.scheduler.p, nonempty, pcsma_rng_);
            break;
        case SchedulerKind::Type::Qzmac:
            throw std::logic_error("run_baseline_slot called for QZMAC");
    }

    std::vector<NodeId> transmitters;
    if (auto who = transmitter_of(rec.outcome))
        transmitters.push_back(*who);
    else if (const auto* coll = std::get_if<ContentionCollision>(&rec.outcome))
        transmitters = coll->nodes;

    bool forced_loss = interference_rng_.bernoulli(config_.interference.p_minislot_busy);
    if (transmitters.size() == 1 && !aligned_[transmitters.front().index()]) forced_loss = true;
    finish_slot(rec, transmitters, forced_loss);
    for (auto& r : replicas_) r = reference_;
}

void Simulator::finish_slot(SlotRecord& rec, const std::vector<NodeId>& transmitters, bool forced_loss) {
    rec.delivery = resolve_slot_transmissions(transmitters, config_.interference, delivery_rng_, forced_loss);
    if (const auto* d = std::get_if<Delivered>(&rec.delivery)) {
        auto& q = queues_[d->node.index()];
        rec.departed_arrival_slot = q.front();
        q.pop_front();
    }
    apply_slot_outcome_in_place(reference_, rec.outcome);
}

MetricsReport run(const SimConfig& config, const SlotSink& sink) {
    Simulator sim(config);
    MetricsAccumulator acc(config.n, config.warmup_slots, config.slot_us);
    while (!sim.done()) {
        const SlotRecord& rec = sim.step();
        acc.add(rec);
        if (sink) sink(rec);
    }
    return acc.finish();
}

RunResult run(const SimConfig& config) {
    RunResult result;
    result.records.reserve(config.horizon_slots);
    result.report = run(config, [&](const SlotRecord& rec) { result.records.push_back(rec); });
    return result;
}

}  // namespace qzmac
