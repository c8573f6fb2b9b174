#include "qzmac/io.hpp"

#include <charconv>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qzmac::io {

using json = nlohmann::ordered_json;

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : "none"; }
std::string opt(const std::optional<std::int64_t>& x) { return x ? std::to_string(*x) : "none"; }

void require_schema(const json& j, std::string_view expected) {
    if (!j.contains("schema") || j.at("schema").get<std::string>() != expected)
        throw std::runtime_error("unsupported trace schema (expected " + std::string(expected) + ")");
}

json outcome_to_json(const SlotPhaseOutcome& o) {
    json j;
    j["kind"] = outcome_name(o);
    if (auto who = transmitter_of(o)) j["node"] = who->value;
    if (const auto* win = std::get_if<ContentionWin>(&o)) j["r"] = win->draw.r;
    if (const auto* coll = std::get_if<ContentionCollision>(&o)) {
        json nodes = json::array();
        for (auto id : coll->nodes) nodes.push_back(id.value);
        j["nodes"] = nodes;
    }
    return j;
}

SlotPhaseOutcome outcome_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    auto who = [&] { return NodeId{j.at("node").get<std::uint32_t>()}; };
    if (kind == "PuTransmit") return PuTransmit{who()};
    if (kind == "PolledTransmit") return PolledTransmit{who()};
    if (kind == "SuTransmit") return SuTransmit{who()};
    if (kind == "ContentionWin") return ContentionWin{who(), ContentionDraw{j.at("r").get<std::uint32_t>()}};
    if (kind == "ContentionCollision") {
        ContentionCollision c;
        for (const auto& id : j.at("nodes")) c.nodes.push_back(NodeId{id.get<std::uint32_t>()});
        return c;
    }
    if (kind == "IdleSlot") return IdleSlot{};
    throw std::runtime_error("unknown outcome kind: " + kind);
}

json delivery_to_json(const DeliveryResult& d) {
    json j;
    j["kind"] = delivery_name(d);
    if (const auto* ok = std::get_if<Delivered>(&d)) j["node"] = ok->node.value;
    if (const auto* lost = std::get_if<ChannelLoss>(&d)) j["node"] = lost->node.value;
    return j;
}

DeliveryResult delivery_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "Delivered") return Delivered{NodeId{j.at("node").get<std::uint32_t>()}};
    if (kind == "CollisionLoss") return CollisionLoss{};
    if (kind == "ChannelLoss") return ChannelLoss{NodeId{j.at("node").get<std::uint32_t>()}};
    if (kind == "NothingSent") return NothingSent{};
    throw std::runtime_error("unknown delivery kind: " + kind);
}

json config_json(const SimConfig& c) {
    json j;
    j["protocol"] = c.scheduler.name();
    j["n"] = c.n;
    j["rates"] = c.arrival.rates;
    std::vector<bool> sat(c.n, false);
    for (std::size_t i = 0; i < c.n; ++i) sat[i] = c.arrival.is_saturated(i);
    j["saturated"] = sat;
    if (!c.arrival.script.empty()) j["script"] = c.arrival.script;
    j["t_p"] = c.t_p;
    j["t_c"] = c.t_c;
    j["slot_us"] = c.slot_us;
    j["minislot_us"] = c.minislot_us;
    j["cca"] = {{"p_false_busy", c.cca.p_false_busy},
                {"p_false_idle", c.cca.p_false_idle},
                {"cca_duration_us", c.cca.cca_duration_us}};
    j["interference"] = {{"p_minislot_busy", c.interference.p_minislot_busy},
                         {"p_packet_loss", c.interference.p_packet_loss}};
    j["sync"] = {{"ts_tx_offset_us", c.sync.ts_tx_offset_us},
                 {"eb_period_slots", c.sync.eb_period_slots},
                 {"slot_us", c.sync.slot_us},
                 {"drift_min_ppm", c.sync.drift_min_ppm},
                 {"drift_max_ppm", c.sync.drift_max_ppm},
                 {"eb_loss_probability", c.sync.eb_loss_probability}};
    j["horizon_slots"] = c.horizon_slots;
    j["warmup_slots"] = c.warmup_slots;
    j["master_seed"] = c.master_seed;
    j["pu0"] = c.pu0.value;
    j["su0"] = c.su0.value;
    return j;
}

SimConfig config_from(const json& j) {
    SimConfig c;
    c.scheduler = SchedulerKind::parse(j.at("protocol").get<std::string>());
    c.n = j.at("n").get<std::size_t>();
    c.arrival.rates = j.at("rates").get<std::vector<double>>();
    c.arrival.saturated = j.at("saturated").get<std::vector<bool>>();
    if (j.contains("script")) c.arrival.script = j.at("script").get<std::vector<std::vector<std::uint8_t>>>();
    c.t_p = j.at("t_p").get<std::uint32_t>();
    c.t_c = j.at("t_c").get<std::uint32_t>();
    c.slot_us = j.at("slot_us").get<double>();
    c.minislot_us = j.at("minislot_us").get<double>();
    const auto& cca = j.at("cca");
    c.cca.p_false_busy = cca.at("p_false_busy").get<double>();
    c.cca.p_false_idle = cca.at("p_false_idle").get<double>();
    c.cca.cca_duration_us = cca.at("cca_duration_us").get<double>();
    const auto& intf = j.at("interference");
    c.interference.p_minislot_busy = intf.at("p_minislot_busy").get<double>();
    c.interference.p_packet_loss = intf.at("p_packet_loss").get<double>();
    const auto& sync = j.at("sync");
    c.sync.ts_tx_offset_us = sync.at("ts_tx_offset_us").get<double>();
    c.sync.eb_period_slots = sync.at("eb_period_slots").get<std::uint64_t>();
    c.sync.slot_us = sync.at("slot_us").get<double>();
    c.sync.drift_min_ppm = sync.at("drift_min_ppm").get<double>();
    c.sync.drift_max_ppm = sync.at("drift_max_ppm").get<double>();
    c.sync.eb_loss_probability = sync.at("eb_loss_probability").get<double>();
    c.horizon_slots = j.at("horizon_slots").get<std::uint64_t>();
    c.warmup_slots = j.at("warmup_slots").get<std::uint64_t>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.pu0 = NodeId{j.at("pu0").get<std::uint32_t>()};
    c.su0 = NodeId{j.at("su0").get<std::uint32_t>()};
    return c;
}

template <class T>
std::string join(const std::vector<T>& xs, std::string (*fmt)(T)) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt(xs[i]);
    }
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

std::string config_to_json(const SimConfig& config) { return config_json(config).dump(); }

SimConfig config_from_json(std::string_view text) { return config_from(json::parse(text)); }

std::string trace_header_line(const SimConfig& config) {
    json j;
    j["schema"] = kTraceSchema;
    j["type"] = "header";
    j["config"] = config_json(config);
    return j.dump();
}

std::string trace_line(const SlotRecord& rec) {
    json j;
    j["schema"] = kTraceSchema;
    j["type"] = "slot";
    j["asn"] = rec.asn;
    j["arrivals"] = rec.arrivals;
    j["outcome"] = outcome_to_json(rec.outcome);
    j["delivery"] = delivery_to_json(rec.delivery);
    j["departed_arrival_slot"] = rec.departed_arrival_slot ? json(*rec.departed_arrival_slot) : json(nullptr);
    j["delay"] = rec.delay() ? json(*rec.delay()) : json(nullptr);
    j["v"] = std::vector<std::int64_t>(rec.state.v.entries().begin(), rec.state.v.entries().end());
    j["pu"] = rec.state.roles.pu.value;
    j["su"] = rec.state.roles.su.value;
    j["queues"] = rec.queue_lengths;
    j["diverged"] = rec.diverged;
    j["misaligned"] = rec.misaligned_nodes;
    return j.dump();
}

SlotRecord parse_trace_line(std::string_view line) {
    const json j = json::parse(line);
    require_schema(j, kTraceSchema);
    if (j.at("type").get<std::string>() != "slot") throw std::runtime_error("not a slot line");
    SlotRecord rec;
    rec.asn = j.at("asn").get<std::uint64_t>();
    rec.arrivals = j.at("arrivals").get<std::vector<std::uint8_t>>();
    rec.outcome = outcome_from_json(j.at("outcome"));
    rec.delivery = delivery_from_json(j.at("delivery"));
    if (!j.at("departed_arrival_slot").is_null())
        rec.departed_arrival_slot = j.at("departed_arrival_slot").get<std::int64_t>();
    rec.state.v = ElapsedVector(j.at("v").get<std::vector<std::int64_t>>());
    rec.state.roles = RoleState{NodeId{j.at("pu").get<std::uint32_t>()}, NodeId{j.at("su").get<std::uint32_t>()}};
    rec.queue_lengths = j.at("queues").get<std::vector<std::size_t>>();
    rec.diverged = j.at("diverged").get<bool>();
    rec.misaligned_nodes = j.at("misaligned").get<std::uint32_t>();
    return rec;
}

SimConfig read_trace(std::istream& in, const std::function<void(const SlotRecord&)>& on_record) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace");
    const json header = json::parse(line);
    require_schema(header, kTraceSchema);
    if (header.at("type").get<std::string>() != "header") throw std::runtime_error("trace lacks a header line");
    SimConfig config = config_from(header.at("config"));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        on_record(parse_trace_line(line));
    }
    return config;
}

std::pair<SimConfig, MetricsReport> summarize_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace");
    const json header = json::parse(line);
    require_schema(header, kTraceSchema);
    if (header.at("type").get<std::string>() != "header") throw std::runtime_error("trace lacks a header line");
    SimConfig config = config_from(header.at("config"));
    MetricsAccumulator acc(config.n, config.warmup_slots, config.slot_us);
    while (std::getline(in, line))
        if (!line.empty()) acc.add(parse_trace_line(line));
    return {std::move(config), acc.finish()};
}

std::string format_summary(const SimConfig& c, const MetricsReport& r) {
    std::ostringstream os;
    auto kv = [&](std::string_view key, const std::string& value) { os << key << '=' << value << '\n'; };
    auto num = [](auto x) { return std::to_string(x); };
    auto dbl = [](double x) { return format_double(x); };

    kv("schema", std::string(kSummarySchema));
    kv("config.protocol", c.scheduler.name());
    kv("config.n", num(c.n));
    kv("config.total_load", dbl(c.arrival.total_load()));
    kv("config.rates", join<double>(c.arrival.rates, format_double));
    std::vector<int> sat(c.n);
    for (std::size_t i = 0; i < c.n; ++i) sat[i] = c.arrival.is_saturated(i) ? 1 : 0;
    kv("config.saturated", join<int>(sat, [](int x) { return std::to_string(x); }));
    kv("config.scripted", c.arrival.script.empty() ? "0" : "1");
    kv("config.t_p", num(c.t_p));
    kv("config.t_c", num(c.t_c));
    kv("config.slot_us", dbl(c.slot_us));
    kv("config.minislot_us", dbl(c.minislot_us));
    kv("config.cca_p_false_busy", dbl(c.cca.p_false_busy));
    kv("config.cca_p_false_idle", dbl(c.cca.p_false_idle));
    kv("config.interference_p_minislot_busy", dbl(c.interference.p_minislot_busy));
    kv("config.interference_p_packet_loss", dbl(c.interference.p_packet_loss));
    kv("config.ts_tx_offset_us", dbl(c.sync.ts_tx_offset_us));
    kv("config.eb_period_slots", num(c.sync.eb_period_slots));
    kv("config.drift_min_ppm", dbl(c.sync.drift_min_ppm));
    kv("config.drift_max_ppm", dbl(c.sync.drift_max_ppm));
    kv("config.eb_loss_probability", dbl(c.sync.eb_loss_probability));
    kv("config.horizon_slots", num(c.horizon_slots));
    kv("config.warmup_slots", num(c.warmup_slots));
    kv("config.seed", num(c.master_seed));
    kv("config.pu0", num(c.pu0.value));
    kv("config.su0", num(c.su0.value));

    kv("measured_slots", num(r.measured_slots));
    kv("arrivals", num(r.arrivals));
    kv("deliveries", num(r.deliveries));
    kv("queued_at_horizon", num(r.queued_at_horizon));
    kv("throughput", dbl(r.throughput));
    kv("mean_delay_slots", opt(r.mean_delay_slots));
    kv("mean_delay_ms", opt(r.mean_delay_ms()));
    kv("p50_delay_slots", opt(r.p50_delay_slots));
    kv("p95_delay_slots", opt(r.p95_delay_slots));
    kv("p99_delay_slots", opt(r.p99_delay_slots));
    kv("polled_share", opt(r.polled_share));
    kv("contention_share", opt(r.contention_share));
    kv("outcome.pu_transmit", num(r.outcomes.pu_transmit));
    kv("outcome.polled_transmit", num(r.outcomes.polled_transmit));
    kv("outcome.su_transmit", num(r.outcomes.su_transmit));
    kv("outcome.contention_win", num(r.outcomes.contention_win));
    kv("outcome.contention_collision", num(r.outcomes.contention_collision));
    kv("outcome.idle_slot", num(r.outcomes.idle_slot));
    kv("outcome.channel_loss", num(r.outcomes.channel_loss));
    kv("divergence_slots", num(r.divergence_slots));
    kv("misaligned_node_slots", num(r.misaligned_node_slots));
    for (std::size_t i = 0; i < r.node_deliveries.size(); ++i) {
        const std::string prefix = "node." + std::to_string(i) + ".";
        kv(prefix + "deliveries", num(r.node_deliveries[i]));
        kv(prefix + "throughput", dbl(r.node_throughput[i]));
        kv(prefix + "mean_delay_slots", opt(r.node_mean_delay_slots[i]));
    }
    return os.str();
}

std::map<std::string, std::string> parse_summary(std::istream& in) {
    std::map<std::string, std::string> fields;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed summary line: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (first) {
            if (key != "schema" || value != kSummarySchema)
                throw std::runtime_error("unsupported summary schema: " + value);
            first = false;
        }
        fields.emplace(std::move(key), std::move(value));
    }
    if (first) throw std::runtime_error("empty summary");
    return fields;
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
    std::ostringstream os;
    os << "# schema=" << kSweepSchema << '\n';
    os << "load\tseed\tprotocol\tmean_delay_slots\tthroughput\tpolled_share\tcontention_share\n";
    for (const auto& row : rows) {
        os << format_double(row.load) << '\t' << row.seed << '\t' << row.protocol << '\t'
           << opt(row.report.mean_delay_slots) << '\t' << format_double(row.report.throughput) << '\t'
           << opt(row.report.polled_share) << '\t' << opt(row.report.contention_share) << '\n';
    }
    return os.str();
}

}  // namespace qzmac::io
