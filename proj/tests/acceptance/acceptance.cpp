// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qzmac/cli.hpp"
#include "qzmac/engine.hpp"
#include "reference/reference_interpreter.hpp"

using namespace qzmac;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr std::uint64_t kLongHorizon = 1'000'000;
constexpr double kTdmaFactor = 2.0;               // criterion 4: qzmac < tdma / 2 at load 0.9
constexpr double kPolledShareAtHeavyLoad = 0.9;   // criterion 5
constexpr double kMaxCcaDegradation = 0.10;       // criterion 9
constexpr double kSyncBoundUs = 160.0;            // criterion 7: 40 ppm * 400 slots * 10 ms
constexpr double kOffsetTolUs = 1e-6;

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

SimConfig symmetric(std::size_t n, double load, std::uint64_t horizon, std::uint64_t seed,
                    SchedulerKind kind = SchedulerKind::qzmac()) {
    SimConfig c;
    c.n = n;
    c.scheduler = kind;
    c.arrival = ArrivalSpec::symmetric(n, load);
    c.horizon_slots = horizon;
    c.master_seed = seed;
    return c;
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

// Slot where the first busy minislot must sit for the recorded outcome.
bool phase_order_sound(const SlotPhaseOutcome& o, const MinislotTimeline& tl, std::uint32_t t_p) {
    const auto first = tl.first_busy();
    return std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PuTransmit>) return first == 1;
            else if constexpr (std::is_same_v<T, PolledTransmit>) return first == 2;
            else if constexpr (std::is_same_v<T, SuTransmit>) return first == 3;
            else if constexpr (std::is_same_v<T, ContentionWin>) return first == t_p + x.draw.r;
            else if constexpr (std::is_same_v<T, ContentionCollision>) return first > t_p && x.nodes.size() >= 2;
            else return first == 0;
        },
        o);
}

// Criteria 1 and 3 share one pass over the runs.
std::pair<Verdict, Verdict> invariants_and_pu_conservation() {
    Verdict inv;
    Verdict pu;
    std::uint64_t pu_violations = 0;
    std::uint64_t checked = 0;
    std::ostringstream timing;
    for (std::size_t n : {2u, 4u, 8u}) {
        for (double load : {0.1, 0.5, 0.9}) {
            const auto start = std::chrono::steady_clock::now();
            Simulator sim(symmetric(n, load, kLongHorizon, 1000 + n));
            std::vector<std::size_t> queued = sim.initial_queue_lengths();
            std::uint64_t total = std::accumulate(queued.begin(), queued.end(), std::uint64_t{0});
            ProtocolState before = sim.reference_state();
            while (!sim.done()) {
                const auto& r = sim.step();
                ++checked;
                const std::string where = "N=" + std::to_string(n) + " load=" + fmt(load, 1) + " slot " +
                                          std::to_string(r.asn);

                if (!r.state.v.pairwise_distinct()) inv.fail(where + ": V entries not distinct");
                for (const auto& rep : sim.replicas())
                    if (!(rep == sim.reference_state())) inv.fail(where + ": replica differs from reference");
                if (r.diverged) inv.fail(where + ": divergence flag set");

                std::uint64_t arrived = 0;
                for (auto a : r.arrivals) arrived += a;
                const bool delivered = std::holds_alternative<Delivered>(r.delivery);
                const std::uint64_t now =
                    std::accumulate(r.queue_lengths.begin(), r.queue_lengths.end(), std::uint64_t{0});
                if (now != total + arrived - (delivered ? 1 : 0)) inv.fail(where + ": packet count not conserved");
                if (delivered && (!r.delay() || *r.delay() < 1)) inv.fail(where + ": delay below one slot");
                total = now;

                if (!phase_order_sound(r.outcome, sim.last_timeline(), sim.config().t_p))
                    inv.fail(where + ": transmission started in the wrong minislot");

                if (queued[before.roles.pu.index()] > 0 && !std::holds_alternative<PuTransmit>(r.outcome)) {
                    ++pu_violations;
                    pu.fail(where + ": nonempty PU did not transmit first");
                }
                queued = r.queue_lengths;
                before = r.state;
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            timing << " N" << n << "/" << fmt(load, 1) << ":" << fmt(secs, 1) << "s";
        }
    }
    if (inv.pass) inv.detail = std::to_string(checked) + " slots checked;" + timing.str();
    if (pu.pass) pu.detail = "0 violations over " + std::to_string(checked) + " slots";
    else pu.detail += " (" + std::to_string(pu_violations) + " violations)";
    return {inv, pu};
}

Verdict exhaustive_small_instances() {
    Verdict v;
    constexpr std::uint64_t kHorizon = 12;
    constexpr int kPatternSlots = 6;
    int matched = 0;
    for (std::uint32_t pattern = 0; pattern < (1u << (2 * kPatternSlots)); ++pattern) {
        SimConfig c = symmetric(2, 0.0, kHorizon, pattern + 1);
        c.arrival.script.assign(2, std::vector<std::uint8_t>(kPatternSlots, 0));
        for (int i = 0; i < 2; ++i)
            for (int t = 0; t < kPatternSlots; ++t) c.arrival.script[i][t] = (pattern >> (i * kPatternSlots + t)) & 1u;

        testing::ReferenceQzmac ref(2, 0, 1, c.t_c, c.master_seed);
        Simulator sim(c);
        bool same = true;
        for (std::uint64_t t = 0; t < kHorizon && same; ++t) {
            const auto& r = sim.step();
            const auto dep = ref.step(t, r.arrivals);
            if (dep.has_value() != r.departed_arrival_slot.has_value()) same = false;
            else if (dep && (std::get<Delivered>(r.delivery).node.value != dep->node ||
                             *r.departed_arrival_slot != dep->arrival_slot))
                same = false;
        }
        if (same) ++matched;
        else v.fail("pattern " + std::to_string(pattern) + " diverges from the reference interpreter");
    }
    v.detail = std::to_string(matched) + "/4096 patterns match" + (v.pass ? "" : "; " + v.detail);
    return v;
}

Verdict delay_dominance() {
    Verdict v;

    // Gap direction first, from the independent interpreter over the same arrivals.
    {
        const auto c = symmetric(4, 0.9, 10000, 1);
        const auto engine = run(c);
        testing::ReferenceQzmac ref(4, 0, 1, c.t_c, c.master_seed);
        double sum = 0;
        std::uint64_t count = 0;
        for (const auto& r : engine.records)
            if (auto d = ref.step(r.asn, r.arrivals)) {
                sum += static_cast<double>(d->slot) - static_cast<double>(d->arrival_slot);
                ++count;
            }
        const double tdma = *run(symmetric(4, 0.9, 10000, 1, SchedulerKind::tdma()), nullptr).mean_delay_slots;
        if (!(count > 0 && sum / static_cast<double>(count) < tdma))
            v.fail("reference interpreter does not beat TDMA at horizon 1e4");
    }

    std::ostringstream heavy;
    double worst_ratio = 0;
    for (double load : {0.3, 0.6, 0.9}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const double q = *run(symmetric(4, load, kLongHorizon, seed), nullptr).mean_delay_slots;
            const double o =
                *run(symmetric(4, load, kLongHorizon, seed, SchedulerKind::oracle()), nullptr).mean_delay_slots;
            const double t =
                *run(symmetric(4, load, kLongHorizon, seed, SchedulerKind::tdma()), nullptr).mean_delay_slots;
            const std::string where = "load " + fmt(load, 1) + " seed " + std::to_string(seed);
            if (!(o <= q)) v.fail(where + ": oracle " + fmt(o) + " > qzmac " + fmt(q));
            if (!(q <= t)) v.fail(where + ": qzmac " + fmt(q) + " > tdma " + fmt(t));
            if (load == 0.9) {
                worst_ratio = std::max(worst_ratio, q / t);
                if (!(q < t / kTdmaFactor)) v.fail(where + ": qzmac " + fmt(q) + " not below tdma/2 " + fmt(t / 2));
                if (seed == 1) heavy << "load 0.9 seed 1: oracle " << fmt(o) << " qzmac " << fmt(q) << " tdma " << fmt(t);
            }
        }
    }
    const std::string measured = heavy.str() + "; worst qzmac/tdma at 0.9 = " + fmt(worst_ratio);
    v.detail = v.pass ? measured : v.detail + " | " + measured;
    return v;
}

Verdict mode_transition() {
    Verdict v;
    const std::vector<double> loads{0.1, 0.3, 0.5, 0.7, 0.9};
    constexpr int kSeeds = 5;
    std::vector<double> mean_share(loads.size(), 0.0);
    double min_polled = 1.0;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        std::vector<double> share;
        for (double load : loads) {
            const auto r = run(symmetric(4, load, kLongHorizon, 500 + seed), nullptr);
            share.push_back(*r.contention_share);
            if (load == 0.9) {
                min_polled = std::min(min_polled, *r.polled_share);
                if (!(*r.polled_share > kPolledShareAtHeavyLoad))
                    v.fail("seed " + std::to_string(seed) + ": polled share " + fmt(*r.polled_share) + " at load 0.9");
            }
        }
        for (std::size_t k = 0; k < loads.size(); ++k) mean_share[k] += share[k] / kSeeds;
        for (std::size_t k = 1; k < share.size(); ++k)
            if (!(share[k] < share[k - 1]))
                v.fail("seed " + std::to_string(seed) + ": contention share not decreasing at load " + fmt(loads[k], 1));
    }
    std::ostringstream os;
    os << "contention share";
    for (std::size_t k = 0; k < loads.size(); ++k) os << ' ' << fmt(loads[k], 1) << ':' << fmt(mean_share[k]);
    os << "; min polled share at 0.9 = " << fmt(min_polled);
    v.detail = v.pass ? os.str() : v.detail + " | " + os.str();
    return v;
}

Verdict saturation() {
    Verdict v;
    SimConfig c = symmetric(4, 0.0, 100000, 6);
    c.arrival = ArrivalSpec::all_saturated(4);
    const auto result = run(c);
    if (result.report.throughput != 1.0) v.fail("throughput " + fmt(result.report.throughput, 6));
    for (std::size_t t = 1; t < result.records.size(); ++t)
        if (!std::holds_alternative<PuTransmit>(result.records[t].outcome)) {
            v.fail("slot " + std::to_string(t) + " not served by the PU");
            break;
        }
    if (v.pass) v.detail = "throughput 1 over 100000 slots, PU served every slot";
    return v;
}

Verdict synchronization() {
    Verdict v;
    SimConfig c = symmetric(4, 0.5, 100000, 7);
    c.sync.drift_min_ppm = 40;
    c.sync.drift_max_ppm = 40;
    c.sync.eb_period_slots = 400;
    Simulator good(c);
    std::uint64_t misaligned = 0;
    while (!good.done()) misaligned += good.step().misaligned_nodes;
    if (misaligned != 0) v.fail("40 ppm run saw misaligned node-slots");
    if (good.max_abs_offset_us() > kSyncBoundUs + kOffsetTolUs)
        v.fail("max offset " + fmt(good.max_abs_offset_us()) + " us exceeds the bound");
    if (std::abs(c.sync.max_offset_bound_us() - kSyncBoundUs) > kOffsetTolUs) v.fail("analytic bound mismatch");

    c.sync.drift_min_ppm = 500;
    c.sync.drift_max_ppm = 500;
    c.sync.eb_period_slots = 4000;
    c.horizon_slots = 20000;
    Simulator bad(c);
    std::uint64_t detected = 0;
    while (!bad.done()) detected += bad.step().misaligned_nodes;
    if (detected == 0) v.fail("500 ppm / 4000-slot beacons not detected as misaligned");
    if (bad.max_abs_offset_us() < c.sync.ts_tx_offset_us) v.fail("500 ppm offset stayed within the guard");

    if (v.pass)
        v.detail = "40 ppm max offset " + fmt(good.max_abs_offset_us(), 2) + " us, aligned throughout; 500 ppm max offset " +
                   fmt(bad.max_abs_offset_us(), 1) + " us, " + std::to_string(detected) + " misaligned node-slots";
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Verdict replay() {
    Verdict v;
    std::random_device rd;
    const fs::path root = fs::temp_directory_path() / ("qzmac-acceptance-" + std::to_string(rd()));
    const std::vector<std::string> run_args{"--load", "0.7", "--horizon", "20000", "--seed", "42", "--cca-false-busy",
                                            "0.01", "--cca-false-idle", "0.01", "--interference", "0.01",
                                            "--drift-min", "-200", "--drift-max", "200", "--trace"};
    std::ostringstream sink;
    for (const char* d : {"a", "b"}) {
        std::vector<std::string> args{"run", "--out", (root / d).string()};
        args.insert(args.end(), run_args.begin(), run_args.end());
        if (cli_main(args, sink, sink) != 0) v.fail("cli run failed");
        const std::vector<std::string> sweep{"sweep", "--loads", "0.3,0.9", "--seeds", "1,2", "--horizon", "5000",
                                             "--protocols", "qzmac,tdma,oracle,pcsma:0.2", "--trace",
                                             "--out", (root / d / "sweep").string()};
        if (cli_main(sweep, sink, sink) != 0) v.fail("cli sweep failed");
    }
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto twin = root / "b" / fs::relative(entry.path(), root / "a");
        if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) v.fail("differs: " + twin.string());
        ++files;
    }
    fs::remove_all(root);
    if (files < 10) v.fail("too few output files compared");
    if (v.pass) v.detail = std::to_string(files) + " trace/summary/sweep files byte-identical across repeated invocations";
    return v;
}

Verdict cca_robustness() {
    Verdict v;
    SimConfig c = symmetric(4, 0.6, kLongHorizon, 9);
    const auto clean = run(c, nullptr);
    c.cca = CcaModel{0.01, 0.01};
    Simulator sim(c);
    MetricsAccumulator acc(c.n, c.warmup_slots, c.slot_us);
    std::uint64_t total = 0;
    std::uint64_t arrived = 0;
    std::uint64_t departed = 0;
    while (!sim.done()) {
        const auto& r = sim.step();
        acc.add(r);
        for (auto a : r.arrivals) arrived += a;
        departed += r.departed_arrival_slot.has_value();
        total = std::accumulate(r.queue_lengths.begin(), r.queue_lengths.end(), std::uint64_t{0});
    }
    const auto noisy = acc.finish();
    if (arrived != departed + total) v.fail("packets unaccounted for");
    if (noisy.measured_slots != kLongHorizon) v.fail("run did not complete");
    const double degradation = (clean.throughput - noisy.throughput) / clean.throughput;
    if (!(degradation < kMaxCcaDegradation)) v.fail("throughput degraded by " + fmt(100 * degradation, 2) + "%");
    const std::string measured = "throughput " + fmt(clean.throughput) + " -> " + fmt(noisy.throughput) + " (" +
                                 fmt(100 * degradation, 3) + "%), divergence slots " +
                                 std::to_string(noisy.divergence_slots) + ", mean delay " +
                                 fmt(*clean.mean_delay_slots) + " -> " + fmt(*noisy.mean_delay_slots);
    v.detail = v.pass ? measured : v.detail + " | " + measured;
    return v;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Verdict& v) {
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << v.detail << std::endl;
        failures += v.pass ? 0 : 1;
    };

    const auto [inv, pu] = invariants_and_pu_conservation();
    report(1, "invariants", inv);
    report(2, "exhaustive small instances", exhaustive_small_instances());
    report(3, "PU work conservation", pu);
    report(4, "delay dominance", delay_dominance());
    report(5, "hybrid mode transition", mode_transition());
    report(6, "saturation throughput", saturation());
    report(7, "synchronization bound", synchronization());
    report(8, "replay determinism", replay());
    report(9, "CCA-error robustness", cca_robustness());

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
