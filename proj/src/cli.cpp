#include "qzmac/cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qzmac/engine.hpp"
#include "qzmac/io.hpp"

namespace qzmac {

namespace {

namespace fs = std::filesystem;

struct RunOptions {
    std::string protocol = "qzmac";
    std::optional<std::size_t> n;
    double load = 0.5;
    std::vector<double> rates;
    std::vector<std::size_t> saturated;
    std::uint64_t horizon = 100000;
    std::uint64_t warmup = 0;
    std::uint64_t seed = 1;
    std::uint32_t t_p = kPollingMinislots;
    std::uint32_t t_c = kContentionMinislots;
    std::uint32_t pu0 = 0;
    std::uint32_t su0 = 1;
    double cca_false_busy = 0.0;
    double cca_false_idle = 0.0;
    double ext_busy = 0.0;
    double packet_loss = 0.0;
    double drift_min = 0.0;
    double drift_max = 0.0;
    std::uint64_t eb_period = 400;
    double eb_loss = 0.0;
    std::string out_dir = "qzmac-out";
    bool trace = false;
};

void add_run_options(CLI::App& cmd, RunOptions& o, bool with_load) {
    cmd.add_option("--protocol", o.protocol, "qzmac | tdma | oracle | pcsma[:p]");
    cmd.add_option("--n", o.n, "number of nodes");
    if (with_load) {
        cmd.add_option("--load", o.load, "total arrival rate, split evenly (packets/slot)");
        cmd.add_option("--rates", o.rates, "per-node arrival rates; overrides --load")->delimiter(',');
    }
    cmd.add_option("--saturated", o.saturated, "node ids that always have a packet")->delimiter(',');
    cmd.add_option("--horizon", o.horizon, "slots to simulate");
    cmd.add_option("--warmup", o.warmup, "leading slots excluded from statistics");
    if (with_load) cmd.add_option("--seed", o.seed, "master seed");
    cmd.add_option("--tp", o.t_p, "polling minislots");
    cmd.add_option("--tc", o.t_c, "contention minislots");
    cmd.add_option("--pu0", o.pu0, "initial primary user");
    cmd.add_option("--su0", o.su0, "initial secondary user");
    cmd.add_option("--cca-false-busy", o.cca_false_busy, "P(idle minislot sensed busy)");
    cmd.add_option("--cca-false-idle", o.cca_false_idle, "P(busy minislot sensed idle)");
    cmd.add_option("--interference", o.ext_busy, "P(external source occupies a minislot)");
    cmd.add_option("--packet-loss", o.packet_loss, "P(lone transmission corrupted)");
    cmd.add_option("--drift-min", o.drift_min, "lower bound of per-node clock drift (ppm)");
    cmd.add_option("--drift-max", o.drift_max, "upper bound of per-node clock drift (ppm)");
    cmd.add_option("--eb-period", o.eb_period, "slots between enhanced beacons");
    cmd.add_option("--eb-loss", o.eb_loss, "P(a node misses a beacon)");
    cmd.add_option("--out", o.out_dir, "output directory");
    cmd.add_flag("--trace", o.trace, "write the per-slot trace");
}

SimConfig build_config(const RunOptions& o, double load, std::uint64_t seed, const std::string& protocol) {
    SimConfig c;
    c.scheduler = SchedulerKind::parse(protocol);
    if (!o.rates.empty()) {
        c.n = o.rates.size();
        if (o.n && *o.n != c.n)
            throw std::invalid_argument("--rates lists " + std::to_string(c.n) + " nodes but --n is " + std::to_string(*o.n));
        c.arrival.rates = o.rates;
        c.arrival.saturated.assign(c.n, false);
    } else {
        c.n = o.n.value_or(4);
        if (c.n == 0) throw std::invalid_argument("node count must be positive");
        if (!(load >= 0.0)) throw std::invalid_argument("load must be non-negative");
        c.arrival = ArrivalSpec::symmetric(c.n, load);
    }
    for (auto id : o.saturated) {
        if (id >= c.n) throw std::invalid_argument("saturated node id " + std::to_string(id) + " out of range");
        c.arrival.saturated[id] = true;
    }
    c.t_p = o.t_p;
    c.t_c = o.t_c;
    c.pu0 = NodeId{o.pu0};
    c.su0 = NodeId{o.su0};
    c.cca.p_false_busy = o.cca_false_busy;
    c.cca.p_false_idle = o.cca_false_idle;
    c.interference.p_minislot_busy = o.ext_busy;
    c.interference.p_packet_loss = o.packet_loss;
    c.sync.drift_min_ppm = o.drift_min;
    c.sync.drift_max_ppm = o.drift_max;
    c.sync.eb_period_slots = o.eb_period;
    c.sync.eb_loss_probability = o.eb_loss;
    c.horizon_slots = o.horizon;
    c.warmup_slots = o.warmup;
    c.master_seed = seed;
    c.validate();
    return c;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

/// Runs one config, writing `<stem>.summary.txt` and optionally
/// `<stem>.trace.jsonl` under `dir`.
MetricsReport run_to_files(const SimConfig& config, const fs::path& dir, const std::string& stem, bool trace) {
    std::ofstream trace_file;
    if (trace) {
        trace_file.open(dir / (stem + ".trace.jsonl"), std::ios::binary);
        if (!trace_file) throw std::runtime_error("cannot write trace under " + dir.string());
        trace_file << io::trace_header_line(config) << '\n';
    }
    SlotSink sink;
    if (trace) sink = [&](const SlotRecord& rec) { trace_file << io::trace_line(rec) << '\n'; };
    MetricsReport report = run(config, sink);
    write_file(dir / (stem + ".summary.txt"), io::format_summary(config, report));
    return report;
}

void warn_if_unstable(const SimConfig& c, std::ostream& err) {
    if (c.arrival.unstable())
        err << "warning: total load " << io::format_double(c.arrival.total_load())
            << " (or a saturated node) exceeds channel capacity; queues will grow without bound\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"QZMAC slot-level simulator and experiment runner", "qzmac"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
    add_run_options(*run_cmd, run_opts, true);

    RunOptions sweep_opts;
    std::vector<double> loads;
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> protocols{"qzmac", "tdma", "oracle"};
    unsigned jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "run the cartesian product of loads, seeds and protocols");
    add_run_options(*sweep_cmd, sweep_opts, false);
    sweep_cmd->add_option("--loads", loads, "total loads")->delimiter(',')->required();
    sweep_cmd->add_option("--seeds", seeds, "master seeds")->delimiter(',');
    sweep_cmd->add_option("--protocols", protocols, "protocols to compare")->delimiter(',');
    sweep_cmd->add_option("--jobs", jobs, "runs executed in parallel")->check(CLI::PositiveNumber);

    std::string trace_path;
    std::string summary_out;
    auto* sum_cmd = app.add_subcommand("summarize", "recompute a summary from a trace file");
    sum_cmd->add_option("trace", trace_path, "trace file (.jsonl)")->required();
    sum_cmd->add_option("--out", summary_out, "write here instead of stdout");

    std::vector<std::string> argv_store{"qzmac"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (run_cmd->parsed()) {
            const SimConfig config = build_config(run_opts, run_opts.load, run_opts.seed, run_opts.protocol);
            warn_if_unstable(config, err);
            fs::create_directories(run_opts.out_dir);
            const auto report = run_to_files(config, run_opts.out_dir, "run", run_opts.trace);
            out << "mean_delay_slots=" << (report.mean_delay_slots ? io::format_double(*report.mean_delay_slots) : "none")
                << " throughput=" << io::format_double(report.throughput) << '\n';
            return 0;
        }

        if (sweep_cmd->parsed()) {
            std::vector<SimConfig> configs;
            std::vector<io::SweepRow> rows;
            for (auto seed : seeds)
                for (auto load : loads)
                    for (const auto& protocol : protocols) {
                        configs.push_back(build_config(sweep_opts, load, seed, protocol));
                        rows.push_back({load, seed, configs.back().scheduler.name(), {}});
                    }
            for (const auto& c : configs)
                if (c.arrival.unstable()) {
                    warn_if_unstable(c, err);
                    break;
                }
            const fs::path dir = sweep_opts.out_dir;
            fs::create_directories(dir / "runs");

            std::atomic<std::size_t> next{0};
            std::vector<std::string> errors(configs.size());
            auto worker = [&] {
                for (std::size_t k = next++; k < configs.size(); k = next++) {
                    const auto& row = rows[k];
                    const std::string stem = row.protocol + "-load" + io::format_double(row.load) + "-seed" + std::to_string(row.seed);
                    try {
                        rows[k].report = run_to_files(configs[k], dir / "runs", stem, sweep_opts.trace);
                    } catch (const std::exception& e) {
                        errors[k] = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            for (const auto& e : errors)
                if (!e.empty()) throw std::runtime_error(e);

            write_file(dir / "sweep.tsv", io::format_sweep_table(rows));
            out << "wrote " << rows.size() << " rows to " << (dir / "sweep.tsv").string() << '\n';
            return 0;
        }

        if (sum_cmd->parsed()) {
            std::ifstream in(trace_path, std::ios::binary);
            if (!in) throw std::runtime_error("cannot read " + trace_path);
            const auto [config, report] = io::summarize_trace(in);
            const std::string text = io::format_summary(config, report);
            if (summary_out.empty())
                out << text;
            else
                write_file(summary_out, text);
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace qzmac
