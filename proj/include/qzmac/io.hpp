#pragma once

// Text formats written by the experiment runner.
//
//   trace    line-delimited JSON, one header line carrying the full config
//            followed by one line per SlotRecord; every line has a "schema"
//   summary  key=value lines, first line "schema=qzmac.summary/1"
//   sweep    tab-separated table, first line "# schema=qzmac.sweep/1"
//
// Readers reject any schema they do not know.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qzmac/config.hpp"
#include "qzmac/metrics.hpp"
#include "qzmac/record.hpp"

namespace qzmac::io {

inline constexpr std::string_view kTraceSchema = "qzmac.trace/1";
inline constexpr std::string_view kSummarySchema = "qzmac.summary/1";
inline constexpr std::string_view kSweepSchema = "qzmac.sweep/1";

/// Shortest text that reads back to the same double.
std::string format_double(double x);

std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(std::string_view text);

std::string trace_header_line(const SimConfig& config);
std::string trace_line(const SlotRecord& rec);
SlotRecord parse_trace_line(std::string_view line);

/// Reads a whole trace, feeding each record to `on_record`. Returns the
/// config from the header line.
SimConfig read_trace(std::istream& in, const std::function<void(const SlotRecord&)>& on_record);

/// Streams a trace through the metrics accumulator using the warmup and slot
/// length from its header.
std::pair<SimConfig, MetricsReport> summarize_trace(std::istream& in);

std::string format_summary(const SimConfig& config, const MetricsReport& report);

/// Key/value view of a summary file; throws on a missing or unknown schema.
std::map<std::string, std::string> parse_summary(std::istream& in);

struct SweepRow {
    double load = 0.0;
    std::uint64_t seed = 0;
    std::string protocol;
    MetricsReport report;
};

std::string format_sweep_table(std::span<const SweepRow> rows);

}  // namespace qzmac::io
