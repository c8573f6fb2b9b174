#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qzmac {

class RandomStream;

/// Per-node arrival process. Bernoulli with rate `rates[i]` unless the node is
/// saturated or a script is given.
struct ArrivalSpec {
    std::vector<double> rates;
    std::vector<bool> saturated;
    /// Optional fixed pattern: script[i][t] is the number of packets (0 or 1)
    /// arriving at node i during slot t. Slots past the end see no arrivals.
    std::vector<std::vector<std::uint8_t>> script;

    static ArrivalSpec symmetric(std::size_t n, double total_load);
    static ArrivalSpec all_saturated(std::size_t n);

    std::size_t nodes() const { return rates.size(); }
    double total_load() const;
    bool is_saturated(std::size_t i) const { return i < saturated.size() && saturated[i]; }

    /// Rejects rates outside [0, 1] and mismatched vector sizes. Overload
    /// (total load >= 1) is legal; see unstable().
    void validate() const;
    bool unstable() const;
};

/// Arrivals during slot `slot`. Consumes exactly one value from each of the
/// `n` per-node streams regardless of outcome. A saturated node receives a
/// packet exactly when its post-service queue is empty, so it is never empty
/// at a slot boundary.
std::vector<std::uint8_t> generate_arrivals(const ArrivalSpec& spec, std::uint64_t slot,
                                            std::span<RandomStream> node_streams,
                                            std::span<const std::size_t> queue_lengths);

}  // namespace qzmac
