#include "qzmac/traffic.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "qzmac/random.hpp"

namespace qzmac {

ArrivalSpec ArrivalSpec::symmetric(std::size_t n, double total_load) {
    if (n == 0) throw std::invalid_argument("ArrivalSpec: need at least one node");
    ArrivalSpec spec;
    spec.rates.assign(n, total_load / static_cast<double>(n));
    spec.saturated.assign(n, false);
    return spec;
}

ArrivalSpec ArrivalSpec::all_saturated(std::size_t n) {
    ArrivalSpec spec;
    spec.rates.assign(n, 0.0);
    spec.saturated.assign(n, true);
    return spec;
}

double ArrivalSpec::total_load() const { return std::accumulate(rates.begin(), rates.end(), 0.0); }

void ArrivalSpec::validate() const {
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (!(rates[i] >= 0.0 && rates[i] <= 1.0))
            throw std::invalid_argument("arrival rate of node " + std::to_string(i) + " must lie in [0, 1]");
    if (!saturated.empty() && saturated.size() != rates.size())
        throw std::invalid_argument("saturated flags must match the node count");
    if (!script.empty() && script.size() != rates.size())
        throw std::invalid_argument("arrival script must have one row per node");
    for (const auto& row : script)
        for (auto a : row)
            if (a > 1) throw std::invalid_argument("arrival script entries must be 0 or 1");
}

bool ArrivalSpec::unstable() const {
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (is_saturated(i)) return true;
    return total_load() >= 1.0;
}

std::vector<std::uint8_t> generate_arrivals(const ArrivalSpec& spec, std::uint64_t slot,
                                            std::span<RandomStream> node_streams,
                                            std::span<const std::size_t> queue_lengths) {
    const std::size_t n = spec.nodes();
    if (node_streams.size() != n || queue_lengths.size() != n)
        throw std::invalid_argument("generate_arrivals: stream/queue count does not match node count");
    std::vector<std::uint8_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = node_streams[i].uniform01();
        if (spec.is_saturated(i))
            out[i] = queue_lengths[i] == 0 ? 1 : 0;
        else if (!spec.script.empty())
            out[i] = slot < spec.script[i].size() ? spec.script[i][slot] : 0;
        else
            out[i] = u < spec.rates[i] ? 1 : 0;
    }
    return out;
}

}  // namespace qzmac
