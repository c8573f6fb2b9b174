#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <string_view>

namespace qzmac {

/// A deterministic 64-bit random stream. The integer and real mappings are
/// written out here instead of using <random> distributions so that traces
/// replay identically across standard library implementations.
class RandomStream {
public:
    RandomStream() = default;
    explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on {lo, ..., hi} by multiply-shift; consumes exactly one value.
    /// Bias is below (hi - lo + 1) / 2^64.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    /// Exactly one value consumed.
    bool bernoulli(double p) { return uniform01() < p; }

    bool operator==(const RandomStream&) const = default;

private:
    std::mt19937_64 engine_;
};

/// Hands out one independent stream per label. Streams depend only on
/// (master seed, label), so adding or removing a consumer never perturbs
/// another stream.
class StreamFactory {
public:
    explicit StreamFactory(std::uint64_t master_seed) : master_seed_(master_seed) {}

    /// Throws std::invalid_argument if `label` was already handed out.
    RandomStream derive(std::string_view label);

    std::uint64_t master_seed() const { return master_seed_; }

private:
    std::uint64_t master_seed_;
    std::set<std::string, std::less<>> issued_;
};

/// Stateless form of StreamFactory::derive without the duplicate check.
RandomStream derive_stream(std::uint64_t master_seed, std::string_view label);

}  // namespace qzmac
