#include "qzmac/random.hpp"

#include <limits>
#include <stdexcept>

namespace qzmac {

namespace {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001b3ull;
    }
    return h;
}

}  // namespace

std::uint64_t RandomStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = hi - lo;
    const std::uint64_t x = engine_();
    if (span == std::numeric_limits<std::uint64_t>::max()) return x;
    return lo + static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * (span + 1)) >> 64);
}

RandomStream derive_stream(std::uint64_t master_seed, std::string_view label) {
    const std::uint64_t h = fnv1a64(label);
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(label.size())};
    return RandomStream(seq);
}

RandomStream StreamFactory::derive(std::string_view label) {
    auto [it, inserted] = issued_.emplace(label);
    if (!inserted) throw std::invalid_argument("duplicate random stream label: " + std::string(label));
    return derive_stream(master_seed_, label);
}

}  // namespace qzmac
