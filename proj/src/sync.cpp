#include "qzmac/sync.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qzmac {

void SyncConfig::validate() const {
    if (eb_period_slots < 1) throw std::invalid_argument("eb_period_slots must be at least 1");
    if (!(ts_tx_offset_us > 0)) throw std::invalid_argument("ts_tx_offset_us must be positive");
    if (!(slot_us > 0)) throw std::invalid_argument("slot_us must be positive");
    if (!(drift_min_ppm <= drift_max_ppm)) throw std::invalid_argument("drift range is empty");
    if (!(eb_loss_probability >= 0.0 && eb_loss_probability <= 1.0))
        throw std::invalid_argument("eb_loss_probability must lie in [0, 1]");
}

double SyncConfig::max_offset_bound_us() const {
    const double worst_ppm = std::max(std::abs(drift_min_ppm), std::abs(drift_max_ppm));
    return worst_ppm * 1e-6 * static_cast<double>(eb_period_slots) * slot_us;
}

ClockState advance_clock(const ClockState& c, std::uint64_t slots, double slot_us) {
    ClockState next = c;
    next.offset_us += c.drift_ppm * 1e-6 * static_cast<double>(slots) * slot_us;
    return next;
}

ClockState receive_eb(const ClockState& c, std::int64_t asn) {
    if (asn < c.last_eb_asn)
        throw std::invalid_argument("receive_eb: ASN " + std::to_string(asn) + " precedes last beacon ASN " +
                                    std::to_string(c.last_eb_asn));
    ClockState next = c;
    next.offset_us = 0.0;
    next.last_eb_asn = asn;
    return next;
}

bool is_aligned(const ClockState& c, const SyncConfig& cfg) { return std::abs(c.offset_us) < cfg.ts_tx_offset_us; }

}  // namespace qzmac
