#pragma once

#include <cmath>

namespace secbeam {

// All internal math is carried out in watts and nats; dBm and bits appear only
// at configuration and reporting boundaries.

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

inline double bits_to_nats(double bits) { return bits * std::log(2.0); }

} // namespace secbeam
