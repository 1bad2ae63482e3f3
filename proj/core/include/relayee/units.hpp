#pragma once

#include <cmath>

namespace relayee {

// All user-facing SNR values are dB, all internal math is linear.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace relayee
