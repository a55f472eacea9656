#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vemo/signal.hpp"

namespace vemo {

inline double ber(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("ber: length mismatch");
    if (a.empty()) throw std::invalid_argument("ber: empty streams");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < a.size(); ++i) errors += a[i] != b[i];
    return static_cast<double>(errors) / static_cast<double>(a.size());
}

inline double sinr_db(double signal_power, double interference_plus_noise_power) {
    if (interference_plus_noise_power <= 0.0)
        throw std::invalid_argument("sinr_db: zero interference-plus-noise power");
    if (signal_power < 0.0) throw std::invalid_argument("sinr_db: negative signal power");
    return db10(signal_power / interference_plus_noise_power);
}

inline double jam_to_signal_db(double jam_power, double signal_power) {
    if (signal_power <= 0.0) throw std::invalid_argument("jam_to_signal_db: zero signal power");
    if (jam_power < 0.0) throw std::invalid_argument("jam_to_signal_db: negative jam power");
    return db10(jam_power / signal_power);
}

// Gaussian tail probability; the closed-form BER oracle for QPSK/BPSK.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace vemo
