#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemo/geometry.hpp"
#include "vemo/scenario.hpp"
#include "vemo/signal.hpp"

namespace vemo {

// One propagation tap: integer-sample delay and a complex gain. No carrier is
// modeled, so the gain phase is 0 unless a scenario supplies extra taps.
struct ChannelSpec {
    long long delay_samples = 0;
    std::complex<double> gain{0.0, 0.0};
    std::string label;
};

// Free-space amplitude law: |gain| = ref_gain / d, delay from d at the
// scenario sample rate.
ChannelSpec direct_channel(const Vec3& tx_pos, const Vec3& rx_pos, const PhyDefaults& phy,
                           double epoch_duration_s);

// Two-leg bounce off a reflector: |gain| = ref_gain^2 * reflectivity / (d1*d2).
ChannelSpec echo_channel(const Vec3& tx_pos, const Vec3& target_pos, const Vec3& rx_pos,
                         double reflectivity, const PhyDefaults& phy, double epoch_duration_s);

// An emission as seen by one receiver. The signal is not owned.
struct Emission {
    const ComplexSignal* signal = nullptr;
    ChannelSpec channel;
};

// Sum of delayed, scaled emissions plus seeded circularly-symmetric complex
// Gaussian noise. Emissions that run past `length` are truncated.
ComplexSignal superpose(const std::vector<Emission>& emissions, std::size_t length,
                        double noise_power, std::uint64_t seed);

} // namespace vemo
