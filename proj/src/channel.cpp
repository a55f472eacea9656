#include "vemo/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "vemo/rng.hpp"

namespace vemo {

namespace {

long long delay_samples_for(double d, const PhyDefaults& phy, double epoch_duration_s) {
    return std::llround(d / kSpeedOfLight * phy.sample_rate_epochs / epoch_duration_s);
}

} // namespace

ChannelSpec direct_channel(const Vec3& tx_pos, const Vec3& rx_pos, const PhyDefaults& phy,
                           double epoch_duration_s) {
    const double d = path_length(tx_pos, rx_pos);
    if (d <= 0.0) throw std::invalid_argument("direct_channel: coincident positions");
    ChannelSpec ch;
    ch.delay_samples = delay_samples_for(d, phy, epoch_duration_s);
    ch.gain = {phy.ref_gain / d, 0.0};
    return ch;
}

ChannelSpec echo_channel(const Vec3& tx_pos, const Vec3& target_pos, const Vec3& rx_pos,
                         double reflectivity, const PhyDefaults& phy, double epoch_duration_s) {
    const double d1 = path_length(tx_pos, target_pos);
    const double d2 = path_length(target_pos, rx_pos);
    if (d1 <= 0.0 || d2 <= 0.0) throw std::invalid_argument("echo_channel: coincident positions");
    ChannelSpec ch;
    ch.delay_samples = delay_samples_for(d1 + d2, phy, epoch_duration_s);
    ch.gain = {phy.ref_gain * phy.ref_gain * reflectivity / (d1 * d2), 0.0};
    return ch;
}

ComplexSignal superpose(const std::vector<Emission>& emissions, std::size_t length,
                        double noise_power, std::uint64_t seed) {
    ComplexSignal out(length, {0.0, 0.0});
    for (const auto& e : emissions) {
        if (!e.signal || e.channel.delay_samples < 0)
            throw std::invalid_argument("superpose: bad emission");
        const std::size_t start = static_cast<std::size_t>(e.channel.delay_samples);
        for (std::size_t i = start; i < length; ++i) {
            const std::size_t k = i - start;
            if (k >= e.signal->size()) break;
            out[i] += e.channel.gain * (*e.signal)[k];
        }
    }
    if (noise_power > 0.0) {
        auto g = rng::engine(seed);
        for (auto& x : out) x += rng::cgaussian(g, noise_power);
    }
    return out;
}

} // namespace vemo
