#pragma once

#include <cmath>

namespace vemo {

// Propagation speed used for all epoch/delay conversions (m/s).
inline constexpr double kSpeedOfLight = 299'792'458.0;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3& a, const Vec3& b) = default;
};

inline double path_length(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Illuminator -> target -> receiver bounce path.
inline double echo_path_length(const Vec3& tx, const Vec3& target, const Vec3& rx) {
    return path_length(tx, target) + path_length(target, rx);
}

// Whole epochs a signal spends in flight. Floor keeps short links in the
// transmit epoch; only paths of at least c*epoch_duration spill over.
inline int delay_epochs(double path_length_m, double epoch_duration_s) {
    return static_cast<int>(std::floor(path_length_m / kSpeedOfLight / epoch_duration_s));
}

} // namespace vemo
