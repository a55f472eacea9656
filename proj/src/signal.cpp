#include "vemo/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vemo {

double mean_power(const ComplexSignal& sig) {
    if (sig.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& x : sig) acc += std::norm(x);
    return acc / static_cast<double>(sig.size());
}

void normalize_unit_power(ComplexSignal& sig) {
    const double p = mean_power(sig);
    if (p <= 0.0) throw std::invalid_argument("normalize_unit_power: zero-power signal");
    const double s = 1.0 / std::sqrt(p);
    for (auto& x : sig) x *= s;
}

std::complex<double> inner_product(const ComplexSignal& a, const ComplexSignal& b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * std::conj(b[i]);
    return acc;
}

double papr_db(const ComplexSignal& sig, double percentile) {
    if (sig.empty()) throw std::invalid_argument("papr_db: empty signal");
    if (percentile <= 0.0 || percentile > 100.0)
        throw std::invalid_argument("papr_db: percentile out of (0, 100]");
    const double mean = mean_power(sig);
    if (mean <= 0.0) throw std::invalid_argument("papr_db: zero-power signal");

    std::vector<double> pow(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) pow[i] = std::norm(sig[i]);
    std::sort(pow.begin(), pow.end());

    const auto n = static_cast<double>(pow.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::min(std::max<std::size_t>(rank, 1), pow.size());
    return db10(pow[rank - 1] / mean);
}

} // namespace vemo
