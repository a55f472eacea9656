#include "vemo/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace vemo {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

void fft_pow2(ComplexSignal& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n))
        throw std::invalid_argument("fft_pow2: length must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& x : data) x *= inv_n;
    }
}

ComplexSignal fft(const ComplexSignal& data) {
    ComplexSignal out = data;
    fft_pow2(out, false);
    return out;
}

ComplexSignal ifft(const ComplexSignal& data) {
    ComplexSignal out = data;
    fft_pow2(out, true);
    return out;
}

ComplexSignal cross_correlate(const ComplexSignal& sig, const ComplexSignal& ref) {
    if (ref.empty() || ref.size() > sig.size())
        throw std::invalid_argument("cross_correlate: need 1 <= |ref| <= |sig|");

    std::size_t m = 1;
    while (m < sig.size() + ref.size()) m <<= 1;

    ComplexSignal fs(m), fr(m);
    std::copy(sig.begin(), sig.end(), fs.begin());
    std::copy(ref.begin(), ref.end(), fr.begin());
    fft_pow2(fs, false);
    fft_pow2(fr, false);
    for (std::size_t i = 0; i < m; ++i) fs[i] *= std::conj(fr[i]);
    fft_pow2(fs, true);

    fs.resize(sig.size() - ref.size() + 1);
    return fs;
}

} // namespace vemo
