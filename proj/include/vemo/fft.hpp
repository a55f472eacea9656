#pragma once

#include "vemo/signal.hpp"

#include <cstddef>

namespace vemo {

bool is_power_of_two(std::size_t n);

// In-place radix-2 DFT. Forward: X[k] = sum x[n] e^{-2pi i kn/N}.
// Inverse applies the 1/N factor. Length must be a power of two.
void fft_pow2(ComplexSignal& data, bool inverse);

ComplexSignal fft(const ComplexSignal& data);
ComplexSignal ifft(const ComplexSignal& data);

// Linear cross-correlation via zero-padded FFTs:
//   out[lag] = sum_n sig[lag + n] * conj(ref[n]),  lag = 0 .. |sig| - |ref|.
// Requires |ref| <= |sig| and a nonempty ref.
ComplexSignal cross_correlate(const ComplexSignal& sig, const ComplexSignal& ref);

} // namespace vemo
