#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vemo {

// Complex baseband sample sequence. Dimensionless sample domain; powers are
// relative to 1.0.
using ComplexSignal = std::vector<std::complex<double>>;

double mean_power(const ComplexSignal& sig);

// In-place scale to unit mean power. Throws std::invalid_argument on empty or
// zero-power input.
void normalize_unit_power(ComplexSignal& sig);

// <a, b> = sum a[i] * conj(b[i]) over the overlap of equal-length spans.
std::complex<double> inner_product(const ComplexSignal& a, const ComplexSignal& b);

// 10*log10(percentile(|x|^2) / mean(|x|^2)). Percentile is nearest-rank, so
// percentile=100 is the exact peak. Throws on empty or zero-power input.
double papr_db(const ComplexSignal& sig, double percentile);

inline double db10(double ratio) { return 10.0 * std::log10(ratio); }
inline double undb10(double db) { return std::pow(10.0, db / 10.0); }

} // namespace vemo
