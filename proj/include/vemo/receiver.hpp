#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vemo/signal.hpp"
#include "vemo/waveform.hpp"

namespace vemo {

// Least-squares complex scale of `reference` inside `received` starting at
// `offset`: g = <rx_window, ref> / <ref, ref>.
std::complex<double> estimate_gain(const ComplexSignal& received, const ComplexSignal& reference,
                                   std::size_t offset = 0);

// received - g*reference (g from estimate_gain) over the reference window.
// The projection can only shrink the window's power; that is asserted on
// every call.
ComplexSignal subtract_reference(const ComplexSignal& received, const ComplexSignal& reference,
                                 std::size_t offset = 0,
                                 std::complex<double>* gain_out = nullptr);

struct SicStage {
    std::string layer;
    double residual_power_db = 0.0; // relative to the received power
};

struct SicResult {
    std::vector<int> inner_bits;
    std::vector<std::complex<double>> outer_symbols; // detected (decision-directed mode only)
    double residual_power_db = 0.0;                  // after the last cancellation stage
    std::vector<SicStage> stages;
};

// SIC with a fully known outer layer (radar or jam reference regenerable from
// a seed). Subtracts the outer layer, then pilot-equalizes and demodulates
// the inner comm burst.
SicResult sic_decode(const ComplexSignal& received, const ComplexSignal& outer_reference,
                     const OfdmConfig& inner_cfg, const std::string& inner_app,
                     const NomaConfig& noma);

// Decision-directed SIC for a comm-on-comm NOMA pair: demodulate the outer
// burst treating the inner as noise, regenerate, subtract, then decode the
// inner. Refused below a 3 dB split, where the layer order is ambiguous.
SicResult sic_decode_decision_directed(const ComplexSignal& received, const OfdmConfig& outer_cfg,
                                       const std::string& outer_app, const OfdmConfig& inner_cfg,
                                       const std::string& inner_app, const NomaConfig& noma);

struct DelayEstimate {
    long long delay_samples = 0;
    double peak_metric = 0.0; // normalized correlation magnitude in [0, 1]
    bool detected = false;
    double threshold = 0.0;
};

// Normalized cross-correlation over all lags; threshold = mean +
// threshold_k * stddev of the off-peak magnitudes.
DelayEstimate matched_filter_delay(const ComplexSignal& signal, const ComplexSignal& reference,
                                   double threshold_k);

struct RadarExtract {
    DelayEstimate delay;
    ComplexSignal residual;
    bool comm_cancelled = false; // false when the pilot check tripped the fallback
};

// Demodulate the dominant comm burst (assumed at offset 0), regenerate it,
// subtract, and matched-filter the residual against the radar reference. If
// the pilot does not fit the received signal the cancellation is skipped and
// the raw signal is filtered instead.
RadarExtract extract_radar_return(const ComplexSignal& received, const OfdmConfig& comm_cfg,
                                  const std::string& comm_app, int n_data_symbols,
                                  const ComplexSignal& radar_reference, double threshold_k);

// Regenerate the keyed jam sequence at the given offset, fit its gain, and
// subtract. A wrong key fits nothing and leaves the signal essentially
// untouched.
ComplexSignal cancel_jam(const ComplexSignal& received, const TransecKey& key,
                         std::size_t offset = 0);

// Pilot-equalized demodulation of one burst (first symbol is the known
// pilot). Returns the payload bits.
std::vector<int> pilot_equalized_demod(const ComplexSignal& burst, const OfdmConfig& cfg,
                                       const std::string& app);

} // namespace vemo
