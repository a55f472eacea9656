#include "vemo/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vemo/fft.hpp"

namespace vemo {

namespace {

double window_power(const ComplexSignal& x, std::size_t offset, std::size_t len) {
    double p = 0.0;
    for (std::size_t i = 0; i < len; ++i) p += std::norm(x[offset + i]);
    return len ? p / static_cast<double>(len) : 0.0;
}

constexpr double kFloorDb = -300.0;

double ratio_db(double num, double den) {
    if (den <= 0.0) return 0.0;
    if (num <= 0.0) return kFloorDb;
    return std::max(kFloorDb, db10(num / den));
}

// min ||rx - a*u - b*v|| over the common window. The sequential projection
// leaves a cross-term when u and v are correlated; the 2x2 normal equations
// do not. Falls back to projecting on u alone for collinear layers.
ComplexSignal subtract_pair(const ComplexSignal& rx, const ComplexSignal& u,
                            const ComplexSignal& v) {
    const std::size_t n = std::min({rx.size(), u.size(), v.size()});
    std::complex<double> c1{}, c2{}, vu{};
    double euu = 0.0, evv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c1 += rx[i] * std::conj(u[i]);
        c2 += rx[i] * std::conj(v[i]);
        vu += v[i] * std::conj(u[i]);
        euu += std::norm(u[i]);
        evv += std::norm(v[i]);
    }
    const double det = euu * evv - std::norm(vu);
    ComplexSignal out(rx.begin(), rx.begin() + n);
    if (det <= 1e-12 * euu * evv || euu <= 0.0 || evv <= 0.0) {
        return subtract_reference(out, ComplexSignal(u.begin(), u.begin() + n), 0);
    }
    const std::complex<double> a = (c1 * evv - c2 * vu) / det;
    const std::complex<double> b = (c2 * euu - c1 * std::conj(vu)) / det;
    for (std::size_t i = 0; i < n; ++i) out[i] -= a * u[i] + b * v[i];
    return out;
}

} // namespace

std::complex<double> estimate_gain(const ComplexSignal& received, const ComplexSignal& reference,
                                   std::size_t offset) {
    if (reference.empty()) throw std::invalid_argument("estimate_gain: empty reference");
    if (offset + reference.size() > received.size())
        throw std::invalid_argument("estimate_gain: window out of bounds");
    std::complex<double> num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        num += received[offset + i] * std::conj(reference[i]);
        den += std::norm(reference[i]);
    }
    if (den <= 0.0) throw std::invalid_argument("estimate_gain: zero-power reference");
    return num / den;
}

ComplexSignal subtract_reference(const ComplexSignal& received, const ComplexSignal& reference,
                                 std::size_t offset, std::complex<double>* gain_out) {
    const auto g = estimate_gain(received, reference, offset);
    ComplexSignal out = received;
    for (std::size_t i = 0; i < reference.size(); ++i) out[offset + i] -= g * reference[i];
    // least-squares projection: the window's power cannot grow
    const double before = window_power(received, offset, reference.size());
    const double after = window_power(out, offset, reference.size());
    if (after > before * (1.0 + 1e-9) + 1e-300)
        throw std::logic_error("subtract_reference: residual power grew");
    if (gain_out) *gain_out = g;
    return out;
}

std::vector<int> pilot_equalized_demod(const ComplexSignal& burst, const OfdmConfig& cfg,
                                       const std::string& app) {
    const auto per_symbol = ofdm_extract_bins(burst, cfg, app);
    if (per_symbol.size() < 2)
        throw std::invalid_argument("pilot_equalized_demod: burst has no payload symbols");
    const auto pilot = map_bits(pilot_bits(cfg, app), cfg.modulation);

    std::vector<std::complex<double>> h(pilot.size());
    for (std::size_t i = 0; i < pilot.size(); ++i) {
        const auto y = per_symbol[0][i];
        h[i] = std::abs(pilot[i]) > 0.0 ? y / pilot[i] : std::complex<double>{0.0, 0.0};
    }

    std::vector<int> bits;
    std::vector<std::complex<double>> eq(pilot.size());
    for (std::size_t sym = 1; sym < per_symbol.size(); ++sym) {
        for (std::size_t i = 0; i < pilot.size(); ++i) {
            const auto hk = h[i];
            eq[i] = std::norm(hk) > 0.0 ? per_symbol[sym][i] / hk
                                        : std::complex<double>{0.0, 0.0};
        }
        const auto b = demap_symbols(eq, cfg.modulation);
        bits.insert(bits.end(), b.begin(), b.end());
    }
    return bits;
}

SicResult sic_decode(const ComplexSignal& received, const ComplexSignal& outer_reference,
                     const OfdmConfig& inner_cfg, const std::string& inner_app,
                     const NomaConfig& noma) {
    (void)noma; // the LS gain absorbs the power split; cfg kept for symmetry
    if (outer_reference.size() > received.size())
        throw std::invalid_argument("sic_decode: outer reference longer than received");
    SicResult res;
    const double rx_power = mean_power(received);

    ComplexSignal residual = subtract_reference(received, outer_reference, 0);
    res.stages.push_back({"outer", ratio_db(mean_power(residual), rx_power)});

    residual.resize(outer_reference.size());
    res.inner_bits = pilot_equalized_demod(residual, inner_cfg, inner_app);

    // peel the inner layer too, refitting both gains jointly: with exact bits
    // the regenerated pair cancels the burst to numerical zero
    const auto inner_wave = ofdm_burst(res.inner_bits, inner_cfg, inner_app);
    const ComplexSignal window(received.begin(),
                               received.begin() + static_cast<long long>(outer_reference.size()));
    const ComplexSignal leftover = subtract_pair(window, outer_reference, inner_wave);
    res.stages.push_back({"inner", ratio_db(mean_power(leftover), rx_power)});
    res.residual_power_db = res.stages.back().residual_power_db;
    return res;
}

SicResult sic_decode_decision_directed(const ComplexSignal& received, const OfdmConfig& outer_cfg,
                                       const std::string& outer_app, const OfdmConfig& inner_cfg,
                                       const std::string& inner_app, const NomaConfig& noma) {
    if (noma.power_split_db < 3.0)
        throw std::invalid_argument(
            "sic_decode: decision-directed mode needs a power split of at least 3 dB");
    SicResult res;
    const double rx_power = mean_power(received);

    const auto outer_bits = pilot_equalized_demod(received, outer_cfg, outer_app);
    res.outer_symbols = map_bits(outer_bits, outer_cfg.modulation);
    const auto outer_wave = ofdm_burst(outer_bits, outer_cfg, outer_app);

    ComplexSignal residual = subtract_reference(received, outer_wave, 0);
    res.stages.push_back({"outer", ratio_db(mean_power(residual), rx_power)});

    residual.resize(outer_wave.size());
    res.inner_bits = pilot_equalized_demod(residual, inner_cfg, inner_app);

    const auto inner_wave = ofdm_burst(res.inner_bits, inner_cfg, inner_app);
    const ComplexSignal window(received.begin(),
                               received.begin() + static_cast<long long>(outer_wave.size()));
    const ComplexSignal leftover = subtract_pair(window, outer_wave, inner_wave);
    res.stages.push_back({"inner", ratio_db(mean_power(leftover), rx_power)});
    res.residual_power_db = res.stages.back().residual_power_db;
    return res;
}

DelayEstimate matched_filter_delay(const ComplexSignal& signal, const ComplexSignal& reference,
                                   double threshold_k) {
    if (reference.empty() || signal.size() < reference.size())
        throw std::invalid_argument("matched_filter_delay: reference longer than signal");
    const double ref_power = mean_power(reference) * static_cast<double>(reference.size());
    if (ref_power <= 0.0) throw std::invalid_argument("matched_filter_delay: zero-power reference");
    double sig_energy = 0.0;
    for (const auto& x : signal) sig_energy += std::norm(x);
    if (sig_energy <= 0.0) throw std::invalid_argument("matched_filter_delay: zero-power signal");

    const auto corr = cross_correlate(signal, reference);

    // per-lag window energy via prefix sums, for the normalized metric
    std::vector<double> prefix(signal.size() + 1, 0.0);
    for (std::size_t i = 0; i < signal.size(); ++i) prefix[i + 1] = prefix[i] + std::norm(signal[i]);
    const double ref_norm = std::sqrt(ref_power);

    std::vector<double> metric(corr.size(), 0.0);
    for (std::size_t lag = 0; lag < corr.size(); ++lag) {
        const double win = prefix[lag + reference.size()] - prefix[lag];
        if (win > 0.0) metric[lag] = std::abs(corr[lag]) / (ref_norm * std::sqrt(win));
    }

    const auto peak_it = std::max_element(metric.begin(), metric.end());
    const std::size_t peak = static_cast<std::size_t>(peak_it - metric.begin());

    // CFAR-style rule over lags away from the peak
    constexpr long long guard = 8;
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t lag = 0; lag < metric.size(); ++lag) {
        if (std::llabs(static_cast<long long>(lag) - static_cast<long long>(peak)) <= guard)
            continue;
        sum += metric[lag];
        sum2 += metric[lag] * metric[lag];
        ++n;
    }
    DelayEstimate est;
    est.delay_samples = static_cast<long long>(peak);
    est.peak_metric = *peak_it;
    if (n >= 2) {
        const double mean = sum / n;
        const double var = std::max(0.0, sum2 / n - mean * mean);
        est.threshold = mean + threshold_k * std::sqrt(var);
    } else {
        est.threshold = 0.0; // degenerate lag space: any peak counts
    }
    // floor keeps an all-zero residual from "detecting" at threshold 0
    est.threshold = std::max(est.threshold, 1e-9);
    est.detected = est.peak_metric >= est.threshold;
    return est;
}

RadarExtract extract_radar_return(const ComplexSignal& received, const OfdmConfig& comm_cfg,
                                  const std::string& comm_app, int n_data_symbols,
                                  const ComplexSignal& radar_reference, double threshold_k) {
    if (n_data_symbols < 1)
        throw std::invalid_argument("extract_radar_return: need at least one payload symbol");
    const std::size_t burst_len =
        static_cast<std::size_t>(n_data_symbols + 1) * comm_cfg.symbol_len();
    if (burst_len > received.size())
        throw std::invalid_argument("extract_radar_return: received shorter than the comm burst");

    RadarExtract out;
    // pilot check: does the known pilot actually explain the front of the
    // signal? If not, the comm-dominant assumption is wrong; skip cancellation.
    const auto pilot_wave = ofdm_modulate(pilot_bits(comm_cfg, comm_app), comm_cfg, comm_app);
    const auto pilot_res = subtract_reference(received, pilot_wave, 0);
    const double pilot_in = window_power(received, 0, pilot_wave.size());
    const double pilot_out = window_power(pilot_res, 0, pilot_wave.size());
    const bool pilot_fits = pilot_in > 0.0 && pilot_out <= 0.5 * pilot_in;

    if (pilot_fits) {
        ComplexSignal burst(received.begin(), received.begin() + burst_len);
        const auto bits = pilot_equalized_demod(burst, comm_cfg, comm_app);
        const auto regen = ofdm_burst(bits, comm_cfg, comm_app);
        out.residual = subtract_reference(received, regen, 0);
        out.comm_cancelled = true;
    } else {
        out.residual = received;
        out.comm_cancelled = false;
    }
    out.delay = matched_filter_delay(out.residual, radar_reference, threshold_k);
    return out;
}

ComplexSignal cancel_jam(const ComplexSignal& received, const TransecKey& key,
                         std::size_t offset) {
    if (offset >= received.size()) throw std::invalid_argument("cancel_jam: offset out of bounds");
    const auto jam = transec_jam(key, received.size() - offset);
    return subtract_reference(received, jam, offset);
}

} // namespace vemo
