#include "doctest.h"

#include <cmath>
#include <complex>
#include <numeric>

#include "vemo/metrics.hpp"
#include "vemo/receiver.hpp"
#include "vemo/rng.hpp"
#include "vemo/signal.hpp"
#include "vemo/waveform.hpp"

using namespace vemo;

namespace {

OfdmConfig default_cfg() {
    OfdmConfig cfg;
    cfg.n_subcarriers = 64;
    cfg.cp_len = 16;
    std::vector<int> comm(40), radar(24);
    std::iota(comm.begin(), comm.end(), 0);
    std::iota(radar.begin(), radar.end(), 40);
    cfg.allocation["comm"] = comm;
    cfg.allocation["radar"] = radar;
    return cfg;
}

// comm spanning the whole band with the radar reference on its usual
// sub-band: the §-style dynamic-range scene where the burst masks the echo
OfdmConfig overlapped_cfg() {
    OfdmConfig cfg = default_cfg();
    std::vector<int> all(64);
    std::iota(all.begin(), all.end(), 0);
    cfg.allocation["comm"] = all;
    return cfg;
}

std::size_t comm_bits(const OfdmConfig& cfg, int n_data) {
    return static_cast<std::size_t>(n_data) * 2 * cfg.bins("comm").size();
}

} // namespace

TEST_CASE("estimate_gain recovers exact scales") {
    const auto ref = transec_jam(transec_key_from_hex("12"), 512);
    ComplexSignal rx(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) rx[i] = 2.5 * ref[i];
    const auto g = estimate_gain(rx, ref);
    CHECK(std::abs(g - std::complex<double>(2.5, 0.0)) < 1e-12);

    const ComplexSignal orth_rx{{1.0, 0.0}, {-1.0, 0.0}};
    const ComplexSignal orth_ref{{1.0, 0.0}, {1.0, 0.0}};
    CHECK(std::abs(estimate_gain(orth_rx, orth_ref)) < 1e-12);

    CHECK_THROWS(estimate_gain(rx, ComplexSignal{}));
    CHECK_THROWS(estimate_gain(rx, ref, 1)); // window runs past the end
    CHECK_THROWS(estimate_gain(rx, ComplexSignal(8, {0.0, 0.0})));
}

TEST_CASE("estimate_gain error stays under 2% at 20 dB snr") {
    const auto ref = transec_jam(transec_key_from_hex("34"), 4096);
    const std::complex<double> g{0.7, -0.3};
    const double noise = std::norm(g) / 100.0; // per-sample snr 20 dB
    int good = 0;
    for (int t = 0; t < 1000; ++t) {
        auto eng = rng::engine(rng::derive(1, "gain", t));
        ComplexSignal rx(ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            rx[i] = g * ref[i] + rng::cgaussian(eng, noise);
        const auto est = estimate_gain(rx, ref);
        good += std::abs(est - g) / std::abs(g) < 0.02;
    }
    CHECK(good >= 950);
}

TEST_CASE("subtract_reference never raises the window power") {
    auto eng = rng::engine(31);
    for (int t = 0; t < 50; ++t) {
        ComplexSignal rx(300), ref(200);
        for (auto& z : rx) z = rng::cgaussian(eng, 1.0);
        for (auto& z : ref) z = rng::cgaussian(eng, 1.0);
        const std::size_t offset = t % 100;
        const auto out = subtract_reference(rx, ref, offset);
        double before = 0.0, after = 0.0;
        for (std::size_t i = offset; i < offset + ref.size(); ++i) {
            before += std::norm(rx[i]);
            after += std::norm(out[i]);
        }
        CHECK(after <= before * (1.0 + 1e-9));
    }
}

TEST_CASE("known-outer sic peels both layers exactly in the noiseless case") {
    const auto cfg = default_cfg();
    const NomaConfig noma{10.0};
    const int n_data = 20;
    const auto payload = pn_bits(606, comm_bits(cfg, n_data));
    const auto inner = ofdm_burst(payload, cfg, "comm");
    const auto outer = radar_pulse(cfg, 707, n_data + 1);
    auto combined = noma_combine(outer, inner, noma);
    const std::complex<double> g{0.8, 0.45};
    for (auto& z : combined) z *= g;

    const auto res = sic_decode(combined, outer, cfg, "comm", noma);
    CHECK(res.inner_bits == payload);
    REQUIRE(res.stages.size() == 2);
    CHECK(res.stages[0].layer == "outer");
    CHECK(res.stages[1].layer == "inner");
    // after the outer peel the inner layer remains (~ -10.4 dB at r = 10)
    CHECK(res.stages[0].residual_power_db < -9.0);
    CHECK(res.stages[0].residual_power_db > -12.0);
    CHECK(res.residual_power_db <= -100.0);
}

TEST_CASE("sic residual log stays nonpositive under noise") {
    const auto cfg = default_cfg();
    const NomaConfig noma{10.0};
    const int n_data = 12;
    for (double snr : {5.0, 15.0, 30.0}) {
        const auto payload = pn_bits(11, comm_bits(cfg, n_data));
        const auto inner = ofdm_burst(payload, cfg, "comm");
        const auto outer = radar_pulse(cfg, 12, n_data + 1);
        auto rx = noma_combine(outer, inner, noma);
        auto eng = rng::engine(rng::derive(2, "sicnoise", (std::uint64_t)snr));
        for (auto& z : rx) z += rng::cgaussian(eng, std::pow(10.0, -snr / 10.0));
        const auto res = sic_decode(rx, outer, cfg, "comm", noma);
        CHECK(res.residual_power_db <= 1e-9);
        CHECK(res.stages.size() == 2);
        CHECK(res.stages[1].residual_power_db <= res.stages[0].residual_power_db + 1e-9);
    }
}

TEST_CASE("sic with an absent inner layer decodes to coin flips") {
    const auto cfg = default_cfg();
    const NomaConfig noma{10.0};
    const int n_data = 20;
    const auto outer = radar_pulse(cfg, 13, n_data + 1);
    ComplexSignal rx(outer.size());
    auto eng = rng::engine(14);
    for (std::size_t i = 0; i < rx.size(); ++i)
        rx[i] = std::sqrt(noma.alpha()) * outer[i] + rng::cgaussian(eng, 1e-6);

    const auto res = sic_decode(rx, outer, cfg, "comm", noma);
    const auto would_be = pn_bits(15, comm_bits(cfg, n_data));
    const double b = ber(res.inner_bits, would_be);
    CHECK(b > 0.35);
    CHECK(b < 0.65);
}

TEST_CASE("decision-directed sic handles comm-on-comm and refuses thin splits") {
    const auto cfg = default_cfg();
    const int n_data = 16;
    const auto outer_bits = pn_bits(21, comm_bits(cfg, n_data));
    const auto inner_bits = pn_bits(22, comm_bits(cfg, n_data));
    const auto outer = ofdm_burst(outer_bits, cfg, "comm");
    const auto inner = ofdm_burst(inner_bits, cfg, "comm");
    const NomaConfig noma{10.0};
    const auto rx = noma_combine(outer, inner, noma);

    const auto res = sic_decode_decision_directed(rx, cfg, "comm", cfg, "comm", noma);
    CHECK(demap_symbols(res.outer_symbols, cfg.modulation) == outer_bits);
    CHECK(res.inner_bits == inner_bits);
    CHECK(res.residual_power_db <= -100.0);

    CHECK_THROWS_AS(sic_decode_decision_directed(rx, cfg, "comm", cfg, "comm", NomaConfig{2.9}),
                    std::invalid_argument);
}

TEST_CASE("matched filter finds exact integer lags") {
    const auto cfg = default_cfg();
    const auto pulse = radar_pulse(cfg, 33, 8);
    SUBCASE("single delayed copy") {
        ComplexSignal rx(pulse.size() + 300);
        for (std::size_t i = 0; i < pulse.size(); ++i) rx[100 + i] = 0.5 * pulse[i];
        const auto est = matched_filter_delay(rx, pulse, 6.0);
        CHECK(est.detected);
        CHECK(est.delay_samples == 100);
        CHECK(est.peak_metric == doctest::Approx(1.0).epsilon(1e-6));
        CHECK((est.peak_metric >= est.threshold) == est.detected);
    }
    SUBCASE("the stronger of two echoes wins") {
        ComplexSignal rx(pulse.size() + 300);
        for (std::size_t i = 0; i < pulse.size(); ++i) {
            rx[20 + i] += 0.8 * pulse[i];
            rx[60 + i] += 0.3 * pulse[i];
        }
        const auto est = matched_filter_delay(rx, pulse, 6.0);
        CHECK(est.detected);
        CHECK(est.delay_samples == 20);
    }
    SUBCASE("random lags are exact, noiseless") {
        auto eng = rng::engine(44);
        for (int t = 0; t < 30; ++t) {
            const std::size_t lag = eng() % 400;
            ComplexSignal rx(pulse.size() + 400);
            for (std::size_t i = 0; i < pulse.size(); ++i) rx[lag + i] = pulse[i];
            const auto est = matched_filter_delay(rx, pulse, 6.0);
            CHECK(est.delay_samples == static_cast<long long>(lag));
        }
    }
    SUBCASE("degenerate inputs throw") {
        CHECK_THROWS(matched_filter_delay(ComplexSignal(10), pulse, 6.0));
        CHECK_THROWS(matched_filter_delay(ComplexSignal(2000, {0.0, 0.0}), pulse, 6.0));
    }
}

TEST_CASE("matched filter false alarms stay under 1% at k = 6") {
    const auto cfg = default_cfg();
    const auto pulse = radar_pulse(cfg, 55, 8);
    int alarms = 0;
    for (int t = 0; t < 1000; ++t) {
        auto eng = rng::engine(rng::derive(3, "fa", t));
        ComplexSignal rx(4096);
        for (auto& z : rx) z = rng::cgaussian(eng, 1.0);
        const auto est = matched_filter_delay(rx, pulse, 6.0);
        alarms += est.detected;
        CHECK((est.peak_metric >= est.threshold) == est.detected);
    }
    CHECK(alarms < 10);
}

TEST_CASE("demod-regenerate-subtract recovers an echo buried under comm") {
    const auto cfg = overlapped_cfg();
    const int n_data = 6;
    const auto burst = ofdm_burst(pn_bits(61, comm_bits(cfg, n_data)), cfg, "comm");
    const auto pulse = radar_pulse(cfg, 62, n_data + 1);
    const double echo_amp = std::pow(10.0, -30.0 / 20.0);
    const std::size_t lag = 37;

    ComplexSignal rx(burst.size() + 400);
    for (std::size_t i = 0; i < burst.size(); ++i) rx[i] += burst[i];
    for (std::size_t i = 0; i < pulse.size(); ++i) rx[lag + i] += echo_amp * pulse[i];
    auto eng = rng::engine(63);
    for (auto& z : rx) z += rng::cgaussian(eng, 1e-6);

    const auto ext = extract_radar_return(rx, cfg, "comm", n_data, pulse, 6.0);
    CHECK(ext.comm_cancelled);
    CHECK(ext.delay.detected);
    CHECK(ext.delay.delay_samples == static_cast<long long>(lag));

    const auto raw = matched_filter_delay(rx, pulse, 6.0);
    CHECK((!raw.detected || raw.peak_metric < ext.delay.peak_metric));
}

TEST_CASE("radar extraction on comm-only input reports nothing") {
    const auto cfg = overlapped_cfg();
    const int n_data = 6;
    const auto burst = ofdm_burst(pn_bits(71, comm_bits(cfg, n_data)), cfg, "comm");
    const auto pulse = radar_pulse(cfg, 72, n_data + 1);
    ComplexSignal rx(burst.size() + 400);
    for (std::size_t i = 0; i < burst.size(); ++i) rx[i] = burst[i];
    auto eng = rng::engine(73);
    for (auto& z : rx) z += rng::cgaussian(eng, 1e-6);

    const auto ext = extract_radar_return(rx, cfg, "comm", n_data, pulse, 6.0);
    CHECK_FALSE(ext.delay.detected);
}

TEST_CASE("radar extraction falls back when the pilot does not fit") {
    const auto cfg = overlapped_cfg();
    const int n_data = 6;
    const auto pulse = radar_pulse(cfg, 82, n_data + 1);
    ComplexSignal rx(1000);
    auto eng = rng::engine(83);
    for (auto& z : rx) z = rng::cgaussian(eng, 1.0);
    const auto ext = extract_radar_return(rx, cfg, "comm", n_data, pulse, 6.0);
    CHECK_FALSE(ext.comm_cancelled);
}

TEST_CASE("jam cancellation is keyed") {
    const auto key = transec_key_from_hex("5eed5eed5eed5eed5eed5eed5eed5eed");
    const auto wrong = transec_key_from_hex("0badc0de0badc0de0badc0de0badc0de");
    const std::size_t n = 10000;
    const auto jam = transec_jam(key, n);

    SUBCASE("correct key, noiseless: residual below -100 dB") {
        ComplexSignal rx(n);
        const std::complex<double> g{1.3, -0.6};
        for (std::size_t i = 0; i < n; ++i) rx[i] = g * jam[i];
        const auto after = cancel_jam(rx, key);
        CHECK(db10(mean_power(after) / mean_power(rx)) <= -100.0);
    }
    SUBCASE("wrong key leaves the power within 1 dB") {
        ComplexSignal rx(n);
        for (std::size_t i = 0; i < n; ++i) rx[i] = jam[i];
        const auto after = cancel_jam(rx, wrong);
        CHECK(std::abs(db10(mean_power(after) / mean_power(rx))) < 1.0);
    }
    SUBCASE("correct key at 20 dB snr: suppression at least 30 dB in 95% of trials") {
        int good = 0;
        const int trials = 100;
        for (int t = 0; t < trials; ++t) {
            auto eng = rng::engine(rng::derive(4, "jamsup", t));
            ComplexSignal noise_vec(4096), rx(4096);
            for (auto& z : noise_vec) z = rng::cgaussian(eng, 1e-2);
            for (std::size_t i = 0; i < rx.size(); ++i) rx[i] = jam[i] + noise_vec[i];
            const auto after = cancel_jam(rx, key);
            double resid = 0.0;
            for (std::size_t i = 0; i < rx.size(); ++i)
                resid += std::norm(after[i] - noise_vec[i]);
            resid /= static_cast<double>(rx.size());
            good += db10(1.0 / std::max(resid, 1e-30)) >= 30.0;
        }
        CHECK(good >= 95);
    }
}

TEST_CASE("pilot equalization absorbs an arbitrary complex channel") {
    const auto cfg = default_cfg();
    const auto bits = pn_bits(91, comm_bits(cfg, 10));
    auto burst = ofdm_burst(bits, cfg, "comm");
    const std::complex<double> g = std::polar(0.35, 2.1);
    for (auto& z : burst) z *= g;
    CHECK(pilot_equalized_demod(burst, cfg, "comm") == bits);
}
