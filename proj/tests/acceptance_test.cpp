// Acceptance gate: every release-blocking property, one pass/fail line each,
// exit code = number of failures. Tolerances are pinned here, not in flags.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <variant>
#include <vector>

#include "support/dissem_oracle.hpp"
#include "support/random_scenario.hpp"
#include "vemo/controlplane.hpp"
#include "vemo/metrics.hpp"
#include "vemo/receiver.hpp"
#include "vemo/rng.hpp"
#include "vemo/scheduler.hpp"
#include "vemo/sim.hpp"
#include "vemo/waveform.hpp"

using namespace vemo;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

OfdmConfig split_cfg() {
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

double band_power(const ComplexSignal& sig, const OfdmConfig& cfg, const std::string& app) {
    double p = 0.0;
    for (const auto& sym : ofdm_extract_bins(sig, cfg, app))
        for (const auto& v : sym) p += std::norm(v);
    return p;
}

// ---- 1. scheduler validity fuzz -------------------------------------------

bool criterion1(std::string& detail) {
    const auto t0 = Clock::now();
    const int n = 1000;
    int valid = 0;
    for (int t = 0; t < n; ++t) {
        auto eng = rng::engine(rng::derive(101, "fuzz", t));
        const auto s = testgen::random_scenario(eng, testgen::Limits{});
        const auto built = build_schedule(s, 60, rng::derive(102, "build", t));
        valid += validate_schedule(s, built.schedule).empty();
    }
    const double dt = seconds_since(t0);
    std::ostringstream ss;
    ss << valid << "/" << n << " schedules valid in " << dt << " s (limit 60 s)";
    detail = ss.str();
    return valid == n && dt <= 60.0;
}

// ---- 2. oracle equivalence on tiny scenarios -------------------------------

bool criterion2(std::string& detail) {
    const auto t0 = Clock::now();
    const int wanted = 200;
    int used = 0, exact = 0, attempts = 0;
    double worst_ratio = 1.0;
    bool all_within = true, oracle_sane = true;
    while (used < wanted && attempts < 2000) {
        auto eng = rng::engine(rng::derive(201, "tiny", attempts));
        ++attempts;
        const auto s = testgen::random_scenario(eng, testgen::tiny_limits());
        Schedule opt_sched;
        try {
            opt_sched = exhaustive_optimal(s);
        } catch (const CapExceeded&) {
            continue; // refusal, not an answer: draw another scenario
        }
        ++used;
        const double opt = utility(s, opt_sched).total;
        const auto built = build_schedule(s, 60, rng::derive(202, "build", used));
        const double got = utility(s, built.schedule).total;
        if (got > opt + 1e-9) oracle_sane = false;
        if (std::abs(got - opt) <= 1e-9) {
            ++exact;
        } else if (opt > 0.0) {
            worst_ratio = std::min(worst_ratio, got / opt);
            if (got < 0.95 * opt - 1e-9) all_within = false;
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream ss;
    ss << used << " instances, " << exact << " exactly optimal (need >= 180), worst ratio "
       << worst_ratio << " (need >= 0.95), " << dt << " s (limit 300 s)";
    detail = ss.str();
    return used == wanted && oracle_sane && all_within && exact >= 180 && dt <= 300.0;
}

// ---- 3. reference-scene schedule shape -------------------------------------

bool criterion3(std::string& detail) {
    const auto s = parse_scenario(slurp(std::string(VEMO_DATA_DIR) + "/fig4.scn"));
    const auto built = build_schedule(s, 200, 7);
    if (!validate_schedule(s, built.schedule).empty()) {
        detail = "built schedule does not validate";
        return false;
    }

    // (a) spatially separated receivers hear the same dwell at different epochs
    std::map<std::string, std::map<int, std::set<int>>> echo_epochs; // task -> tx -> rx epochs
    for (const auto& [key, acts] : built.schedule.cells)
        for (const auto& a : acts)
            if (a.kind == Activity::Kind::rx_radar_echo)
                echo_epochs[a.task][a.tx_epoch].insert(key.epoch);
    bool spread = false;
    for (const auto& [task, by_tx] : echo_epochs)
        for (const auto& [tx, rxs] : by_tx)
            if (rxs.size() >= 2) spread = true;

    // (b) the jam window over epochs 2 and 3 has at least one jammer each
    std::map<int, int> jammers_at;
    for (const auto& [key, acts] : built.schedule.cells)
        for (const auto& a : acts)
            if (a.kind == Activity::Kind::tx_jam) ++jammers_at[key.epoch];
    const bool covered = jammers_at[2] >= 1 && jammers_at[3] >= 1;

    std::ostringstream ss;
    ss << "echo rx epochs per dwell: {";
    for (const auto& [task, by_tx] : echo_epochs)
        for (const auto& [tx, rxs] : by_tx) {
            ss << " tx" << tx << ":[";
            for (int e : rxs) ss << e << " ";
            ss << "]";
        }
    ss << " }, jammers at epoch 2: " << jammers_at[2] << ", epoch 3: " << jammers_at[3];
    detail = ss.str();
    return spread && covered;
}

// ---- 4. sic exactness and the post-cancellation ber oracle -----------------

bool criterion4(std::string& detail) {
    const auto t0 = Clock::now();
    const auto cfg = split_cfg();
    const NomaConfig noma{10.0};
    const int n_data = 20;
    const std::size_t bits_per_burst = static_cast<std::size_t>(n_data) * 2 * 40;

    // noiseless, known outer, arbitrary complex channel: exact cancellation
    double noiseless_resid = 0.0;
    {
        const auto payload = pn_bits(4101, bits_per_burst);
        const auto inner = ofdm_burst(payload, cfg, "comm");
        const auto outer = radar_pulse(cfg, 4102, n_data + 1);
        auto rx = noma_combine(outer, inner, noma);
        const std::complex<double> g{0.83, -0.4};
        for (auto& z : rx) z *= g;
        const auto res = sic_decode(rx, outer, cfg, "comm", noma);
        noiseless_resid = res.residual_power_db;
        if (res.inner_bits != payload || noiseless_resid > -100.0) {
            std::ostringstream ss;
            ss << "noiseless residual " << noiseless_resid << " dB (need <= -100)";
            detail = ss.str();
            return false;
        }
    }

    // snr 15 dB, power split 10 dB, >= 1e6 bits against the q-function at the
    // post-cancellation effective snr (one-shot pilot costs 3 dB)
    const double snr = 15.0;
    const double noise = std::pow(10.0, -snr / 10.0);
    const double es = [&] {
        const auto burst = ofdm_burst(pn_bits(4103, bits_per_burst), cfg, "comm");
        const auto bins = ofdm_extract_bins(burst, cfg, "comm");
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 1; k < bins.size(); ++k)
            for (const auto& v : bins[k]) {
                acc += std::norm(v);
                ++count;
            }
        return (1.0 - noma.alpha()) * acc / static_cast<double>(count);
    }();
    const double gamma_eff = es / (cfg.n_subcarriers * noise) / 2.0;
    const double oracle = q_function(std::sqrt(gamma_eff));

    const int bursts = 640; // 640 * 1600 bits = 1.024e6
    long long errs = 0, total = 0;
    double resid_sum = 0.0;
    for (int t = 0; t < bursts; ++t) {
        const std::uint64_t ts = rng::derive(401, "sic", t);
        const auto payload = pn_bits(rng::derive(ts, "bits"), bits_per_burst);
        const auto inner = ofdm_burst(payload, cfg, "comm");
        const auto outer = radar_pulse(cfg, rng::derive(ts, "outer"), n_data + 1);
        auto rx = noma_combine(outer, inner, noma);
        auto g = rng::engine(rng::derive(ts, "noise"));
        for (auto& z : rx) z += rng::cgaussian(g, noise);
        const auto sic = sic_decode(rx, outer, cfg, "comm", noma);
        resid_sum += sic.residual_power_db;
        for (std::size_t i = 0; i < payload.size(); ++i) errs += sic.inner_bits[i] != payload[i];
        total += static_cast<long long>(payload.size());
    }
    const double measured = static_cast<double>(errs) / static_cast<double>(total);
    const double rel = std::abs(measured - oracle) / oracle;
    const double dt = seconds_since(t0);

    std::ostringstream ss;
    ss << "noiseless residual " << noiseless_resid << " dB; ber " << measured << " vs oracle "
       << oracle << " (rel " << rel << ", need <= 0.5) over " << total << " bits, mean residual "
       << resid_sum / bursts << " dB, " << dt << " s (limit 120 s)";
    detail = ss.str();
    return rel <= 0.5 && total >= 1'000'000 && dt <= 120.0;
}

// ---- 5. dynamic-range gain of demod-regenerate-subtract --------------------

bool criterion5(std::string& detail) {
    const auto t0 = Clock::now();
    auto cfg = split_cfg();
    std::vector<int> all(64);
    std::iota(all.begin(), all.end(), 0);
    cfg.allocation["comm"] = all; // full-band comm: the burst masks the echo

    const int n_data = 6, trials = 500;
    const std::size_t margin = 400;
    const std::size_t bits_n = static_cast<std::size_t>(n_data) * 2 * 64;
    const double echo_amp = std::pow(10.0, -30.0 / 20.0); // comm 30 dB above echo
    const double threshold_k = 6.0;

    int hits_canc = 0, hits_raw = 0, false_alarms = 0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t ts = rng::derive(501, "rext", t);
        const auto burst = ofdm_burst(pn_bits(rng::derive(ts, "bits"), bits_n), cfg, "comm");
        const auto pulse = radar_pulse(cfg, rng::derive(ts, "pulse"), n_data + 1);
        auto g = rng::engine(rng::derive(ts, "chan"));
        const std::size_t delay = g() % margin;
        ComplexSignal rx(burst.size() + margin);
        for (std::size_t i = 0; i < burst.size(); ++i) rx[i] += burst[i];
        for (std::size_t i = 0; i < pulse.size(); ++i) rx[delay + i] += echo_amp * pulse[i];
        for (auto& z : rx) z += rng::cgaussian(g, 1e-6);

        const auto ok = [&](const DelayEstimate& d) {
            return d.detected && std::llabs(d.delay_samples - (long long)delay) <= 1;
        };
        hits_canc += ok(extract_radar_return(rx, cfg, "comm", n_data, pulse, threshold_k).delay);
        hits_raw += ok(matched_filter_delay(rx, pulse, threshold_k));

        // matched false-alarm setting: the same threshold on noise-only input
        ComplexSignal noise_rx(rx.size());
        auto gn = rng::engine(rng::derive(ts, "noiseonly"));
        for (auto& z : noise_rx) z = rng::cgaussian(gn, 1.0);
        false_alarms += matched_filter_delay(noise_rx, pulse, threshold_k).detected;
    }
    const double pd_canc = static_cast<double>(hits_canc) / trials;
    const double pd_raw = static_cast<double>(hits_raw) / trials;
    const double fa = static_cast<double>(false_alarms) / trials;
    const double dt = seconds_since(t0);

    std::ostringstream ss;
    ss << "Pd with cancellation " << pd_canc << " (need >= 0.9), without " << pd_raw
       << " (need <= 0.1), noise-only false alarms " << fa << " (need < 0.01), " << dt
       << " s (limit 180 s)";
    detail = ss.str();
    return pd_canc >= 0.9 && pd_raw <= 0.1 && fa < 0.01 && dt <= 180.0;
}

// ---- 6. keyed jam suppression separation -----------------------------------

bool criterion6(std::string& detail) {
    const auto key = transec_key_from_hex("5eed5eed5eed5eed5eed5eed5eed5eed");
    const auto wrong = transec_key_from_hex("0badc0de0badc0de0badc0de0badc0de");
    const std::size_t n = 4096;
    const int trials = 200;
    const double noise = std::pow(10.0, -20.0 / 10.0); // snr 20 dB
    const auto jam = transec_jam(key, n);

    double corr_db = 0.0, wrong_db = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto g = rng::engine(rng::derive(601, "transec", t));
        ComplexSignal noise_vec(n), rx(n);
        for (auto& z : noise_vec) z = rng::cgaussian(g, noise);
        for (std::size_t i = 0; i < n; ++i) rx[i] = jam[i] + noise_vec[i];
        const auto measure = [&](const TransecKey& k) {
            const auto after = cancel_jam(rx, k);
            double p = 0.0;
            for (std::size_t i = 0; i < n; ++i) p += std::norm(after[i] - noise_vec[i]);
            return db10(1.0 / std::max(p / static_cast<double>(n), 1e-30));
        };
        corr_db += measure(key);
        wrong_db += measure(wrong);
    }
    corr_db /= trials;
    wrong_db /= trials;

    std::ostringstream ss;
    ss << "correct-key suppression " << corr_db << " dB, wrong-key " << wrong_db
       << " dB, separation " << corr_db - wrong_db << " dB (need >= 20) over " << trials
       << " trials";
    detail = ss.str();
    return corr_db - wrong_db >= 20.0;
}

// ---- 7. papr ordering: ofdm vs constant-envelope pn ------------------------

bool criterion7(std::string& detail) {
    OfdmConfig cfg;
    cfg.n_subcarriers = 64;
    cfg.cp_len = 16;
    std::vector<int> all(64);
    std::iota(all.begin(), all.end(), 0);
    cfg.allocation["comm"] = all;

    const std::size_t symbols = 100'000;
    ComplexSignal pooled;
    pooled.reserve(symbols * cfg.symbol_len());
    const std::size_t chunk = 1000;
    for (std::size_t done = 0; done < symbols; done += chunk) {
        const auto bits = pn_bits(rng::derive(701, "papr", done), chunk * 2 * 64);
        const auto sig = ofdm_modulate(bits, cfg, "comm");
        pooled.insert(pooled.end(), sig.begin(), sig.end());
    }
    const double ofdm = papr_db(pooled, 99.9);
    const std::size_t samples = pooled.size();
    pooled.clear();
    pooled.shrink_to_fit();

    const auto chips = transec_jam(transec_key_from_hex("5eed5eed5eed5eed5eed5eed5eed5eed"),
                                   samples);
    const double pn = papr_db(chips, 99.9);

    std::ostringstream ss;
    ss << "ofdm-64 99.9pct papr " << ofdm << " dB vs pn " << pn << " dB over " << symbols
       << " symbols (need gap >= 6 dB)";
    detail = ss.str();
    return ofdm - pn >= 6.0;
}

// ---- 8. partition isolation and cp round trips -----------------------------

bool criterion8(std::string& detail) {
    double worst_leak = -1e9;
    {
        const auto cfg = split_cfg();
        const auto comm = ofdm_burst(pn_bits(801, 10 * 2 * 40), cfg, "comm");
        const auto radar = ofdm_burst(pn_bits(802, 10 * 2 * 24), cfg, "radar");
        worst_leak = std::max(db10(band_power(comm, cfg, "radar") / band_power(comm, cfg, "comm")),
                              db10(band_power(radar, cfg, "comm") / band_power(radar, cfg, "radar")));
    }

    int combos = 0, exact = 0;
    for (int cp = 0; cp <= 16; ++cp) {
        OfdmConfig cfg = split_cfg();
        cfg.cp_len = cp;
        for (const std::string app : {"comm", "radar"}) {
            const std::size_t nbits = 6 * 2 * cfg.bins(app).size();
            const auto bits = pn_bits(rng::derive(803, app, cp), nbits);
            const auto burst = ofdm_burst(bits, cfg, app);
            for (int d = 0; d <= cp; ++d) {
                ++combos;
                ComplexSignal delayed(burst.size());
                for (std::size_t i = d; i < delayed.size(); ++i) delayed[i] = burst[i - d];
                exact += pilot_equalized_demod(delayed, cfg, app) == bits;
            }
        }
    }

    std::ostringstream ss;
    ss << "worst cross-band leakage " << worst_leak << " dB (need <= -100); " << exact << "/"
       << combos << " cp/delay round trips bit-exact";
    detail = ss.str();
    return worst_leak <= -100.0 && exact == combos;
}

// ---- 9. dissemination oracle and outage monotonicity -----------------------

bool criterion9(std::string& detail) {
    int dissem_ok = 0, schedules = 0;
    bool outage_ok = true;
    int outage_hits = 0, outage_clean = 0;

    for (int t = 0; t < 100; ++t) {
        auto eng = rng::engine(rng::derive(901, "cp", t));
        auto s = testgen::random_scenario(eng, testgen::Limits{});
        if (t % 2 == 0) s = inject_control_traffic(s, s.platforms.front().id);
        const auto built = build_schedule(s, 60, rng::derive(902, "build", t));
        ++schedules;

        const auto& orch = s.platforms.front().id;
        const auto rep = check_dissemination(s, built.schedule, orch);
        const auto oracle = testgen::dissemination_oracle(s, built.schedule, orch);
        if (rep.informed_epoch == oracle.informed && rep.feasible == oracle.feasible) ++dissem_ok;

        // equality leg: outage nothing
        const auto clean = simulate_outage(s, built.schedule, {});
        if (!clean.failed.empty() || clean.degraded.total != clean.baseline.total)
            outage_ok = false;
        else
            ++outage_clean;

        // degradation leg: outage a random subset of scheduled transmissions
        OutageSet outage;
        for (const auto& [key, acts] : built.schedule.cells)
            for (const auto& a : acts) {
                std::string task_id;
                if (a.kind == Activity::Kind::tx_comm)
                    task_id = a.task;
                else if (a.kind == Activity::Kind::tx_radar && !a.combined_task.empty())
                    task_id = a.combined_task;
                else
                    continue;
                if (eng() % 2 == 0) continue;
                const auto& c = std::get<CommLink>(s.find_task(task_id)->body);
                outage.insert({key.epoch, c.src, c.dst});
            }
        const auto rep2 = simulate_outage(s, built.schedule, outage);
        if (rep2.degraded.total > rep2.baseline.total + 1e-12) outage_ok = false;
        if (rep2.failed.empty()) {
            if (rep2.degraded.total != rep2.baseline.total) outage_ok = false;
        } else {
            ++outage_hits;
            if (!(rep2.degraded.total < rep2.baseline.total)) outage_ok = false;
        }
    }

    std::ostringstream ss;
    ss << dissem_ok << "/" << schedules << " dissemination reports match the oracle; outage: "
       << outage_clean << " clean-equal, " << outage_hits << " degraded-strict";
    detail = ss.str();
    return dissem_ok == schedules && outage_ok && outage_hits > 0;
}

// ---- 10. end-to-end cli determinism ----------------------------------------

bool criterion10(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() /
        ("vemo-accept-" + std::to_string(rng::splitmix64(static_cast<std::uint64_t>(::getpid()))));
    fs::create_directories(dir);
    const std::string out1 = (dir / "run1.json").string();
    const std::string out2 = (dir / "run2.json").string();
    const std::string cmd_base = std::string("\"") + VEMO_CLI_PATH + "\" simulate \"" +
                                 VEMO_DATA_DIR + "/fig4.scn\" --seed 7";

    const int rc1 = std::system((cmd_base + " > \"" + out1 + "\" 2>/dev/null").c_str());
    const int rc2 = std::system((cmd_base + " > \"" + out2 + "\" 2>/dev/null").c_str());
    std::string a, b;
    bool read_ok = true;
    try {
        a = slurp(out1);
        b = slurp(out2);
    } catch (const std::exception&) {
        read_ok = false;
    }
    fs::remove_all(dir);

    std::ostringstream ss;
    ss << "two seeded runs: exit codes " << rc1 << "/" << rc2 << ", " << a.size() << " vs "
       << b.size() << " bytes, " << (a == b ? "byte-identical" : "DIFFER");
    detail = ss.str();
    return read_ok && rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        bool (*fn)(std::string&);
    };
    const Entry entries[] = {
        {1, "scheduler validity fuzz", criterion1},
        {2, "oracle equivalence on tiny scenarios", criterion2},
        {3, "reference-scene echo epochs and jam cover", criterion3},
        {4, "sic exact cancellation and ber oracle", criterion4},
        {5, "radar extraction dynamic-range gain", criterion5},
        {6, "keyed jam suppression separation", criterion6},
        {7, "papr ordering ofdm vs pn", criterion7},
        {8, "partition isolation and cp round trips", criterion8},
        {9, "dissemination oracle and outage monotonicity", criterion9},
        {10, "cli determinism", criterion10},
    };

    int failures = 0;
    for (const auto& e : entries) {
        const auto t0 = Clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = e.fn(detail);
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        const double dt = seconds_since(t0);
        std::printf("[%s] criterion %d: %s: %s [%.1f s]\n", ok ? "PASS" : "FAIL", e.id, e.name,
                    detail.c_str(), dt);
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures == 0)
        std::printf("all %zu criteria passed\n", std::size(entries));
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
