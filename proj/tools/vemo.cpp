// vemo: epoch scheduler + baseband co-simulator CLI.
//
// Exit codes: 0 success, 2 validation/usage failure, 3 infeasible or
// oracle cap exceeded.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vemo/channel.hpp"
#include "vemo/metrics.hpp"
#include "vemo/receiver.hpp"
#include "vemo/rng.hpp"
#include "vemo/scenario.hpp"
#include "vemo/schedule.hpp"
#include "vemo/scheduler.hpp"
#include "vemo/sim.hpp"
#include "vemo/waveform.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

vemo::OfdmConfig all_bins_config(int n_subcarriers, int cp_len) {
    vemo::OfdmConfig cfg;
    cfg.n_subcarriers = n_subcarriers;
    cfg.cp_len = cp_len;
    std::vector<int> bins(n_subcarriers);
    for (int i = 0; i < n_subcarriers; ++i) bins[i] = i;
    cfg.allocation["comm"] = bins;
    return cfg;
}

int cmd_schedule(const std::string& scenario_path, std::uint64_t seed, bool seed_given,
                 int budget, const std::string& out) {
    const auto s = vemo::parse_scenario(slurp(scenario_path));
    const auto result =
        vemo::build_schedule(s, budget, seed_given ? seed : s.phy.seed);
    for (const auto& [task, reason] : result.unscheduled)
        std::cerr << "unscheduled " << task << ": " << reason << "\n";
    if (out == "csv")
        std::cout << vemo::schedule_to_csv(result.schedule);
    else
        std::cout << vemo::render_schedule_table(s, result.schedule);
    if (result.schedule.empty() && !s.tasks.empty()) {
        std::cerr << "no task could be placed\n";
        return 3;
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& schedule_path,
                 std::uint64_t seed, bool seed_given, const std::string& report) {
    const auto s = vemo::parse_scenario(slurp(scenario_path));
    const std::uint64_t use_seed = seed_given ? seed : s.phy.seed;
    vemo::Schedule sched;
    if (!schedule_path.empty()) {
        sched = vemo::parse_schedule_csv(slurp(schedule_path));
    } else {
        sched = vemo::build_schedule(s, 200, use_seed).schedule;
    }
    if (const auto violations = vemo::validate_schedule(s, sched); !violations.empty()) {
        for (const auto& v : violations)
            std::cerr << v.constraint << " at " << v.platform << " epoch " << v.epoch << ": "
                      << v.detail << "\n";
        return 2;
    }
    if (report != "json") {
        std::cerr << "unknown report format \"" << report << "\"\n";
        return 2;
    }
    const auto rep = vemo::run_simulation(s, sched, use_seed);
    std::cout << vemo::render_sim_report(s, rep);
    return 0;
}

int cmd_oracle(const std::string& scenario_path, std::uint64_t cap) {
    const auto s = vemo::parse_scenario(slurp(scenario_path));
    try {
        const auto sched = vemo::exhaustive_optimal(s, cap);
        std::cout << "utility " << vemo::utility(s, sched).total << "\n";
        std::cout << vemo::render_schedule_table(s, sched);
        return 0;
    } catch (const vemo::CapExceeded& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}

void demo_papr(std::uint64_t seed) {
    std::cout << "waveform,n_subcarriers,samples,papr99p9_db\n";
    const int symbols = 2000;
    for (int n : {16, 32, 64, 128}) {
        const auto cfg = all_bins_config(n, 16);
        const auto bits = vemo::pn_bits(vemo::rng::derive(seed, "papr", n),
                                        static_cast<std::size_t>(symbols) * 2 * n);
        const auto sig = vemo::ofdm_modulate(bits, cfg, "comm");
        std::cout << "ofdm," << n << "," << sig.size() << ","
                  << vemo::papr_db(sig, 99.9) << "\n";
    }
    const auto chips =
        vemo::transec_jam(vemo::transec_key_from_hex("5eed5eed5eed5eed5eed5eed5eed5eed"),
                          static_cast<std::size_t>(symbols) * 80);
    std::cout << "pn,0," << chips.size() << "," << vemo::papr_db(chips, 99.9) << "\n";
}

// Per-bin symbol energy of the inner layer inside a NOMA combination, from a
// noiseless probe burst. The Q-function oracle runs at gamma/2: a one-shot LS
// pilot estimate costs 3 dB (1/g_eff = 1/g_data + 1/g_pilot, equal energies).
double inner_bin_energy(const vemo::OfdmConfig& cfg, const vemo::NomaConfig& noma, int n_data,
                        std::uint64_t seed) {
    const std::size_t bits_n = static_cast<std::size_t>(n_data) * 2 * cfg.bins("comm").size();
    const auto burst = vemo::ofdm_burst(vemo::pn_bits(seed, bits_n), cfg, "comm");
    const auto bins = vemo::ofdm_extract_bins(burst, cfg, "comm");
    double es = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 1; k < bins.size(); ++k)
        for (const auto& v : bins[k]) {
            es += std::norm(v);
            ++count;
        }
    return (1.0 - noma.alpha()) * es / static_cast<double>(count);
}

void demo_sic(std::uint64_t seed) {
    std::cout << "snr_db,measured_ber,oracle_ber,effective_snr_db,residual_db\n";
    vemo::PhyDefaults phy;
    const auto cfg = vemo::ofdm_config(phy);
    vemo::NomaConfig noma{10.0};
    const int n_data = 20, bursts = 120;
    const std::size_t bits_per_burst =
        static_cast<std::size_t>(n_data) * 2 * cfg.bins("comm").size();
    const double es = inner_bin_energy(cfg, noma, n_data, vemo::rng::derive(seed, "probe"));
    for (double snr : {5.0, 10.0, 15.0, 20.0, 25.0}) {
        const double noise = std::pow(10.0, -snr / 10.0);
        long long errs = 0, total = 0;
        double resid_db = 0.0;
        for (int t = 0; t < bursts; ++t) {
            const std::uint64_t ts = vemo::rng::derive(seed, "sic", (std::uint64_t)(snr * 10), t);
            const auto payload = vemo::pn_bits(vemo::rng::derive(ts, "bits"), bits_per_burst);
            const auto inner = vemo::ofdm_burst(payload, cfg, "comm");
            const auto outer = vemo::radar_pulse(cfg, vemo::rng::derive(ts, "outer"), n_data + 1);
            auto rx = vemo::noma_combine(outer, inner, noma);
            auto g = vemo::rng::engine(vemo::rng::derive(ts, "noise"));
            for (auto& z : rx) z += vemo::rng::cgaussian(g, noise);

            const auto sic = vemo::sic_decode(rx, outer, cfg, "comm", noma);
            resid_db += sic.residual_power_db;
            for (std::size_t i = 0; i < payload.size(); ++i)
                errs += sic.inner_bits[i] != payload[i];
            total += static_cast<long long>(payload.size());
        }
        const double n0 = cfg.n_subcarriers * noise;
        const double gamma_eff = es / n0 / 2.0;
        const double oracle = vemo::q_function(std::sqrt(gamma_eff));
        std::cout << snr << "," << static_cast<double>(errs) / total << "," << oracle << ","
                  << vemo::db10(gamma_eff) << "," << resid_db / bursts << "\n";
    }
}

void demo_radar_extract(std::uint64_t seed) {
    std::cout << "comm_over_echo_db,pd_with_cancellation,pd_without\n";
    // full-band comm so the strong burst actually masks the echo (the shared
    // aperture case); the radar reference keeps its usual sub-band
    vemo::PhyDefaults phy;
    auto cfg = vemo::ofdm_config(phy);
    cfg.allocation["comm"] = all_bins_config(cfg.n_subcarriers, cfg.cp_len).allocation["comm"];
    const int n_data = 6, trials = 60;
    const std::size_t margin = 400;
    const std::size_t bits_n = static_cast<std::size_t>(n_data) * 2 * cfg.bins("comm").size();
    for (double ratio : {10.0, 20.0, 30.0, 40.0}) {
        const double echo_amp = std::pow(10.0, -ratio / 20.0);
        int hits_canc = 0, hits_raw = 0;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t ts =
                vemo::rng::derive(seed, "rext", (std::uint64_t)ratio, t);
            const auto burst =
                vemo::ofdm_burst(vemo::pn_bits(vemo::rng::derive(ts, "bits"), bits_n), cfg, "comm");
            const auto pulse = vemo::radar_pulse(cfg, vemo::rng::derive(ts, "pulse"), n_data + 1);
            auto g = vemo::rng::engine(vemo::rng::derive(ts, "chan"));
            const std::size_t delay = g() % margin;
            vemo::ComplexSignal rx(burst.size() + margin);
            for (std::size_t i = 0; i < burst.size(); ++i) rx[i] += burst[i];
            for (std::size_t i = 0; i < pulse.size(); ++i) rx[delay + i] += echo_amp * pulse[i];
            for (auto& z : rx) z += vemo::rng::cgaussian(g, 1e-6);

            const auto ext =
                vemo::extract_radar_return(rx, cfg, "comm", n_data, pulse, phy.threshold_k);
            const auto raw = vemo::matched_filter_delay(rx, pulse, phy.threshold_k);
            const auto ok = [&](const vemo::DelayEstimate& d) {
                return d.detected &&
                       std::llabs(d.delay_samples - static_cast<long long>(delay)) <= 1;
            };
            hits_canc += ok(ext.delay);
            hits_raw += ok(raw);
        }
        std::cout << ratio << "," << static_cast<double>(hits_canc) / trials << ","
                  << static_cast<double>(hits_raw) / trials << "\n";
    }
}

void demo_transec(std::uint64_t seed) {
    std::cout << "snr_db,suppression_correct_db,suppression_wrong_db\n";
    const auto key = vemo::transec_key_from_hex("5eed5eed5eed5eed5eed5eed5eed5eed");
    const auto wrong = vemo::transec_key_from_hex("0badc0de0badc0de0badc0de0badc0de");
    const std::size_t n = 4096;
    const int trials = 20;
    const auto jam = vemo::transec_jam(key, n);
    for (double snr : {0.0, 10.0, 20.0, 30.0}) {
        const double noise = std::pow(10.0, -snr / 10.0);
        double corr_db = 0.0, wrong_db = 0.0;
        for (int t = 0; t < trials; ++t) {
            auto g = vemo::rng::engine(vemo::rng::derive(seed, "transec", (std::uint64_t)snr, t));
            vemo::ComplexSignal noise_vec(n);
            for (auto& z : noise_vec) z = vemo::rng::cgaussian(g, noise);
            vemo::ComplexSignal rx(n);
            for (std::size_t i = 0; i < n; ++i) rx[i] = jam[i] + noise_vec[i];

            const auto measure = [&](const vemo::TransecKey& k) {
                const auto after = vemo::cancel_jam(rx, k);
                double p = 0.0;
                for (std::size_t i = 0; i < n; ++i) p += std::norm(after[i] - noise_vec[i]);
                p /= static_cast<double>(n);
                return vemo::db10(1.0 / std::max(p, 1e-30));
            };
            corr_db += measure(key);
            wrong_db += measure(wrong);
        }
        std::cout << snr << "," << corr_db / trials << "," << wrong_db / trials << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"epoch-scheduled multi-platform RF co-simulator"};
    app.require_subcommand(1);

    std::string scenario_path, schedule_path, out = "table", report = "json", demo_mode;
    std::uint64_t seed = 0, cap = 1'000'000;
    int budget = 200;

    auto* sc_schedule = app.add_subcommand("schedule", "build and print a schedule");
    sc_schedule->add_option("scenario", scenario_path, "scenario file")->required();
    auto* sched_seed = sc_schedule->add_option("--seed", seed, "override the scenario seed");
    sc_schedule->add_option("--budget", budget, "hill-climb iterations");
    sc_schedule->add_option("--out", out, "output format")
        ->check(CLI::IsMember({"csv", "table"}));

    auto* sc_sim = app.add_subcommand("simulate", "run the PHY over a schedule");
    sc_sim->add_option("scenario", scenario_path, "scenario file")->required();
    sc_sim->add_option("--schedule", schedule_path, "schedule CSV (default: build one)");
    auto* sim_seed = sc_sim->add_option("--seed", seed, "override the scenario seed");
    sc_sim->add_option("--report", report, "report format")->check(CLI::IsMember({"json"}));

    auto* sc_demo = app.add_subcommand("waveform-demo", "emit acceptance-curve CSV");
    sc_demo->add_option("mode", demo_mode, "which curve")
        ->required()
        ->check(CLI::IsMember({"papr", "sic", "radar-extract", "transec"}));
    auto* demo_seed = sc_demo->add_option("--seed", seed, "Monte Carlo seed");
    std::string demo_out = "csv";
    sc_demo->add_option("--out", demo_out, "output format")->check(CLI::IsMember({"csv"}));

    auto* sc_oracle = app.add_subcommand("oracle", "exhaustive optimal schedule (tiny scenarios)");
    sc_oracle->add_option("scenario", scenario_path, "scenario file")->required();
    sc_oracle->add_option("--cap", cap, "placement-combination cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sc_schedule->parsed())
            return cmd_schedule(scenario_path, seed, !sched_seed->empty(), budget, out);
        if (sc_sim->parsed())
            return cmd_simulate(scenario_path, schedule_path, seed, !sim_seed->empty(), report);
        if (sc_oracle->parsed()) return cmd_oracle(scenario_path, cap);
        if (sc_demo->parsed()) {
            const std::uint64_t s = demo_seed->empty() ? 1 : seed;
            if (demo_mode == "papr") demo_papr(s);
            else if (demo_mode == "sic") demo_sic(s);
            else if (demo_mode == "radar-extract") demo_radar_extract(s);
            else demo_transec(s);
            return 0;
        }
    } catch (const vemo::ScenarioError& e) {
        std::cerr << "scenario error at " << e.path() << ": " << e.what() << "\n";
        return 2;
    } catch (const vemo::CapExceeded& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
