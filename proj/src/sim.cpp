#include "vemo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vemo/channel.hpp"
#include "vemo/geometry.hpp"
#include "vemo/metrics.hpp"
#include "vemo/rng.hpp"

namespace vemo {

namespace {

struct BurstShape {
    int n_data_symbols = 0;
    std::size_t burst_len = 0; // pilot + payload symbols, in samples
    std::size_t comm_bits = 0; // payload bits per burst
};

BurstShape burst_shape(const Scenario& s, const OfdmConfig& cfg) {
    const int total = s.phy.sample_rate_epochs / cfg.symbol_len();
    if (total < 2)
        throw std::invalid_argument(
            "sim: sample_rate_epochs too small for a pilot plus one payload symbol");
    BurstShape shape;
    shape.n_data_symbols = total - 1;
    shape.burst_len = static_cast<std::size_t>(total) * cfg.symbol_len();
    shape.comm_bits = static_cast<std::size_t>(shape.n_data_symbols) *
                      bits_per_symbol(cfg.modulation) * cfg.bins("comm").size();
    return shape;
}

// Constant-envelope pseudo-noise chips (enemy emissions).
ComplexSignal pn_chips(std::uint64_t seed, std::size_t n, double amplitude) {
    auto g = rng::engine(seed);
    ComplexSignal out;
    out.reserve(n);
    constexpr double quarter = std::numbers::pi / 4.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = quarter + (g() & 3u) * (std::numbers::pi / 2.0);
        out.emplace_back(amplitude * std::cos(phase), amplitude * std::sin(phase));
    }
    return out;
}

enum class Family { comm, radar, combined, jam, enemy };

struct TxEmission {
    std::string platform; // or emitter id
    int epoch = 0;
    Family family = Family::comm;
    std::string task;      // scheduling task id (radar task for combined)
    std::string comm_task; // comm task id when a comm layer exists
    std::vector<int> comm_bits;
    ComplexSignal wave;
    ComplexSignal radar_ref;    // normalized radar component, when present
    double comm_fraction = 1.0; // share of emission power in the comm layer
    bool keyed_jam = false;
    Vec3 position;
    CombineMode mode = CombineMode::none;
    std::string radar_target; // emitter the radar pulse bounces off
};

std::vector<TxEmission> emissions_at(const Scenario& s, const Schedule& sched, int epoch,
                                     std::uint64_t seed, const OfdmConfig& cfg,
                                     const BurstShape& shape) {
    std::vector<TxEmission> out;
    const int burst_syms = shape.n_data_symbols + 1;
    for (const auto& [key, acts] : sched.cells) {
        if (key.epoch != epoch) continue;
        const Platform* plat = s.find_platform(key.platform);
        for (const auto& a : acts) {
            TxEmission e;
            e.platform = key.platform;
            e.epoch = epoch;
            e.position = plat->position;
            e.task = a.task;
            switch (a.kind) {
                case Activity::Kind::tx_comm: {
                    e.family = Family::comm;
                    e.comm_task = a.task;
                    e.comm_bits =
                        pn_bits(rng::derive(seed, "bits:" + a.task, epoch), shape.comm_bits);
                    e.wave = ofdm_burst(e.comm_bits, cfg, "comm");
                    break;
                }
                case Activity::Kind::tx_radar: {
                    const auto& track = std::get<RadarTrack>(s.find_task(a.task)->body);
                    e.radar_target = track.target;
                    const std::uint64_t rseed = rng::derive(seed, "radar:" + a.task, epoch);
                    if (a.combined_task.empty()) {
                        e.family = Family::radar;
                        e.wave = radar_pulse(cfg, rseed, s.phy.radar_pulse_symbols);
                        e.radar_ref = e.wave;
                        e.comm_fraction = 0.0;
                    } else {
                        e.family = Family::combined;
                        e.comm_task = a.combined_task;
                        e.comm_bits = pn_bits(
                            rng::derive(seed, "bits:" + a.combined_task, epoch), shape.comm_bits);
                        e.radar_ref = radar_pulse(cfg, rseed, burst_syms);
                        if (s.phy.combine_mode == CombineMode::noma) {
                            NomaConfig noma{s.phy.noma_split_db};
                            e.mode = CombineMode::noma;
                            e.wave = noma_combine(e.radar_ref,
                                                  ofdm_burst(e.comm_bits, cfg, "comm"), noma);
                            e.comm_fraction = 1.0 - noma.alpha();
                        } else {
                            e.mode = CombineMode::ofdm_partition;
                            const auto comm_raw = ofdm_burst(e.comm_bits, cfg, "comm", false);
                            const auto radar_raw = radar_pulse(cfg, rseed, burst_syms, false);
                            const double pc = mean_power(comm_raw), pr = mean_power(radar_raw);
                            e.comm_fraction = pc / (pc + pr);
                            e.wave.resize(comm_raw.size());
                            for (std::size_t i = 0; i < e.wave.size(); ++i)
                                e.wave[i] = comm_raw[i] + radar_raw[i];
                            normalize_unit_power(e.wave);
                        }
                    }
                    break;
                }
                case Activity::Kind::tx_jam: {
                    e.family = Family::jam;
                    e.keyed_jam = true;
                    e.comm_fraction = 0.0;
                    e.wave = transec_jam(transec_key_from_hex(s.phy.transec_key),
                                         static_cast<std::size_t>(s.phy.sample_rate_epochs));
                    break;
                }
                default:
                    continue;
            }
            out.push_back(std::move(e));
        }
    }
    for (const auto& em : s.emitters) {
        if (!em.active_epochs.count(epoch)) continue;
        TxEmission e;
        e.platform = em.id;
        e.epoch = epoch;
        e.family = Family::enemy;
        e.comm_fraction = 0.0;
        e.position = em.position;
        e.wave = pn_chips(rng::derive(seed, "emitter:" + em.id, epoch),
                          static_cast<std::size_t>(s.phy.sample_rate_epochs),
                          std::sqrt(em.emitted_power));
        out.push_back(std::move(e));
    }
    return out;
}

// Longest path any signal can travel, in whole epochs, to bound how far back
// emissions must be regenerated for a receive window.
int max_delay_epochs(const Scenario& s) {
    double longest = 0.0;
    std::vector<Vec3> nodes;
    for (const auto& p : s.platforms) nodes.push_back(p.position);
    for (const auto& m : s.emitters) nodes.push_back(m.position);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (i != j) longest = std::max(longest, path_length(nodes[i], nodes[j]));
    for (const auto& t : s.tasks) {
        const auto* r = std::get_if<RadarTrack>(&t.body);
        if (!r) continue;
        const Vec3 illum = s.find_platform(r->illuminator)->position;
        const Vec3 target = s.find_emitter(r->target)->position;
        for (const auto& p : s.platforms)
            longest = std::max(longest, echo_path_length(illum, target, p.position));
    }
    return delay_epochs(longest, s.epoch_duration_s) + 1;
}

struct PlacedEmission {
    const TxEmission* tx = nullptr;
    bool is_echo = false;
    std::complex<double> gain{0.0, 0.0};
    std::size_t local_offset = 0;   // sample index in the window
    const ComplexSignal* sig = nullptr; // trimmed to fit the window
    long long nominal_offset = 0;   // before head trimming (can be negative)
};

// All emissions audible in the window [epoch*SR, (epoch+2)*SR) at `pos`,
// trimmed to the window. `arena` owns trimmed copies.
std::vector<PlacedEmission> place_emissions(
    const Scenario& s, const std::vector<std::vector<TxEmission>>& per_epoch, int epoch,
    const Vec3& pos, const std::string& self_id, std::deque<ComplexSignal>& arena) {
    const long long sr = s.phy.sample_rate_epochs;
    const long long window = 2 * sr;
    std::vector<PlacedEmission> placed;

    auto add = [&](const TxEmission& tx, bool is_echo, const ChannelSpec& ch) {
        const long long nominal =
            (static_cast<long long>(tx.epoch) - epoch) * sr + ch.delay_samples;
        long long head = 0, start = nominal;
        if (start < 0) {
            head = -start;
            start = 0;
        }
        if (head >= static_cast<long long>(tx.wave.size()) || start >= window) return;
        const long long avail = static_cast<long long>(tx.wave.size()) - head;
        const long long len = std::min(avail, window - start);
        PlacedEmission p;
        p.tx = &tx;
        p.is_echo = is_echo;
        p.gain = ch.gain;
        p.local_offset = static_cast<std::size_t>(start);
        p.nominal_offset = nominal;
        if (head == 0 && len == static_cast<long long>(tx.wave.size())) {
            p.sig = &tx.wave;
        } else {
            arena.emplace_back(tx.wave.begin() + head, tx.wave.begin() + head + len);
            p.sig = &arena.back();
        }
        placed.push_back(p);
    };

    for (std::size_t i = 0; i < per_epoch.size(); ++i) {
        for (const auto& tx : per_epoch[i]) {
            if (tx.platform == self_id) continue; // an aperture cannot hear itself
            add(tx, false, direct_channel(tx.position, pos, s.phy, s.epoch_duration_s));
            if (!tx.radar_target.empty()) {
                const Vec3 target = s.find_emitter(tx.radar_target)->position;
                add(tx, true,
                    echo_channel(tx.position, target, pos, s.phy.reflectivity, s.phy,
                                 s.epoch_duration_s));
            }
        }
    }
    std::sort(placed.begin(), placed.end(), [](const PlacedEmission& a, const PlacedEmission& b) {
        if (a.tx->epoch != b.tx->epoch) return a.tx->epoch < b.tx->epoch;
        if (a.tx->platform != b.tx->platform) return a.tx->platform < b.tx->platform;
        return a.is_echo < b.is_echo;
    });
    return placed;
}

double overlap_fraction(long long a_start, long long a_len, long long b_start, long long b_len) {
    const long long lo = std::max(a_start, b_start);
    const long long hi = std::min(a_start + a_len, b_start + b_len);
    if (hi <= lo || b_len <= 0) return 0.0;
    return static_cast<double>(hi - lo) / static_cast<double>(b_len);
}

} // namespace

EpochOutcomes run_epoch(const Scenario& s, const Schedule& sched, int epoch, std::uint64_t seed) {
    if (const auto violations = validate_schedule(s, sched); !violations.empty())
        throw std::invalid_argument("run_epoch: schedule does not validate");
    const OfdmConfig cfg = ofdm_config(s.phy);
    const BurstShape shape = burst_shape(s, cfg);
    const long long sr = s.phy.sample_rate_epochs;

    const int span = max_delay_epochs(s);
    const int first = std::max(0, epoch - span);
    const int last = std::min(s.num_epochs - 1, epoch + 1);
    std::vector<std::vector<TxEmission>> per_epoch;
    for (int e = first; e <= last; ++e)
        per_epoch.push_back(emissions_at(s, sched, e, seed, cfg, shape));

    auto find_emission = [&](int e, const std::string& platform,
                             auto&& pred) -> const TxEmission* {
        if (e < first || e > last) return nullptr;
        for (const auto& tx : per_epoch[e - first])
            if (tx.epoch == e && tx.platform == platform && pred(tx)) return &tx;
        return nullptr;
    };

    EpochOutcomes out;

    for (const auto& [key, acts] : sched.cells) {
        if (key.epoch != epoch) continue;
        const Platform* plat = s.find_platform(key.platform);
        for (const auto& a : acts) {
            if (!a.is_rx()) continue;
            std::deque<ComplexSignal> arena;
            auto placed =
                place_emissions(s, per_epoch, epoch, plat->position, key.platform, arena);
            ComplexSignal window;
            {
                std::vector<Emission> ems;
                ems.reserve(placed.size());
                for (const auto& p : placed)
                    ems.push_back({p.sig, {static_cast<long long>(p.local_offset), p.gain, ""}});
                window = superpose(ems, static_cast<std::size_t>(2 * sr), s.phy.noise_power,
                                   rng::derive(seed, "noise:" + key.platform, epoch));
            }

            if (a.kind == Activity::Kind::rx_comm) {
                const auto& link = std::get<CommLink>(s.find_task(a.task)->body);
                const int d_ep = delay_epochs(path_length(s.find_platform(link.src)->position,
                                                          plat->position),
                                              s.epoch_duration_s);
                const int te = epoch - d_ep;
                const TxEmission* tx = find_emission(te, link.src, [&](const TxEmission& t) {
                    return t.comm_task == a.task;
                });
                if (!tx) continue; // validated schedules always pair

                CommOutcome oc;
                oc.task = a.task;
                oc.src = link.src;
                oc.dst = key.platform;
                oc.tx_epoch = te;
                oc.rx_epoch = epoch;

                for (const auto& p : placed) {
                    if (!p.tx->keyed_jam) continue;
                    window = subtract_reference(window, *p.sig, p.local_offset);
                    ++oc.jams_cancelled;
                }

                const auto direct = direct_channel(tx->position, plat->position, s.phy,
                                                   s.epoch_duration_s);
                const long long offset =
                    (static_cast<long long>(te) - epoch) * sr + direct.delay_samples;
                if (offset < 0 ||
                    offset + static_cast<long long>(shape.burst_len) > 2 * sr)
                    continue;
                ComplexSignal slice(window.begin() + offset,
                                    window.begin() + offset +
                                        static_cast<long long>(shape.burst_len));

                std::vector<int> bits;
                if (tx->mode == CombineMode::noma) {
                    NomaConfig noma{s.phy.noma_split_db};
                    auto sic = sic_decode(slice, tx->radar_ref, cfg, "comm", noma);
                    bits = std::move(sic.inner_bits);
                    oc.residual_power_db = sic.residual_power_db;
                    oc.sic_used = true;
                } else {
                    bits = pilot_equalized_demod(slice, cfg, "comm");
                }
                oc.bits = static_cast<long long>(bits.size());
                for (std::size_t i = 0; i < bits.size(); ++i)
                    oc.bit_errors += bits[i] != tx->comm_bits[i];

                const double sig_power = std::norm(direct.gain) * tx->comm_fraction;
                double interference = 0.0;
                for (const auto& p : placed) {
                    const bool is_paired_direct = p.tx == tx && !p.is_echo;
                    if (is_paired_direct) continue;
                    const double frac = overlap_fraction(
                        static_cast<long long>(p.local_offset),
                        static_cast<long long>(p.sig->size()), offset,
                        static_cast<long long>(shape.burst_len));
                    interference += std::norm(p.gain) * mean_power(p.tx->wave) * frac;
                }
                // self-interference of the outer layer is handled by SIC, not SINR
                const double denom = interference + s.phy.noise_power;
                if (denom > 0.0) {
                    oc.sinr_db = sinr_db(sig_power, denom);
                } else {
                    oc.sinr_defined = false;
                }
                out.comms.push_back(std::move(oc));
            } else if (a.kind == Activity::Kind::rx_radar_echo) {
                const auto& track = std::get<RadarTrack>(s.find_task(a.task)->body);
                const TxEmission* tx =
                    find_emission(a.tx_epoch, track.illuminator,
                                  [&](const TxEmission& t) { return t.task == a.task; });
                if (!tx || tx->radar_ref.empty()) continue;

                RadarOutcome oc;
                oc.task = a.task;
                oc.receiver = key.platform;
                oc.tx_epoch = a.tx_epoch;
                oc.rx_epoch = epoch;

                // genie-aided cleanup: subtract every friendly direct-path
                // emission (strongest first); echoes and enemies stay
                std::vector<const PlacedEmission*> friendly;
                for (const auto& p : placed)
                    if (!p.is_echo && p.tx->family != Family::enemy) friendly.push_back(&p);
                std::sort(friendly.begin(), friendly.end(),
                          [](const PlacedEmission* x, const PlacedEmission* y) {
                              const double px = std::norm(x->gain), py = std::norm(y->gain);
                              if (px != py) return px > py;
                              if (x->tx->epoch != y->tx->epoch) return x->tx->epoch < y->tx->epoch;
                              return x->tx->platform < y->tx->platform;
                          });
                for (const auto* p : friendly) {
                    window = subtract_reference(window, *p->sig, p->local_offset);
                    ++oc.emissions_cancelled;
                }

                const auto est = matched_filter_delay(window, tx->radar_ref, s.phy.threshold_k);
                oc.detected = est.detected;
                oc.peak_metric = est.peak_metric;
                oc.threshold = est.threshold;
                oc.measured_delay =
                    est.delay_samples + (static_cast<long long>(epoch) - a.tx_epoch) * sr;
                const auto echo = echo_channel(
                    tx->position, s.find_emitter(track.target)->position, plat->position,
                    s.phy.reflectivity, s.phy, s.epoch_duration_s);
                oc.expected_delay = echo.delay_samples;
                out.radars.push_back(std::move(oc));
            } else if (a.kind == Activity::Kind::rx_intercept) {
                const auto& icpt = std::get<PassiveIntercept>(s.find_task(a.task)->body);
                InterceptOutcome oc;
                oc.task = a.task;
                oc.listener = key.platform;
                oc.source = icpt.source;
                oc.epoch = epoch;
                oc.source_active =
                    s.find_emitter(icpt.source)->active_epochs.count(epoch) > 0;
                // friendly waveforms are regenerable; strip them all so the
                // detector sees only enemy energy against noise
                std::vector<const PlacedEmission*> friendly;
                for (const auto& p : placed)
                    if (p.tx->family != Family::enemy) friendly.push_back(&p);
                std::sort(friendly.begin(), friendly.end(),
                          [](const PlacedEmission* x, const PlacedEmission* y) {
                              const double px = std::norm(x->gain), py = std::norm(y->gain);
                              if (px != py) return px > py;
                              if (x->tx->epoch != y->tx->epoch) return x->tx->epoch < y->tx->epoch;
                              if (x->tx->platform != y->tx->platform)
                                  return x->tx->platform < y->tx->platform;
                              return x->is_echo < y->is_echo;
                          });
                for (const auto* p : friendly)
                    window = subtract_reference(window, *p->sig, p->local_offset);
                oc.energy = mean_power(window);
                const double n = static_cast<double>(2 * sr);
                oc.threshold = s.phy.noise_power > 0.0
                                   ? s.phy.noise_power * (1.0 + 6.0 / std::sqrt(n))
                                   : 1e-30;
                oc.detected = oc.energy > oc.threshold;
                out.intercepts.push_back(std::move(oc));
            }
        }
    }

    // jam pressure at the victims, per task, this epoch
    std::map<std::string, std::vector<std::string>> jammers_by_task;
    for (const auto& [key, acts] : sched.cells) {
        if (key.epoch != epoch) continue;
        for (const auto& a : acts)
            if (a.kind == Activity::Kind::tx_jam) jammers_by_task[a.task].push_back(key.platform);
    }
    for (const auto& [task_id, jammers] : jammers_by_task) {
        const auto& jam = std::get<JamTask>(s.find_task(task_id)->body);
        const EnemyEmitter* victim = s.find_emitter(jam.victim);
        JamOutcome oc;
        oc.task = task_id;
        oc.victim = jam.victim;
        oc.epoch = epoch;
        oc.jammers = static_cast<int>(jammers.size());
        for (const auto& j : jammers) {
            const auto ch = direct_channel(s.find_platform(j)->position, victim->position, s.phy,
                                           s.epoch_duration_s);
            oc.jam_power += std::norm(ch.gain);
        }
        double best_signal = 0.0;
        for (const auto& em : s.emitters) {
            if (em.id == jam.victim || !em.active_epochs.count(epoch)) continue;
            const auto ch =
                direct_channel(em.position, victim->position, s.phy, s.epoch_duration_s);
            best_signal = std::max(best_signal, em.emitted_power * std::norm(ch.gain));
        }
        if (best_signal > 0.0) {
            oc.no_signal = false;
            oc.js_db = jam_to_signal_db(oc.jam_power, best_signal);
        }
        out.jams.push_back(std::move(oc));
    }
    return out;
}

SimReport run_simulation(const Scenario& s, const Schedule& sched, std::uint64_t seed) {
    if (const auto violations = validate_schedule(s, sched); !violations.empty())
        throw std::invalid_argument("run_simulation: schedule does not validate (" +
                                    violations.front().constraint + " at " +
                                    violations.front().platform + ")");
    SimReport report;
    report.seed = seed;
    report.orchestrator = s.platforms.front().id;
    report.utility = utility(s, sched);
    report.dissemination = check_dissemination(s, sched, report.orchestrator);

    for (int e = 0; e < s.num_epochs; ++e) {
        auto eo = run_epoch(s, sched, e, seed);
        std::move(eo.comms.begin(), eo.comms.end(), std::back_inserter(report.comms));
        std::move(eo.radars.begin(), eo.radars.end(), std::back_inserter(report.radars));
        std::move(eo.jams.begin(), eo.jams.end(), std::back_inserter(report.jams));
        std::move(eo.intercepts.begin(), eo.intercepts.end(),
                  std::back_inserter(report.intercepts));
    }

    std::sort(report.comms.begin(), report.comms.end(),
              [](const CommOutcome& a, const CommOutcome& b) {
                  return std::tie(a.task, a.tx_epoch, a.dst) < std::tie(b.task, b.tx_epoch, b.dst);
              });
    std::sort(report.radars.begin(), report.radars.end(),
              [](const RadarOutcome& a, const RadarOutcome& b) {
                  return std::tie(a.task, a.tx_epoch, a.receiver) <
                         std::tie(b.task, b.tx_epoch, b.receiver);
              });
    std::sort(report.jams.begin(), report.jams.end(),
              [](const JamOutcome& a, const JamOutcome& b) {
                  return std::tie(a.task, a.epoch) < std::tie(b.task, b.epoch);
              });
    std::sort(report.intercepts.begin(), report.intercepts.end(),
              [](const InterceptOutcome& a, const InterceptOutcome& b) {
                  return std::tie(a.task, a.epoch) < std::tie(b.task, b.epoch);
              });

    // PAPR of every distinct emission, grouped by waveform family
    const OfdmConfig cfg = ofdm_config(s.phy);
    const BurstShape shape = burst_shape(s, cfg);
    std::map<std::string, std::vector<double>> papr_samples;
    for (int e = 0; e < s.num_epochs; ++e) {
        for (const auto& tx : emissions_at(s, sched, e, seed, cfg, shape)) {
            const char* family = nullptr;
            switch (tx.family) {
                case Family::comm:
                case Family::radar:
                    family = "ofdm";
                    break;
                case Family::combined:
                    family = tx.mode == CombineMode::noma ? "noma" : "ofdm";
                    break;
                case Family::jam:
                case Family::enemy:
                    family = "pn";
                    break;
            }
            papr_samples[family].push_back(papr_db(tx.wave, 99.9));
        }
    }
    for (const auto& [family, values] : papr_samples) {
        PaprStat stat;
        stat.count = static_cast<int>(values.size());
        for (double v : values) {
            stat.mean_db += v;
            stat.max_db = std::max(stat.max_db, v);
        }
        stat.mean_db /= values.size();
        report.papr[family] = stat;
    }
    return report;
}

std::string render_sim_report(const Scenario& s, const SimReport& report) {
    using nlohmann::json;
    json j;
    j["schema"] = "vemo.simreport";
    j["version"] = 1;
    j["seed"] = report.seed;
    j["orchestrator"] = report.orchestrator;
    j["num_epochs"] = s.num_epochs;
    j["epoch_duration_s"] = s.epoch_duration_s;
    j["violations"] = json::array();

    json util;
    util["total"] = report.utility.total;
    json per_task_util = json::object();
    for (const auto& [id, sat] : report.utility.per_task) per_task_util[id] = sat;
    util["per_task"] = per_task_util;
    j["utility"] = util;

    json diss;
    diss["feasible"] = report.dissemination.feasible;
    json informed = json::object();
    for (const auto& [p, e] : report.dissemination.informed_epoch) {
        if (e == kNeverInformed)
            informed[p] = "never";
        else
            informed[p] = e;
    }
    diss["informed_epoch"] = informed;
    json paths = json::object();
    for (const auto& [p, hops] : report.dissemination.relay_paths) paths[p] = hops;
    diss["relay_paths"] = paths;
    j["dissemination"] = diss;

    json links = json::array();
    for (const auto& c : report.comms) {
        json l;
        l["task"] = c.task;
        l["src"] = c.src;
        l["dst"] = c.dst;
        l["tx_epoch"] = c.tx_epoch;
        l["rx_epoch"] = c.rx_epoch;
        l["bits"] = c.bits;
        l["bit_errors"] = c.bit_errors;
        l["ber"] = c.bits ? static_cast<double>(c.bit_errors) / c.bits : 0.0;
        if (c.sinr_defined)
            l["sinr_db"] = c.sinr_db;
        else
            l["no_signal"] = true;
        if (c.sic_used) l["sic_residual_db"] = c.residual_power_db;
        l["jams_cancelled"] = c.jams_cancelled;
        links.push_back(l);
    }
    j["links"] = links;

    json radars = json::array();
    for (const auto& r : report.radars) {
        json x;
        x["task"] = r.task;
        x["receiver"] = r.receiver;
        x["tx_epoch"] = r.tx_epoch;
        x["rx_epoch"] = r.rx_epoch;
        x["detected"] = r.detected;
        x["measured_delay"] = r.measured_delay;
        x["expected_delay"] = r.expected_delay;
        x["peak_metric"] = r.peak_metric;
        x["threshold"] = r.threshold;
        x["emissions_cancelled"] = r.emissions_cancelled;
        radars.push_back(x);
    }
    j["radar"] = radars;

    json jams = json::array();
    for (const auto& ja : report.jams) {
        json x;
        x["task"] = ja.task;
        x["victim"] = ja.victim;
        x["epoch"] = ja.epoch;
        x["jammers"] = ja.jammers;
        x["jam_power"] = ja.jam_power;
        if (ja.no_signal)
            x["no_signal"] = true;
        else
            x["js_db"] = ja.js_db;
        jams.push_back(x);
    }
    j["jam"] = jams;

    json icpts = json::array();
    for (const auto& ic : report.intercepts) {
        json x;
        x["task"] = ic.task;
        x["listener"] = ic.listener;
        x["source"] = ic.source;
        x["epoch"] = ic.epoch;
        x["source_active"] = ic.source_active;
        x["detected"] = ic.detected;
        x["energy"] = ic.energy;
        x["threshold"] = ic.threshold;
        icpts.push_back(x);
    }
    j["intercept"] = icpts;

    json per_task = json::object();
    for (const auto& t : s.tasks) {
        json x;
        x["priority"] = t.priority;
        x["satisfaction"] = report.utility.per_task.at(t.id);
        if (std::holds_alternative<CommLink>(t.body)) {
            x["type"] = "comm";
            long long bits = 0, errs = 0;
            int links_n = 0;
            for (const auto& c : report.comms)
                if (c.task == t.id) {
                    bits += c.bits;
                    errs += c.bit_errors;
                    ++links_n;
                }
            x["links"] = links_n;
            x["bits"] = bits;
            x["bit_errors"] = errs;
            x["ber"] = bits ? static_cast<double>(errs) / bits : 0.0;
        } else if (std::holds_alternative<RadarTrack>(t.body)) {
            x["type"] = "radar";
            int echoes = 0, detections = 0;
            long long worst = 0;
            for (const auto& r : report.radars)
                if (r.task == t.id) {
                    ++echoes;
                    detections += r.detected ? 1 : 0;
                    worst = std::max(worst, std::llabs(r.measured_delay - r.expected_delay));
                }
            x["echoes"] = echoes;
            x["detections"] = detections;
            x["max_delay_error"] = worst;
        } else if (std::holds_alternative<JamTask>(t.body)) {
            x["type"] = "jam";
            int epochs = 0, silent = 0;
            for (const auto& ja : report.jams)
                if (ja.task == t.id) {
                    ++epochs;
                    silent += ja.no_signal ? 1 : 0;
                }
            x["epochs"] = epochs;
            x["no_signal_epochs"] = silent;
        } else {
            x["type"] = "intercept";
            int dwells = 0, hits = 0;
            for (const auto& ic : report.intercepts)
                if (ic.task == t.id) {
                    ++dwells;
                    hits += (ic.detected && ic.source_active) ? 1 : 0;
                }
            x["dwells"] = dwells;
            x["hits"] = hits;
        }
        per_task[t.id] = x;
    }
    j["per_task"] = per_task;

    json papr = json::object();
    for (const auto& [family, stat] : report.papr) {
        json x;
        x["count"] = stat.count;
        x["mean_db"] = stat.mean_db;
        x["max_db"] = stat.max_db;
        papr[family] = x;
    }
    j["papr_99p9"] = papr;

    return j.dump(2) + "\n";
}

} // namespace vemo
