#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vemo/controlplane.hpp"
#include "vemo/receiver.hpp"
#include "vemo/schedule.hpp"
#include "vemo/scenario.hpp"

namespace vemo {

// One decoded comm pair. sinr_db is the raw RF ratio at the receiver before
// any jam cancellation; the decode path (and therefore the BER) does cancel
// keyed jamming.
struct CommOutcome {
    std::string task, src, dst;
    int tx_epoch = 0, rx_epoch = 0;
    long long bits = 0, bit_errors = 0;
    double sinr_db = 0.0;
    bool sinr_defined = true; // false when interference-plus-noise power is 0
    double residual_power_db = 0.0;
    bool sic_used = false;
    int jams_cancelled = 0;
};

struct RadarOutcome {
    std::string task, receiver;
    int tx_epoch = 0, rx_epoch = 0;
    bool detected = false;
    long long measured_delay = 0, expected_delay = 0;
    double peak_metric = 0.0, threshold = 0.0;
    int emissions_cancelled = 0;
};

// Jam pressure on the victim, per task and cover epoch. "Signal" is the
// strongest co-epoch emission from some other enemy node at the victim.
struct JamOutcome {
    std::string task, victim;
    int epoch = 0;
    int jammers = 0;
    double jam_power = 0.0;
    double js_db = 0.0;
    bool no_signal = true; // no other enemy emission to compare against
};

struct InterceptOutcome {
    std::string task, listener, source;
    int epoch = 0;
    bool source_active = false;
    bool detected = false;
    double energy = 0.0;    // mean received power over the listen window
    double threshold = 0.0; // noise-calibrated detection level
};

struct EpochOutcomes {
    std::vector<CommOutcome> comms;
    std::vector<RadarOutcome> radars;
    std::vector<JamOutcome> jams;
    std::vector<InterceptOutcome> intercepts;
};

// Executes every reception scheduled at `epoch`: synthesizes all in-band
// emissions (including spill from earlier epochs), superposes them per
// receiver, and runs the matching receiver chain.
EpochOutcomes run_epoch(const Scenario& s, const Schedule& sched, int epoch, std::uint64_t seed);

struct PaprStat {
    int count = 0;
    double mean_db = 0.0;
    double max_db = 0.0;
};

struct SimReport {
    std::uint64_t seed = 0;
    std::string orchestrator;
    UtilityReport utility;
    DisseminationReport dissemination;
    std::vector<CommOutcome> comms;
    std::vector<RadarOutcome> radars;
    std::vector<JamOutcome> jams;
    std::vector<InterceptOutcome> intercepts;
    std::map<std::string, PaprStat> papr; // waveform family -> 99.9th pct stats
};

SimReport run_simulation(const Scenario& s, const Schedule& sched, std::uint64_t seed);

// Canonical JSON rendering: sorted keys, stable float formatting, trailing
// newline. Identical (scenario, schedule, seed) -> identical bytes.
std::string render_sim_report(const Scenario& s, const SimReport& report);

} // namespace vemo
