#pragma once

#include "vemo/geometry.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace vemo {

enum class PlatformKind { aircraft, ground, ship, uav };

struct Platform {
    std::string id;
    PlatformKind kind = PlatformKind::aircraft;
    Vec3 position;

    friend bool operator==(const Platform&, const Platform&) = default;
};

struct EnemyEmitter {
    std::string id;
    Vec3 position;
    std::set<int> active_epochs;
    double emitted_power = 1.0; // linear, relative units

    friend bool operator==(const EnemyEmitter&, const EnemyEmitter&) = default;
};

struct CommLink {
    std::string src;
    std::string dst;
    int payload_epochs = 1;
    bool control = false; // set by controlplane injection

    friend bool operator==(const CommLink&, const CommLink&) = default;
};

struct RadarTrack {
    std::string illuminator;
    std::string target; // emitter id
    std::vector<std::string> receivers; // nonempty, sorted, unique
    int dwells = 1;

    friend bool operator==(const RadarTrack&, const RadarTrack&) = default;
};

struct JamTask {
    std::vector<std::string> candidate_jammers; // nonempty, sorted, unique
    std::string victim;                         // emitter id
    std::set<int> cover_epochs;
    int jammers_per_epoch = 1;

    friend bool operator==(const JamTask&, const JamTask&) = default;
};

struct PassiveIntercept {
    std::string listener;
    std::string source; // emitter id
    int dwells = 1;

    friend bool operator==(const PassiveIntercept&, const PassiveIntercept&) = default;
};

struct Task {
    std::string id;
    double priority = 1.0;
    std::variant<CommLink, RadarTrack, JamTask, PassiveIntercept> body;

    friend bool operator==(const Task&, const Task&) = default;
};

enum class Modulation { qpsk, bpsk_robust };
enum class CombineMode { none, noma, ofdm_partition };

// Scenario-level PHY constants. Everything has a default so small scheduling
// scenarios can omit the block entirely.
struct PhyDefaults {
    double ref_gain = 1.0e4;    // amplitude at 1 m
    double noise_power = 1e-9;  // linear, per complex sample
    int sample_rate_epochs = 4096; // samples per epoch
    std::uint64_t seed = 1;

    int n_subcarriers = 64;
    int cp_len = 16;
    std::vector<int> comm_subcarriers;  // default: 0..39
    std::vector<int> radar_subcarriers; // default: 40..63
    Modulation modulation = Modulation::qpsk;
    double noma_split_db = 10.0;   // outer over inner
    std::string transec_key = "5eed5eed5eed5eed5eed5eed5eed5eed"; // 128-bit hex
    CombineMode combine_mode = CombineMode::none;
    double reflectivity = 1.0;     // radar target amplitude factor
    int radar_pulse_symbols = 8;   // standalone pulse length, OFDM symbols
    double threshold_k = 6.0;      // matched-filter CFAR constant

    friend bool operator==(const PhyDefaults&, const PhyDefaults&) = default;
};

struct Scenario {
    double epoch_duration_s = 1e-3;
    int num_epochs = 1;
    std::vector<Platform> platforms;
    std::vector<EnemyEmitter> emitters;
    std::vector<Task> tasks;
    PhyDefaults phy;

    const Platform* find_platform(const std::string& id) const;
    const EnemyEmitter* find_emitter(const std::string& id) const;
    const Task* find_task(const std::string& id) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Parse/validation failure. `path` points at the offending field, e.g.
// "tasks[3].dst"; `kind` is one of "syntax", "unknown-key", "unknown-id",
// "invariant", "type".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string kind, std::string path, const std::string& what);
    const std::string& kind() const { return kind_; }
    const std::string& path() const { return path_; }

private:
    std::string kind_;
    std::string path_;
};

// Strict parser: unknown keys are errors, every invariant is checked.
Scenario parse_scenario(const std::string& text);

// Canonical form: sorted keys, shortest round-trip float formatting.
// parse_scenario(render_scenario(s)) == s for every valid scenario.
std::string render_scenario(const Scenario& s);

// Re-checks all scenario invariants (used after programmatic edits).
void validate_scenario(const Scenario& s);

const char* to_string(PlatformKind k);
const char* to_string(Modulation m);
const char* to_string(CombineMode m);

} // namespace vemo
