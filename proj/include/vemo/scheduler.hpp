#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "vemo/schedule.hpp"
#include "vemo/scenario.hpp"

namespace vemo {

// Greedy construction followed by seeded hill climbing. Tasks that cannot be
// fully satisfied are listed in `unscheduled` with a short reason; the
// schedule itself always validates.
struct BuildResult {
    Schedule schedule;
    std::map<std::string, std::string> unscheduled; // task id -> reason (satisfaction < 1)
};

BuildResult build_schedule(const Scenario& s, int budget, std::uint64_t seed);

// Thrown by exhaustive_optimal when the scenario's placement space exceeds
// the cap. Callers must treat this as a refusal, not an answer.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Brute-force search over all valid placements. Intended as a test oracle on
// tiny scenarios; ties are resolved by the deterministic enumeration order
// (tasks by id, fuller placements first, earliest epochs first).
Schedule exhaustive_optimal(const Scenario& s, std::uint64_t combo_cap = 1'000'000);

} // namespace vemo
