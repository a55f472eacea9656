#pragma once

#include <climits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vemo/schedule.hpp"
#include "vemo/scenario.hpp"

namespace vemo {

// A platform is "informed" once it has received the schedule. NEVER is
// encoded as kNeverInformed; the orchestrator starts informed at -1.
constexpr int kNeverInformed = INT_MAX;

struct DisseminationReport {
    std::map<std::string, int> informed_epoch; // platform -> epoch, or kNeverInformed
    bool feasible = false;
    std::map<std::string, std::vector<std::string>> relay_paths; // hops from the orchestrator
};

// Adds one orchestrator->p comm task per other platform, priority above
// everything else, marked with control=true. Throws if control traffic was
// already injected.
Scenario inject_control_traffic(const Scenario& s, const std::string& orchestrator);

// Propagates schedule knowledge over the scheduled comm pairs: dst learns at
// its rx epoch if src was informed strictly before the tx epoch. feasible
// means every platform knows the schedule before its first activity.
DisseminationReport check_dissemination(const Scenario& s, const Schedule& sched,
                                        const std::string& orchestrator);

// (epoch, src, dst): the comm pair transmitted by src at that epoch fails.
using OutageSet = std::set<std::tuple<int, std::string, std::string>>;

struct FailedComm {
    std::string task;
    int tx_epoch = 0;
    std::string src, dst;
};

struct OutageReport {
    UtilityReport baseline;
    UtilityReport degraded;
    std::vector<FailedComm> failed;
};

// Pre-scheduled operation under comm outage: non-comm activities run as
// scheduled, comm pairs whose tx epoch is outaged are dropped, utility is
// recomputed on the rest.
OutageReport simulate_outage(const Scenario& s, const Schedule& sched, const OutageSet& outage);

} // namespace vemo
