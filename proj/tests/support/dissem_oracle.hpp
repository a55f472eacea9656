#pragma once

// Independent dissemination oracle: Bellman-Ford-style relaxation to a
// fixpoint, deliberately not the single sorted pass the library uses.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "vemo/controlplane.hpp"
#include "vemo/geometry.hpp"
#include "vemo/schedule.hpp"
#include "vemo/scenario.hpp"

namespace vemo::testgen {

struct OracleReport {
    std::map<std::string, int> informed;
    bool feasible = false;
};

inline OracleReport dissemination_oracle(const Scenario& s, const Schedule& sched,
                                         const std::string& orchestrator) {
    struct Event {
        int tx_epoch, rx_epoch;
        std::string src, dst;
    };
    std::vector<Event> events;
    for (const auto& [key, acts] : sched.cells) {
        for (const auto& a : acts) {
            std::string task_id;
            if (a.kind == Activity::Kind::tx_comm)
                task_id = a.task;
            else if (a.kind == Activity::Kind::tx_radar && !a.combined_task.empty())
                task_id = a.combined_task;
            else
                continue;
            const auto& c = std::get<CommLink>(s.find_task(task_id)->body);
            const int d = delay_epochs(path_length(s.find_platform(c.src)->position,
                                                   s.find_platform(c.dst)->position),
                                       s.epoch_duration_s);
            events.push_back({key.epoch, key.epoch + d, c.src, c.dst});
        }
    }

    OracleReport rep;
    for (const auto& p : s.platforms) rep.informed[p.id] = kNeverInformed;
    rep.informed[orchestrator] = -1;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& e : events) {
            const int si = rep.informed.at(e.src);
            if (si == kNeverInformed || si >= e.tx_epoch) continue;
            if (e.rx_epoch < rep.informed.at(e.dst)) {
                rep.informed.at(e.dst) = e.rx_epoch;
                changed = true;
            }
        }
    }

    rep.feasible = true;
    for (const auto& p : s.platforms) {
        int first = kNeverInformed;
        for (const auto& [key, acts] : sched.cells)
            if (key.platform == p.id && !acts.empty()) first = std::min(first, key.epoch);
        if (first != kNeverInformed && rep.informed.at(p.id) >= first) rep.feasible = false;
    }
    return rep;
}

} // namespace vemo::testgen
