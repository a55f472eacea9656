#include "vemo/controlplane.hpp"

#include <algorithm>
#include <stdexcept>

#include "vemo/geometry.hpp"

namespace vemo {

Scenario inject_control_traffic(const Scenario& s, const std::string& orchestrator) {
    if (!s.find_platform(orchestrator))
        throw std::invalid_argument("inject_control_traffic: unknown platform \"" + orchestrator +
                                    "\"");
    for (const auto& t : s.tasks)
        if (const auto* c = std::get_if<CommLink>(&t.body); c && c->control)
            throw std::invalid_argument("inject_control_traffic: control traffic already present");

    double max_priority = 0.0;
    for (const auto& t : s.tasks) max_priority = std::max(max_priority, t.priority);

    Scenario out = s;
    for (const auto& p : s.platforms) {
        if (p.id == orchestrator) continue;
        Task t;
        t.id = "control-" + orchestrator + "-" + p.id;
        t.priority = max_priority + 1.0;
        CommLink c;
        c.src = orchestrator;
        c.dst = p.id;
        c.payload_epochs = 1;
        c.control = true;
        t.body = c;
        out.tasks.push_back(std::move(t));
    }
    validate_scenario(out);
    return out;
}

namespace {

struct CommEvent {
    int tx_epoch = 0;
    int rx_epoch = 0;
    std::string src, dst, task;
    auto operator<=>(const CommEvent&) const = default;
};

std::vector<CommEvent> comm_events(const Scenario& s, const Schedule& sched) {
    std::vector<CommEvent> events;
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
            events.push_back({key.epoch, key.epoch + d, c.src, c.dst, task_id});
        }
    }
    std::sort(events.begin(), events.end(),
              [](const CommEvent& a, const CommEvent& b) {
                  if (a.rx_epoch != b.rx_epoch) return a.rx_epoch < b.rx_epoch;
                  if (a.tx_epoch != b.tx_epoch) return a.tx_epoch < b.tx_epoch;
                  return std::tie(a.src, a.dst, a.task) < std::tie(b.src, b.dst, b.task);
              });
    return events;
}

} // namespace

DisseminationReport check_dissemination(const Scenario& s, const Schedule& sched,
                                        const std::string& orchestrator) {
    if (!s.find_platform(orchestrator))
        throw std::invalid_argument("check_dissemination: unknown platform \"" + orchestrator +
                                    "\"");
    DisseminationReport report;
    for (const auto& p : s.platforms) report.informed_epoch[p.id] = kNeverInformed;
    report.informed_epoch[orchestrator] = -1;
    report.relay_paths[orchestrator] = {};

    // one ascending pass is exact: an event can only be enabled by events
    // with strictly earlier rx epochs (src must know before the tx epoch)
    for (const auto& e : comm_events(s, sched)) {
        const int src_informed = report.informed_epoch.at(e.src);
        if (src_informed == kNeverInformed || src_informed >= e.tx_epoch) continue;
        auto& dst_informed = report.informed_epoch.at(e.dst);
        if (dst_informed != kNeverInformed) continue;
        dst_informed = e.rx_epoch;
        auto path = report.relay_paths.at(e.src);
        path.push_back(e.dst);
        report.relay_paths[e.dst] = std::move(path);
    }

    report.feasible = true;
    for (const auto& p : s.platforms) {
        int first_active = kNeverInformed;
        for (const auto& [key, acts] : sched.cells) {
            if (key.platform != p.id || acts.empty()) continue;
            first_active = std::min(first_active, key.epoch);
        }
        if (first_active == kNeverInformed) continue; // idle platforms don't constrain
        if (report.informed_epoch.at(p.id) >= first_active) {
            report.feasible = false;
            break;
        }
    }
    return report;
}

OutageReport simulate_outage(const Scenario& s, const Schedule& sched, const OutageSet& outage) {
    OutageReport report;
    report.baseline = utility(s, sched);

    Schedule degraded = sched;
    std::vector<std::pair<GridKey, std::string>> rx_removals; // (cell, task)
    for (auto& [key, acts] : degraded.cells) {
        for (auto it = acts.begin(); it != acts.end();) {
            bool removed = false;
            if (it->kind == Activity::Kind::tx_comm || (it->kind == Activity::Kind::tx_radar &&
                                                        !it->combined_task.empty())) {
                const bool rider = it->kind == Activity::Kind::tx_radar;
                const std::string task_id = rider ? it->combined_task : it->task;
                const auto& c = std::get<CommLink>(s.find_task(task_id)->body);
                if (outage.count({key.epoch, c.src, c.dst})) {
                    const int d = delay_epochs(path_length(s.find_platform(c.src)->position,
                                                           s.find_platform(c.dst)->position),
                                               s.epoch_duration_s);
                    report.failed.push_back({task_id, key.epoch, c.src, c.dst});
                    rx_removals.push_back({{c.dst, key.epoch + d}, task_id});
                    if (rider) {
                        it->combined_task.clear();
                        it->combined_peer.clear();
                    } else {
                        it = acts.erase(it);
                        removed = true;
                    }
                }
            }
            if (!removed) ++it;
        }
    }
    for (const auto& [cell, task] : rx_removals) {
        auto cit = degraded.cells.find(cell);
        if (cit == degraded.cells.end()) continue;
        auto& acts = cit->second;
        acts.erase(std::remove_if(acts.begin(), acts.end(),
                                  [&](const Activity& a) {
                                      return a.kind == Activity::Kind::rx_comm && a.task == task;
                                  }),
                   acts.end());
    }
    for (auto it = degraded.cells.begin(); it != degraded.cells.end();)
        it = it->second.empty() ? degraded.cells.erase(it) : std::next(it);

    report.degraded = utility(s, degraded);
    return report;
}

} // namespace vemo
