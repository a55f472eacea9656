#include "vemo/schedule.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace vemo {

namespace {

void add_violation(std::vector<Violation>& out, std::string constraint,
                   const std::string& platform, int epoch, std::string detail) {
    out.push_back({std::move(constraint), platform, epoch, std::move(detail)});
}

// Comm pairing delay between two platforms, in epochs.
int comm_delay(const Scenario& s, const Platform& src, const Platform& dst) {
    return delay_epochs(path_length(src.position, dst.position), s.epoch_duration_s);
}

int echo_delay(const Scenario& s, const Platform& illum, const EnemyEmitter& target,
               const Platform& rx) {
    return delay_epochs(echo_path_length(illum.position, target.position, rx.position),
                        s.epoch_duration_s);
}

} // namespace

std::vector<Violation> validate_schedule(const Scenario& s, const Schedule& sched) {
    std::vector<Violation> out;

    // Pass 1: per-cell structure (C1, C2, C5) and id/role resolution.
    for (const auto& [key, acts] : sched.cells) {
        const Platform* plat = s.find_platform(key.platform);
        if (!plat) {
            add_violation(out, "ref", key.platform, key.epoch, "unknown platform id");
            continue;
        }
        if (key.epoch < 0 || key.epoch >= s.num_epochs)
            add_violation(out, "C5", key.platform, key.epoch, "epoch out of range");

        int live = 0, ntx = 0, nrx = 0;
        for (const auto& a : acts) {
            if (a.kind == Activity::Kind::idle) continue;
            ++live;
            ntx += a.is_tx() ? 1 : 0;
            nrx += a.is_rx() ? 1 : 0;
        }
        if (live > 1)
            add_violation(out, "C1", key.platform, key.epoch,
                          std::to_string(live) + " activities on one aperture");
        if (ntx > 0 && nrx > 0)
            add_violation(out, "C2", key.platform, key.epoch,
                          "platform both transmits and receives");

        for (const auto& a : acts) {
            if (a.kind == Activity::Kind::idle) continue;
            const Task* task = s.find_task(a.task);
            if (!task) {
                add_violation(out, "ref", key.platform, key.epoch,
                              "unknown task id \"" + a.task + "\"");
                continue;
            }
            switch (a.kind) {
                case Activity::Kind::tx_comm:
                case Activity::Kind::rx_comm: {
                    const auto* c = std::get_if<CommLink>(&task->body);
                    if (!c) {
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "task \"" + a.task + "\" is not a comm task");
                        break;
                    }
                    const bool tx = a.kind == Activity::Kind::tx_comm;
                    const std::string& self = tx ? c->src : c->dst;
                    const std::string& other = tx ? c->dst : c->src;
                    if (key.platform != self)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "platform is not the task's " + std::string(tx ? "src" : "dst"));
                    if (a.peer != other)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "peer does not match task \"" + a.task + "\"");
                    break;
                }
                case Activity::Kind::tx_radar: {
                    const auto* r = std::get_if<RadarTrack>(&task->body);
                    if (!r) {
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "task \"" + a.task + "\" is not a radar task");
                        break;
                    }
                    if (key.platform != r->illuminator)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "platform is not the task's illuminator");
                    if (!a.combined_task.empty()) {
                        const Task* ct = s.find_task(a.combined_task);
                        const auto* cc = ct ? std::get_if<CommLink>(&ct->body) : nullptr;
                        if (!cc)
                            add_violation(out, "ref", key.platform, key.epoch,
                                          "combined task \"" + a.combined_task + "\" is not a comm task");
                        else {
                            if (cc->src != key.platform)
                                add_violation(out, "ref", key.platform, key.epoch,
                                              "combined comm src is not this platform");
                            if (a.combined_peer != cc->dst)
                                add_violation(out, "ref", key.platform, key.epoch,
                                              "combined peer does not match task");
                            if (s.phy.combine_mode == CombineMode::none)
                                add_violation(out, "ref", key.platform, key.epoch,
                                              "combined emission but combine_mode is none");
                        }
                    }
                    break;
                }
                case Activity::Kind::rx_radar_echo: {
                    const auto* r = std::get_if<RadarTrack>(&task->body);
                    if (!r) {
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "task \"" + a.task + "\" is not a radar task");
                        break;
                    }
                    if (std::find(r->receivers.begin(), r->receivers.end(), key.platform) ==
                        r->receivers.end())
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "platform is not a receiver of task \"" + a.task + "\"");
                    if (a.peer != r->illuminator)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "echo illuminator does not match task");
                    break;
                }
                case Activity::Kind::tx_jam: {
                    const auto* j = std::get_if<JamTask>(&task->body);
                    if (!j) {
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "task \"" + a.task + "\" is not a jam task");
                        break;
                    }
                    if (std::find(j->candidate_jammers.begin(), j->candidate_jammers.end(),
                                  key.platform) == j->candidate_jammers.end())
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "platform is not a candidate jammer");
                    if (a.peer != j->victim)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "victim does not match task");
                    break;
                }
                case Activity::Kind::rx_intercept: {
                    const auto* p = std::get_if<PassiveIntercept>(&task->body);
                    if (!p) {
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "task \"" + a.task + "\" is not an intercept task");
                        break;
                    }
                    if (key.platform != p->listener)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "platform is not the task's listener");
                    if (a.peer != p->source)
                        add_violation(out, "ref", key.platform, key.epoch,
                                      "source does not match task");
                    break;
                }
                default:
                    break;
            }
        }
    }
    if (!out.empty()) return out; // pairing checks assume resolvable cells

    auto has_activity = [&](const std::string& platform, int epoch, auto&& pred) {
        const auto* cell = sched.at(platform, epoch);
        if (!cell) return false;
        return std::any_of(cell->begin(), cell->end(), pred);
    };

    // Pass 2: pairing constraints C3 and C4.
    for (const auto& [key, acts] : sched.cells) {
        for (const auto& a : acts) {
            if (a.kind == Activity::Kind::tx_comm || (a.kind == Activity::Kind::tx_radar &&
                                                      !a.combined_task.empty())) {
                const bool combined = a.kind == Activity::Kind::tx_radar;
                const std::string& task_id = combined ? a.combined_task : a.task;
                const Task* task = s.find_task(task_id);
                const auto& c = std::get<CommLink>(task->body);
                const int d = comm_delay(s, *s.find_platform(c.src), *s.find_platform(c.dst));
                const int rx_epoch = key.epoch + d;
                if (rx_epoch >= s.num_epochs) {
                    add_violation(out, "C5", key.platform, key.epoch,
                                  "comm reception would land past the horizon");
                    continue;
                }
                const bool paired = has_activity(c.dst, rx_epoch, [&](const Activity& b) {
                    return b.kind == Activity::Kind::rx_comm && b.task == task_id;
                });
                if (!paired)
                    add_violation(out, "C3", key.platform, key.epoch,
                                  "TxComm for \"" + task_id + "\" has no RxComm at " + c.dst +
                                      " epoch " + std::to_string(rx_epoch));
            } else if (a.kind == Activity::Kind::rx_comm) {
                const Task* task = s.find_task(a.task);
                const auto& c = std::get<CommLink>(task->body);
                const int d = comm_delay(s, *s.find_platform(c.src), *s.find_platform(c.dst));
                const int tx_epoch = key.epoch - d;
                const bool paired =
                    tx_epoch >= 0 && has_activity(c.src, tx_epoch, [&](const Activity& b) {
                        return (b.kind == Activity::Kind::tx_comm && b.task == a.task) ||
                               (b.kind == Activity::Kind::tx_radar && b.combined_task == a.task);
                    });
                if (!paired)
                    add_violation(out, "C3", key.platform, key.epoch,
                                  "RxComm for \"" + a.task + "\" has no TxComm at " + c.src +
                                      " epoch " + std::to_string(tx_epoch));
            } else if (a.kind == Activity::Kind::rx_radar_echo) {
                const Task* task = s.find_task(a.task);
                const auto& r = std::get<RadarTrack>(task->body);
                const int d = echo_delay(s, *s.find_platform(r.illuminator),
                                         *s.find_emitter(r.target), *s.find_platform(key.platform));
                const int tx_epoch = key.epoch - d;
                if (a.tx_epoch != tx_epoch) {
                    add_violation(out, "C4", key.platform, key.epoch,
                                  "recorded tx_epoch " + std::to_string(a.tx_epoch) +
                                      " does not match geometry (" + std::to_string(tx_epoch) + ")");
                    continue;
                }
                const bool paired =
                    tx_epoch >= 0 && has_activity(r.illuminator, tx_epoch, [&](const Activity& b) {
                        return b.kind == Activity::Kind::tx_radar && b.task == a.task;
                    });
                if (!paired)
                    add_violation(out, "C4", key.platform, key.epoch,
                                  "RxRadarEcho for \"" + a.task + "\" has no TxRadar at " +
                                      r.illuminator + " epoch " + std::to_string(tx_epoch));
            }
        }
    }
    return out;
}

UtilityReport utility(const Scenario& s, const Schedule& sched) {
    const auto violations = validate_schedule(s, sched);
    if (!violations.empty())
        throw std::invalid_argument("utility: schedule does not validate (" +
                                    violations.front().constraint + " at " +
                                    violations.front().platform + ", epoch " +
                                    std::to_string(violations.front().epoch) + ")");

    UtilityReport report;
    for (const auto& t : s.tasks) report.per_task[t.id] = 0.0;

    // Index the grid once per kind of credit.
    std::map<std::string, int> comm_pairs; // task -> scheduled tx units
    std::map<std::string, std::map<int, std::set<std::string>>> echoes; // task -> tx_epoch -> receivers
    std::map<std::string, std::set<int>> radar_pulses; // task -> tx epochs
    std::map<std::string, std::map<int, std::set<std::string>>> jammers; // task -> epoch -> platforms
    std::map<std::string, std::set<int>> listens; // task -> epochs

    for (const auto& [key, acts] : sched.cells) {
        for (const auto& a : acts) {
            switch (a.kind) {
                case Activity::Kind::tx_comm:
                    comm_pairs[a.task] += 1;
                    break;
                case Activity::Kind::tx_radar:
                    radar_pulses[a.task].insert(key.epoch);
                    if (!a.combined_task.empty()) comm_pairs[a.combined_task] += 1;
                    break;
                case Activity::Kind::rx_radar_echo:
                    echoes[a.task][a.tx_epoch].insert(key.platform);
                    break;
                case Activity::Kind::tx_jam:
                    jammers[a.task][key.epoch].insert(key.platform);
                    break;
                case Activity::Kind::rx_intercept:
                    listens[a.task].insert(key.epoch);
                    break;
                default:
                    break;
            }
        }
    }

    for (const auto& t : s.tasks) {
        double sat = 0.0;
        if (const auto* c = std::get_if<CommLink>(&t.body)) {
            const auto it = comm_pairs.find(t.id);
            const int pairs = it == comm_pairs.end() ? 0 : it->second;
            sat = std::min(1.0, static_cast<double>(pairs) / c->payload_epochs);
        } else if (const auto* r = std::get_if<RadarTrack>(&t.body)) {
            int complete = 0;
            if (auto it = radar_pulses.find(t.id); it != radar_pulses.end()) {
                for (int tx_epoch : it->second) {
                    const auto& got = echoes[t.id][tx_epoch];
                    bool all = true;
                    for (const auto& rx : r->receivers)
                        if (!got.count(rx)) { all = false; break; }
                    if (all) ++complete;
                }
            }
            sat = std::min(1.0, static_cast<double>(complete) / r->dwells);
        } else if (const auto* j = std::get_if<JamTask>(&t.body)) {
            int covered = 0;
            for (int epoch : j->cover_epochs) {
                const auto it = jammers.find(t.id);
                if (it == jammers.end()) break;
                const auto eit = it->second.find(epoch);
                if (eit != it->second.end() &&
                    static_cast<int>(eit->second.size()) >= j->jammers_per_epoch)
                    ++covered;
            }
            sat = static_cast<double>(covered) / static_cast<double>(j->cover_epochs.size());
        } else if (const auto* p = std::get_if<PassiveIntercept>(&t.body)) {
            const EnemyEmitter* src = s.find_emitter(p->source);
            int hits = 0;
            if (auto it = listens.find(t.id); it != listens.end())
                for (int epoch : it->second)
                    if (src->active_epochs.count(epoch)) ++hits;
            sat = std::min(1.0, static_cast<double>(hits) / p->dwells);
        }
        report.per_task[t.id] = sat;
        report.total += t.priority * sat;
    }
    return report;
}

namespace {

std::string cell_text(const Scenario& s, const Activity& a) {
    switch (a.kind) {
        case Activity::Kind::idle:
            return "";
        case Activity::Kind::tx_comm:
            return "Comm Tx to " + a.peer;
        case Activity::Kind::rx_comm:
            return "Comm Rx from " + a.peer;
        case Activity::Kind::tx_radar: {
            std::string text = "Tx radar pulse";
            if (!a.combined_task.empty()) text += " + Comm Tx to " + a.combined_peer;
            return text;
        }
        case Activity::Kind::rx_radar_echo: {
            const Task* t = s.find_task(a.task);
            const auto* r = t ? std::get_if<RadarTrack>(&t->body) : nullptr;
            return "Rx radar pulse off " + (r ? r->target : a.peer);
        }
        case Activity::Kind::tx_jam:
            return "Jam Tx to " + a.peer;
        case Activity::Kind::rx_intercept:
            return "ELINT Rx from " + a.peer;
    }
    return "";
}

} // namespace

std::string render_schedule_table(const Scenario& s, const Schedule& sched) {
    const int n = s.num_epochs;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    header.push_back("");
    for (int e = 0; e < n; ++e) header.push_back("Epoch " + std::to_string(e));
    rows.push_back(header);

    for (const auto& p : s.platforms) {
        std::vector<std::string> row;
        row.push_back(p.id);
        for (int e = 0; e < n; ++e) {
            std::string text;
            if (const auto* cell = sched.at(p.id, e)) {
                for (const auto& a : *cell) {
                    if (a.kind == Activity::Kind::idle) continue;
                    if (!text.empty()) text += " / ";
                    text += cell_text(s, a);
                }
            }
            row.push_back(text);
        }
        rows.push_back(row);
    }

    std::vector<std::size_t> width(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            if (c) out << " | ";
            out << rows[i][c];
            out << std::string(width[c] - rows[i][c].size(), ' ');
        }
        out << "\n";
        if (i == 0) {
            std::size_t total = 0;
            for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 3 : 0);
            out << std::string(total, '-') << "\n";
        }
    }
    return out.str();
}

const char* to_string(Activity::Kind k) {
    switch (k) {
        case Activity::Kind::idle: return "idle";
        case Activity::Kind::tx_comm: return "tx_comm";
        case Activity::Kind::rx_comm: return "rx_comm";
        case Activity::Kind::tx_radar: return "tx_radar";
        case Activity::Kind::rx_radar_echo: return "rx_radar_echo";
        case Activity::Kind::tx_jam: return "tx_jam";
        case Activity::Kind::rx_intercept: return "rx_intercept";
    }
    return "idle";
}

std::string schedule_to_csv(const Schedule& sched) {
    std::ostringstream out;
    out << "platform_id,epoch,activity,task_id,peer_or_target,tx_epoch\n";
    for (const auto& [key, acts] : sched.cells) {
        for (const auto& a : acts) {
            if (a.kind == Activity::Kind::idle) continue;
            out << key.platform << "," << key.epoch << "," << to_string(a.kind) << "," << a.task
                << "," << a.peer << ",";
            if (a.kind == Activity::Kind::rx_radar_echo) out << a.tx_epoch;
            out << "\n";
            if (a.kind == Activity::Kind::tx_radar && !a.combined_task.empty())
                out << key.platform << "," << key.epoch << ",tx_comm_combined," << a.combined_task
                    << "," << a.combined_peer << ",\n";
        }
    }
    return out.str();
}

Schedule parse_schedule_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("schedule csv: empty document");
    if (line.ends_with("\r")) line.pop_back();
    if (line != "platform_id,epoch,activity,task_id,peer_or_target,tx_epoch")
        throw std::invalid_argument("schedule csv: unexpected header \"" + line + "\"");

    Schedule sched;
    std::vector<std::tuple<std::string, int, std::string, std::string>> combined;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) f.push_back(field);
        while (f.size() < 6) f.push_back("");
        if (f.size() != 6)
            throw std::invalid_argument("schedule csv line " + std::to_string(lineno) +
                                        ": expected 6 fields");
        const std::string& platform = f[0];
        int epoch = 0;
        try {
            epoch = std::stoi(f[1]);
        } catch (...) {
            throw std::invalid_argument("schedule csv line " + std::to_string(lineno) +
                                        ": bad epoch \"" + f[1] + "\"");
        }
        const std::string& kind_s = f[2];
        if (kind_s == "tx_comm_combined") {
            combined.emplace_back(platform, epoch, f[3], f[4]);
            continue;
        }
        Activity a;
        if (kind_s == "tx_comm") a.kind = Activity::Kind::tx_comm;
        else if (kind_s == "rx_comm") a.kind = Activity::Kind::rx_comm;
        else if (kind_s == "tx_radar") a.kind = Activity::Kind::tx_radar;
        else if (kind_s == "rx_radar_echo") a.kind = Activity::Kind::rx_radar_echo;
        else if (kind_s == "tx_jam") a.kind = Activity::Kind::tx_jam;
        else if (kind_s == "rx_intercept") a.kind = Activity::Kind::rx_intercept;
        else
            throw std::invalid_argument("schedule csv line " + std::to_string(lineno) +
                                        ": unknown activity \"" + kind_s + "\"");
        a.task = f[3];
        a.peer = f[4];
        if (a.kind == Activity::Kind::rx_radar_echo) {
            try {
                a.tx_epoch = std::stoi(f[5]);
            } catch (...) {
                throw std::invalid_argument("schedule csv line " + std::to_string(lineno) +
                                            ": rx_radar_echo requires tx_epoch");
            }
        }
        sched.add(platform, epoch, std::move(a));
    }

    for (const auto& [platform, epoch, task, peer] : combined) {
        auto it = sched.cells.find({platform, epoch});
        bool attached = false;
        if (it != sched.cells.end()) {
            for (auto& a : it->second) {
                if (a.kind == Activity::Kind::tx_radar && a.combined_task.empty()) {
                    a.combined_task = task;
                    a.combined_peer = peer;
                    attached = true;
                    break;
                }
            }
        }
        if (!attached)
            throw std::invalid_argument("schedule csv: tx_comm_combined for \"" + task +
                                        "\" has no tx_radar cell at " + platform + "," +
                                        std::to_string(epoch));
    }
    return sched;
}

} // namespace vemo
