#include "vemo/scheduler.hpp"

#include <algorithm>
#include <optional>
#include <vector>

#include "vemo/geometry.hpp"
#include "vemo/rng.hpp"

namespace vemo {

namespace {

int comm_delay(const Scenario& s, const CommLink& c) {
    return delay_epochs(
        path_length(s.find_platform(c.src)->position, s.find_platform(c.dst)->position),
        s.epoch_duration_s);
}

std::vector<int> echo_delays(const Scenario& s, const RadarTrack& r) {
    const Vec3 illum = s.find_platform(r.illuminator)->position;
    const Vec3 target = s.find_emitter(r.target)->position;
    std::vector<int> d;
    d.reserve(r.receivers.size());
    for (const auto& rx : r.receivers)
        d.push_back(delay_epochs(echo_path_length(illum, target, s.find_platform(rx)->position),
                                 s.epoch_duration_s));
    return d;
}

bool cell_free(const Schedule& sched, const std::string& platform, int epoch) {
    const auto* cell = sched.at(platform, epoch);
    return !cell || cell->empty();
}

// The tx_radar activity at (platform, epoch) that can still take a comm
// rider, or nullptr.
Activity* piggyback_slot(const Scenario& s, Schedule& sched, const std::string& platform,
                         int epoch) {
    if (s.phy.combine_mode == CombineMode::none) return nullptr;
    auto it = sched.cells.find({platform, epoch});
    if (it == sched.cells.end() || it->second.size() != 1) return nullptr;
    Activity& a = it->second.front();
    if (a.kind != Activity::Kind::tx_radar || !a.combined_task.empty()) return nullptr;
    return &a;
}

// One placed unit, remembered well enough to undo it.
struct AppliedUnit {
    std::vector<GridKey> added;
    bool piggy = false;
    GridKey piggy_cell;
    std::string piggy_task;
};

void undo_unit(Schedule& sched, const AppliedUnit& u) {
    for (auto it = u.added.rbegin(); it != u.added.rend(); ++it) {
        auto cit = sched.cells.find(*it);
        cit->second.pop_back();
        if (cit->second.empty()) sched.cells.erase(cit);
    }
    if (u.piggy) {
        for (auto& a : sched.cells.at(u.piggy_cell)) {
            if (a.kind == Activity::Kind::tx_radar && a.combined_task == u.piggy_task) {
                a.combined_task.clear();
                a.combined_peer.clear();
                break;
            }
        }
    }
}

enum class CommMode { any, normal, piggy };

std::optional<AppliedUnit> try_place_comm_unit(const Scenario& s, Schedule& sched,
                                               const std::string& task_id, const CommLink& c,
                                               int tx_epoch, int delay, CommMode mode) {
    const int rx_epoch = tx_epoch + delay;
    if (tx_epoch < 0 || rx_epoch >= s.num_epochs) return std::nullopt;
    if (!cell_free(sched, c.dst, rx_epoch)) return std::nullopt;

    AppliedUnit unit;
    Activity* rider = mode == CommMode::normal ? nullptr
                                               : piggyback_slot(s, sched, c.src, tx_epoch);
    if (rider) {
        rider->combined_task = task_id;
        rider->combined_peer = c.dst;
        unit.piggy = true;
        unit.piggy_cell = {c.src, tx_epoch};
        unit.piggy_task = task_id;
    } else {
        if (mode == CommMode::piggy || !cell_free(sched, c.src, tx_epoch)) return std::nullopt;
        Activity tx;
        tx.kind = Activity::Kind::tx_comm;
        tx.task = task_id;
        tx.peer = c.dst;
        sched.add(c.src, tx_epoch, std::move(tx));
        unit.added.push_back({c.src, tx_epoch});
    }
    Activity rx;
    rx.kind = Activity::Kind::rx_comm;
    rx.task = task_id;
    rx.peer = c.src;
    sched.add(c.dst, rx_epoch, std::move(rx));
    unit.added.push_back({c.dst, rx_epoch});
    return unit;
}

std::optional<AppliedUnit> try_place_radar_dwell(const Scenario& s, Schedule& sched,
                                                 const std::string& task_id, const RadarTrack& r,
                                                 int tx_epoch, const std::vector<int>& delays) {
    if (tx_epoch < 0 || tx_epoch >= s.num_epochs) return std::nullopt;
    if (!cell_free(sched, r.illuminator, tx_epoch)) return std::nullopt;
    for (std::size_t i = 0; i < r.receivers.size(); ++i) {
        const int e = tx_epoch + delays[i];
        if (e >= s.num_epochs) return std::nullopt;
        if (!cell_free(sched, r.receivers[i], e)) return std::nullopt;
        if (r.receivers[i] == r.illuminator && delays[i] == 0) return std::nullopt;
    }

    AppliedUnit unit;
    Activity tx;
    tx.kind = Activity::Kind::tx_radar;
    tx.task = task_id;
    tx.peer = r.target;
    sched.add(r.illuminator, tx_epoch, std::move(tx));
    unit.added.push_back({r.illuminator, tx_epoch});
    for (std::size_t i = 0; i < r.receivers.size(); ++i) {
        const int e = tx_epoch + delays[i];
        if (!cell_free(sched, r.receivers[i], e)) { // duplicate receiver entry
            undo_unit(sched, unit);
            return std::nullopt;
        }
        Activity rx;
        rx.kind = Activity::Kind::rx_radar_echo;
        rx.task = task_id;
        rx.peer = r.illuminator;
        rx.tx_epoch = tx_epoch;
        sched.add(r.receivers[i], e, std::move(rx));
        unit.added.push_back({r.receivers[i], e});
    }
    return unit;
}

std::optional<AppliedUnit> try_place_jam_epoch(const Scenario& s, Schedule& sched,
                                               const std::string& task_id, const JamTask& j,
                                               int epoch,
                                               const std::vector<std::string>& jammers) {
    if (epoch < 0 || epoch >= s.num_epochs) return std::nullopt;
    for (const auto& p : jammers)
        if (!cell_free(sched, p, epoch)) return std::nullopt;
    AppliedUnit unit;
    for (const auto& p : jammers) {
        Activity tx;
        tx.kind = Activity::Kind::tx_jam;
        tx.task = task_id;
        tx.peer = j.victim;
        sched.add(p, epoch, std::move(tx));
        unit.added.push_back({p, epoch});
    }
    return unit;
}

std::optional<AppliedUnit> try_place_intercept(const Scenario& s, Schedule& sched,
                                               const std::string& task_id,
                                               const PassiveIntercept& p, int epoch) {
    if (epoch < 0 || epoch >= s.num_epochs) return std::nullopt;
    if (!cell_free(sched, p.listener, epoch)) return std::nullopt;
    AppliedUnit unit;
    Activity rx;
    rx.kind = Activity::Kind::rx_intercept;
    rx.task = task_id;
    rx.peer = p.source;
    sched.add(p.listener, epoch, std::move(rx));
    unit.added.push_back({p.listener, epoch});
    return unit;
}

// First combination of `k` free candidates, in listed order. Greedy only.
std::optional<AppliedUnit> try_place_jam_epoch_greedy(const Scenario& s, Schedule& sched,
                                                      const std::string& task_id, const JamTask& j,
                                                      int epoch) {
    std::vector<std::string> picked;
    for (const auto& cand : j.candidate_jammers) {
        if (static_cast<int>(picked.size()) == j.jammers_per_epoch) break;
        if (cell_free(sched, cand, epoch)) picked.push_back(cand);
    }
    if (static_cast<int>(picked.size()) < j.jammers_per_epoch) return std::nullopt;
    return try_place_jam_epoch(s, sched, task_id, j, epoch, picked);
}

// Places as many units of `task` as still fit, trying tx epochs in the given
// order. Returns the number of units added.
int place_task_units(const Scenario& s, Schedule& sched, const Task& task,
                     const std::vector<int>& epoch_order) {
    int placed = 0;
    if (const auto* c = std::get_if<CommLink>(&task.body)) {
        const int d = comm_delay(s, *c);
        int have = 0; // units already on the grid (after partial removal there are none)
        for (const auto& [key, acts] : sched.cells)
            for (const auto& a : acts)
                if ((a.kind == Activity::Kind::tx_comm && a.task == task.id) ||
                    (a.kind == Activity::Kind::tx_radar && a.combined_task == task.id))
                    ++have;
        for (int e : epoch_order) {
            if (have + placed >= c->payload_epochs) break;
            if (try_place_comm_unit(s, sched, task.id, *c, e, d, CommMode::any)) ++placed;
        }
    } else if (const auto* r = std::get_if<RadarTrack>(&task.body)) {
        const auto delays = echo_delays(s, *r);
        int have = 0;
        for (const auto& [key, acts] : sched.cells)
            for (const auto& a : acts)
                if (a.kind == Activity::Kind::tx_radar && a.task == task.id) ++have;
        for (int e : epoch_order) {
            if (have + placed >= r->dwells) break;
            if (try_place_radar_dwell(s, sched, task.id, *r, e, delays)) ++placed;
        }
    } else if (const auto* j = std::get_if<JamTask>(&task.body)) {
        for (int e : epoch_order) {
            if (!j->cover_epochs.count(e)) continue;
            int n = 0; // jammers this task already has at e
            for (const auto& [key, acts] : sched.cells) {
                if (key.epoch != e) continue;
                for (const auto& a : acts)
                    if (a.kind == Activity::Kind::tx_jam && a.task == task.id) ++n;
            }
            if (n >= j->jammers_per_epoch) continue;
            if (try_place_jam_epoch_greedy(s, sched, task.id, *j, e)) ++placed;
        }
    } else if (const auto* p = std::get_if<PassiveIntercept>(&task.body)) {
        const EnemyEmitter* src = s.find_emitter(p->source);
        int have = 0;
        for (const auto& [key, acts] : sched.cells)
            for (const auto& a : acts)
                if (a.kind == Activity::Kind::rx_intercept && a.task == task.id &&
                    src->active_epochs.count(key.epoch))
                    ++have;
        for (int e : epoch_order) {
            if (have + placed >= p->dwells) break;
            if (!src->active_epochs.count(e)) continue;
            if (try_place_intercept(s, sched, task.id, *p, e)) ++placed;
        }
    }
    return placed;
}

std::vector<const Task*> priority_order(const Scenario& s) {
    std::vector<const Task*> order;
    order.reserve(s.tasks.size());
    for (const auto& t : s.tasks) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const Task* a, const Task* b) {
        if (a->priority != b->priority) return a->priority > b->priority;
        return a->id < b->id;
    });
    return order;
}

std::vector<int> ascending_epochs(int n) {
    std::vector<int> e(n);
    for (int i = 0; i < n; ++i) e[i] = i;
    return e;
}

Schedule greedy_build(const Scenario& s) {
    Schedule sched;
    const auto epochs = ascending_epochs(s.num_epochs);
    for (const Task* t : priority_order(s)) place_task_units(s, sched, *t, epochs);
    return sched;
}

// Removes every activity of `task_id`. A comm task riding a removed radar tx
// loses its pairing, so its rx side is removed too and the id is reported
// back for re-placement.
std::vector<std::string> remove_task(Schedule& sched, const std::string& task_id) {
    std::vector<std::string> displaced;
    for (auto it = sched.cells.begin(); it != sched.cells.end();) {
        auto& acts = it->second;
        for (auto& a : acts) {
            if (a.kind == Activity::Kind::tx_radar && a.combined_task == task_id) {
                a.combined_task.clear();
                a.combined_peer.clear();
            }
        }
        acts.erase(std::remove_if(acts.begin(), acts.end(),
                                  [&](const Activity& a) {
                                      if (a.task != task_id) return false;
                                      if (a.kind == Activity::Kind::tx_radar &&
                                          !a.combined_task.empty())
                                          displaced.push_back(a.combined_task);
                                      return true;
                                  }),
                   acts.end());
        if (acts.empty())
            it = sched.cells.erase(it);
        else
            ++it;
    }
    for (const auto& d : displaced) remove_task(sched, d);
    std::sort(displaced.begin(), displaced.end());
    displaced.erase(std::unique(displaced.begin(), displaced.end()), displaced.end());
    return displaced;
}

std::vector<int> rotated_epochs(int n, int offset) {
    std::vector<int> e(n);
    for (int i = 0; i < n; ++i) e[i] = (i + offset) % n;
    return e;
}

std::string unscheduled_reason(const Scenario& s, const Task& t, double satisfaction) {
    if (const auto* c = std::get_if<CommLink>(&t.body)) {
        const int d = comm_delay(s, *c);
        if (d >= s.num_epochs)
            return "propagation delay of " + std::to_string(d) +
                   " epochs leaves no feasible Tx/Rx pairing";
        const int placed = static_cast<int>(satisfaction * c->payload_epochs + 0.5);
        return "contention: placed " + std::to_string(placed) + " of " +
               std::to_string(c->payload_epochs) + " payload epochs";
    }
    if (const auto* r = std::get_if<RadarTrack>(&t.body)) {
        const auto delays = echo_delays(s, *r);
        const int worst = delays.empty() ? 0 : *std::max_element(delays.begin(), delays.end());
        if (worst >= s.num_epochs)
            return "echo delay of " + std::to_string(worst) + " epochs exceeds the horizon";
        const int placed = static_cast<int>(satisfaction * r->dwells + 0.5);
        return "contention: completed " + std::to_string(placed) + " of " +
               std::to_string(r->dwells) + " dwells";
    }
    if (const auto* j = std::get_if<JamTask>(&t.body)) {
        if (static_cast<int>(j->candidate_jammers.size()) < j->jammers_per_epoch)
            return "fewer candidate jammers than jammers_per_epoch";
        const int covered =
            static_cast<int>(satisfaction * static_cast<double>(j->cover_epochs.size()) + 0.5);
        return "contention: covered " + std::to_string(covered) + " of " +
               std::to_string(j->cover_epochs.size()) + " cover epochs";
    }
    if (const auto* p = std::get_if<PassiveIntercept>(&t.body)) {
        int active = 0;
        for (int e : s.find_emitter(p->source)->active_epochs)
            if (e >= 0 && e < s.num_epochs) ++active;
        if (active < p->dwells)
            return "source only active in " + std::to_string(active) + " of " +
                   std::to_string(p->dwells) + " required epochs";
        const int placed = static_cast<int>(satisfaction * p->dwells + 0.5);
        return "contention: listened " + std::to_string(placed) + " of " +
               std::to_string(p->dwells) + " dwells";
    }
    return "unsatisfied";
}

} // namespace

BuildResult build_schedule(const Scenario& s, int budget, std::uint64_t seed) {
    Schedule best = greedy_build(s);
    double best_util = utility(s, best).total;

    const int ntasks = static_cast<int>(s.tasks.size());
    if (ntasks > 0 && s.num_epochs > 0) {
        auto g = rng::engine(rng::derive(seed, "schedule-climb"));
        const auto order = priority_order(s);
        // 0: remove one task and re-place it at a rotated epoch offset.
        // 1: remove two tasks and re-place them in reversed order.
        // 2: drop one task so lower-priority tasks can take its cells.
        // 3: rebuild from empty without one task, at a rotated epoch offset.
        for (int iter = 0; iter < budget; ++iter) {
            int move = static_cast<int>(g() % 4);
            if (move == 1 && ntasks < 2) move = 0;
            const int i = static_cast<int>(g() % ntasks);
            int j = i;
            if (move == 1) {
                j = static_cast<int>(g() % (ntasks - 1));
                if (j >= i) ++j;
            }
            const int offset = static_cast<int>(g() % s.num_epochs);
            const auto epochs = rotated_epochs(s.num_epochs, offset);

            Schedule cand;
            if (move == 3) {
                for (const Task* t : order) {
                    if (t->id == s.tasks[i].id) continue;
                    place_task_units(s, cand, *t, epochs);
                }
            } else {
                cand = best;
                std::vector<std::string> affected{s.tasks[i].id};
                if (move == 1) affected.push_back(s.tasks[j].id);
                std::vector<std::string> displaced;
                for (const auto& id : affected) {
                    auto d = remove_task(cand, id);
                    displaced.insert(displaced.end(), d.begin(), d.end());
                }
                if (move == 1) std::swap(affected[0], affected[1]); // re-place in reversed order
                std::vector<std::string> queue;
                if (move != 2) queue = affected;
                std::sort(displaced.begin(), displaced.end());
                for (const auto& id : displaced)
                    if (std::find(queue.begin(), queue.end(), id) == queue.end())
                        queue.push_back(id);

                for (const auto& id : queue) place_task_units(s, cand, *s.find_task(id), epochs);
                // fill pass: any task may pick up freed slots (a dropped task stays out)
                const auto fill = ascending_epochs(s.num_epochs);
                for (const Task* t : order) {
                    if (move == 2 && t->id == s.tasks[i].id) continue;
                    place_task_units(s, cand, *t, fill);
                }
            }

            const double u = utility(s, cand).total;
            if (u > best_util + 1e-12) {
                best = std::move(cand);
                best_util = u;
            }
        }
    }

    BuildResult result;
    result.schedule = std::move(best);
    const auto report = utility(s, result.schedule);
    for (const auto& t : s.tasks) {
        const double sat = report.per_task.at(t.id);
        if (sat < 1.0 - 1e-12)
            result.unscheduled[t.id] = unscheduled_reason(s, t, sat);
    }
    return result;
}

namespace {

// Enumerated placement options for one unit of one task.
struct TaskPlan {
    const Task* task = nullptr;
    int units = 0;
    // comm
    const CommLink* comm = nullptr;
    int comm_d = 0;
    // radar
    const RadarTrack* radar = nullptr;
    std::vector<int> radar_delays;
    // jam
    const JamTask* jam = nullptr;
    std::vector<int> jam_epochs;
    std::vector<std::vector<std::string>> jam_combos;
    // intercept
    const PassiveIntercept* icpt = nullptr;
    std::vector<int> icpt_epochs;
};

void jam_combinations(const std::vector<std::string>& cands, int k,
                      std::vector<std::vector<std::string>>& out) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    const int n = static_cast<int>(cands.size());
    if (k > n || k <= 0) return;
    while (true) {
        std::vector<std::string> combo;
        combo.reserve(k);
        for (int i : idx) combo.push_back(cands[i]);
        out.push_back(std::move(combo));
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
}

// Rough upper bound on the number of complete assignments, saturating at the
// cap sentinel. Used for the upfront refusal.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, std::uint64_t lim) {
    if (a == 0 || b == 0) return 0;
    if (a > lim / b) return lim + 1;
    return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, int exp, std::uint64_t lim) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r = saturating_mul(r, base, lim);
        if (r > lim) return r;
    }
    return r;
}

struct Searcher {
    const Scenario& s;
    std::uint64_t cap;
    std::vector<TaskPlan> plans;
    Schedule current;
    Schedule best;
    double best_util = -1.0;
    std::uint64_t leaves = 0;

    void leaf() {
        if (++leaves > cap)
            throw CapExceeded("exhaustive search exceeded the cap of " + std::to_string(cap) +
                              " assignments");
        const double u = utility(s, current).total;
        if (u > best_util + 1e-12) {
            best = current;
            best_util = u;
        }
    }

    void search_task(std::size_t ti, int unit, int min_epoch) {
        if (ti == plans.size()) {
            leaf();
            return;
        }
        const TaskPlan& plan = plans[ti];
        if (unit >= plan.units) {
            search_task(ti + 1, 0, 0);
            return;
        }
        if (plan.comm) {
            for (int e = min_epoch; e < s.num_epochs; ++e) {
                // piggyback option first, then a regular tx slot
                for (CommMode mode : {CommMode::piggy, CommMode::normal}) {
                    auto u = try_place_comm_unit(s, current, plan.task->id, *plan.comm, e,
                                                 plan.comm_d, mode);
                    if (!u) continue;
                    search_task(ti, unit + 1, e + 1);
                    undo_unit(current, *u);
                }
            }
            search_task(ti + 1, 0, 0); // stop placing units of this task
        } else if (plan.radar) {
            for (int e = min_epoch; e < s.num_epochs; ++e) {
                auto u = try_place_radar_dwell(s, current, plan.task->id, *plan.radar, e,
                                               plan.radar_delays);
                if (!u) continue;
                search_task(ti, unit + 1, e + 1);
                undo_unit(current, *u);
            }
            search_task(ti + 1, 0, 0);
        } else if (plan.jam) {
            // one decision per cover epoch: some jammer combo, or leave it dark
            const int e = plan.jam_epochs[unit];
            for (const auto& combo : plan.jam_combos) {
                auto u = try_place_jam_epoch(s, current, plan.task->id, *plan.jam, e, combo);
                if (!u) continue;
                search_task(ti, unit + 1, 0);
                undo_unit(current, *u);
            }
            search_task(ti, unit + 1, 0);
        } else if (plan.icpt) {
            for (int k = min_epoch; k < static_cast<int>(plan.icpt_epochs.size()); ++k) {
                auto u = try_place_intercept(s, current, plan.task->id, *plan.icpt,
                                             plan.icpt_epochs[k]);
                if (!u) continue;
                search_task(ti, unit + 1, k + 1);
                undo_unit(current, *u);
            }
            search_task(ti + 1, 0, 0);
        } else {
            search_task(ti + 1, 0, 0);
        }
    }
};

} // namespace

Schedule exhaustive_optimal(const Scenario& s, std::uint64_t combo_cap) {
    std::vector<TaskPlan> plans;
    plans.reserve(s.tasks.size());
    for (const auto& t : s.tasks) {
        TaskPlan plan;
        plan.task = &t;
        if (const auto* c = std::get_if<CommLink>(&t.body)) {
            plan.comm = c;
            plan.comm_d = comm_delay(s, *c);
            plan.units = std::min(c->payload_epochs, s.num_epochs);
        } else if (const auto* r = std::get_if<RadarTrack>(&t.body)) {
            plan.radar = r;
            plan.radar_delays = echo_delays(s, *r);
            plan.units = std::min(r->dwells, s.num_epochs);
        } else if (const auto* j = std::get_if<JamTask>(&t.body)) {
            plan.jam = j;
            plan.jam_epochs.assign(j->cover_epochs.begin(), j->cover_epochs.end());
            jam_combinations(j->candidate_jammers, j->jammers_per_epoch, plan.jam_combos);
            plan.units = static_cast<int>(plan.jam_epochs.size());
        } else if (const auto* p = std::get_if<PassiveIntercept>(&t.body)) {
            plan.icpt = p;
            for (int e : s.find_emitter(p->source)->active_epochs)
                if (e >= 0 && e < s.num_epochs) plan.icpt_epochs.push_back(e);
            plan.units = std::min(p->dwells, static_cast<int>(plan.icpt_epochs.size()));
        }
        plans.push_back(std::move(plan));
    }

    // Radar before comm so piggyback placements are reachable; ids otherwise.
    std::sort(plans.begin(), plans.end(), [&](const TaskPlan& a, const TaskPlan& b) {
        if (s.phy.combine_mode != CombineMode::none && (a.radar != nullptr) != (b.radar != nullptr))
            return a.radar != nullptr;
        return a.task->id < b.task->id;
    });

    // Upfront size estimate; the leaf counter backs it up during the search.
    std::uint64_t estimate = 1;
    for (const auto& plan : plans) {
        std::uint64_t per_unit = 1;
        if (plan.comm)
            per_unit = static_cast<std::uint64_t>(std::max(0, s.num_epochs - plan.comm_d)) *
                           (s.phy.combine_mode != CombineMode::none ? 2 : 1) + 1;
        else if (plan.radar)
            per_unit = static_cast<std::uint64_t>(s.num_epochs) + 1;
        else if (plan.jam)
            per_unit = plan.jam_combos.size() + 1;
        else if (plan.icpt)
            per_unit = plan.icpt_epochs.size() + 1;
        estimate = saturating_mul(estimate, saturating_pow(per_unit, plan.units, combo_cap),
                                  combo_cap);
        if (estimate > combo_cap)
            throw CapExceeded("placement space estimate exceeds the cap of " +
                              std::to_string(combo_cap) + " assignments");
    }

    Searcher searcher{s, combo_cap, std::move(plans), {}, {}, -1.0, 0};
    searcher.search_task(0, 0, 0);
    return searcher.best;
}

} // namespace vemo
