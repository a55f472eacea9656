#pragma once

#include "vemo/scenario.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace vemo {

// One platform-epoch cell entry. `peer` holds the counterpart the activity
// points at: comm peer platform, jam victim emitter, intercept source emitter,
// or the illuminator for an echo reception.
//
// A TxRadar cell may additionally carry one comm payload unit riding the same
// emission (NOMA layering or OFDM partition, per the scenario combine_mode).
// The combined unit occupies no extra aperture slot; it is paired with the
// destination's RxComm exactly like a TxComm would be.
struct Activity {
    enum class Kind {
        idle,
        tx_comm,
        rx_comm,
        tx_radar,
        rx_radar_echo,
        tx_jam,
        rx_intercept,
    };

    Kind kind = Kind::idle;
    std::string task;
    std::string peer;
    int tx_epoch = -1; // rx_radar_echo: epoch of the paired TxRadar

    std::string combined_task; // tx_radar only; empty when no piggyback
    std::string combined_peer;

    bool is_tx() const {
        return kind == Kind::tx_comm || kind == Kind::tx_radar || kind == Kind::tx_jam;
    }
    bool is_rx() const {
        return kind == Kind::rx_comm || kind == Kind::rx_radar_echo || kind == Kind::rx_intercept;
    }

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct GridKey {
    std::string platform;
    int epoch = 0;

    auto operator<=>(const GridKey&) const = default;
};

// Sparse activity grid; absent cells are Idle. Cells hold a vector so that
// constraint violations (double-booked apertures) are representable and can
// be reported rather than silently impossible.
struct Schedule {
    std::map<GridKey, std::vector<Activity>> cells;

    void add(const std::string& platform, int epoch, Activity a) {
        cells[{platform, epoch}].push_back(std::move(a));
    }
    const std::vector<Activity>* at(const std::string& platform, int epoch) const {
        auto it = cells.find({platform, epoch});
        return it == cells.end() ? nullptr : &it->second;
    }
    bool empty() const { return cells.empty(); }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct Violation {
    std::string constraint; // "C1".."C5", or "ref" for unresolved/mismatched ids
    std::string platform;
    int epoch = 0;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct UtilityReport {
    double total = 0.0;
    std::map<std::string, double> per_task; // task id -> satisfaction in [0, 1]
};

// Checks C1 (single aperture), C2 (half-duplex), C3 (comm pairing with
// delay offsets), C4 (radar echo pairing), C5 (epoch bounds), plus id/role
// resolution. Empty result means the schedule is feasible.
std::vector<Violation> validate_schedule(const Scenario& s, const Schedule& sched);

// Weighted mission satisfaction. Throws std::invalid_argument when the
// schedule does not validate.
UtilityReport utility(const Scenario& s, const Schedule& sched);

// Fig.-4-style text table: rows are platforms, columns are epochs.
std::string render_schedule_table(const Scenario& s, const Schedule& sched);

// CSV with columns platform_id,epoch,activity,task_id,peer_or_target,tx_epoch.
// A combined comm unit is exported as an extra "tx_comm_combined" row for the
// same platform-epoch; parse_schedule_csv folds it back into the radar cell.
std::string schedule_to_csv(const Schedule& sched);
Schedule parse_schedule_csv(const std::string& text);

const char* to_string(Activity::Kind k);

} // namespace vemo
