#include "vemo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

// nlohmann::json with std::map keeps object keys sorted, which is exactly the
// canonical rendering we want.
using json = nlohmann::json;

namespace vemo {

namespace {

[[noreturn]] void fail(const char* kind, const std::string& path, const std::string& msg) {
    throw ScenarioError(kind, path, msg);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) fail("unknown-key", path + "." + it.key(), "unknown key \"" + it.key() + "\"");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail("invariant", path + "." + key, "missing required key");
    return *it;
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail("type", path, "expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail("type", path, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail("type", path, "expected a string");
    return v.get<std::string>();
}

Vec3 get_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) fail("type", path, "expected [x, y, z]");
    Vec3 p{get_number(v[0], path + "[0]"), get_number(v[1], path + "[1]"),
           get_number(v[2], path + "[2]")};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        fail("invariant", path, "coordinates must be finite");
    return p;
}

std::set<int> get_epoch_set(const json& v, const std::string& path) {
    if (!v.is_array()) fail("type", path, "expected an array of epoch indices");
    std::set<int> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.insert(get_int(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::string> get_id_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail("type", path, "expected an array of ids");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        fail("invariant", path, "duplicate id in list");
    return out;
}

std::vector<int> get_subcarrier_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail("type", path, "expected an array of subcarrier indices");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(get_int(v[i], path + "[" + std::to_string(i) + "]"));
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        fail("invariant", path, "duplicate subcarrier index");
    return out;
}

PlatformKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "aircraft") return PlatformKind::aircraft;
    if (s == "ground") return PlatformKind::ground;
    if (s == "ship") return PlatformKind::ship;
    if (s == "uav") return PlatformKind::uav;
    fail("type", path, "unknown platform kind \"" + s + "\"");
}

Modulation parse_modulation(const std::string& s, const std::string& path) {
    if (s == "qpsk") return Modulation::qpsk;
    if (s == "bpsk_robust") return Modulation::bpsk_robust;
    fail("type", path, "unknown modulation \"" + s + "\"");
}

CombineMode parse_combine(const std::string& s, const std::string& path) {
    if (s == "none") return CombineMode::none;
    if (s == "noma") return CombineMode::noma;
    if (s == "ofdm_partition") return CombineMode::ofdm_partition;
    fail("type", path, "unknown combine_mode \"" + s + "\"");
}

PhyDefaults parse_phy(const json& v, const std::string& path) {
    check_keys(v, path,
               {"ref_gain", "noise_power", "sample_rate_epochs", "seed", "n_subcarriers",
                "cp_len", "comm_subcarriers", "radar_subcarriers", "modulation",
                "noma_split_db", "transec_key", "combine_mode", "reflectivity",
                "radar_pulse_symbols", "threshold_k"});
    PhyDefaults phy;
    if (auto it = v.find("ref_gain"); it != v.end())
        phy.ref_gain = get_number(*it, path + ".ref_gain");
    if (auto it = v.find("noise_power"); it != v.end())
        phy.noise_power = get_number(*it, path + ".noise_power");
    if (auto it = v.find("sample_rate_epochs"); it != v.end())
        phy.sample_rate_epochs = get_int(*it, path + ".sample_rate_epochs");
    if (auto it = v.find("seed"); it != v.end()) {
        if (!it->is_number_unsigned() && !it->is_number_integer())
            fail("type", path + ".seed", "expected an integer");
        phy.seed = it->get<std::uint64_t>();
    }
    if (auto it = v.find("n_subcarriers"); it != v.end())
        phy.n_subcarriers = get_int(*it, path + ".n_subcarriers");
    if (auto it = v.find("cp_len"); it != v.end())
        phy.cp_len = get_int(*it, path + ".cp_len");
    if (auto it = v.find("comm_subcarriers"); it != v.end())
        phy.comm_subcarriers = get_subcarrier_list(*it, path + ".comm_subcarriers");
    if (auto it = v.find("radar_subcarriers"); it != v.end())
        phy.radar_subcarriers = get_subcarrier_list(*it, path + ".radar_subcarriers");
    if (auto it = v.find("modulation"); it != v.end())
        phy.modulation = parse_modulation(get_string(*it, path + ".modulation"), path + ".modulation");
    if (auto it = v.find("noma_split_db"); it != v.end())
        phy.noma_split_db = get_number(*it, path + ".noma_split_db");
    if (auto it = v.find("transec_key"); it != v.end())
        phy.transec_key = get_string(*it, path + ".transec_key");
    if (auto it = v.find("combine_mode"); it != v.end())
        phy.combine_mode = parse_combine(get_string(*it, path + ".combine_mode"), path + ".combine_mode");
    if (auto it = v.find("reflectivity"); it != v.end())
        phy.reflectivity = get_number(*it, path + ".reflectivity");
    if (auto it = v.find("radar_pulse_symbols"); it != v.end())
        phy.radar_pulse_symbols = get_int(*it, path + ".radar_pulse_symbols");
    if (auto it = v.find("threshold_k"); it != v.end())
        phy.threshold_k = get_number(*it, path + ".threshold_k");

    if (phy.comm_subcarriers.empty())
        for (int i = 0; i < std::min(40, phy.n_subcarriers); ++i) phy.comm_subcarriers.push_back(i);
    if (phy.radar_subcarriers.empty())
        for (int i = std::min(40, phy.n_subcarriers); i < phy.n_subcarriers; ++i)
            phy.radar_subcarriers.push_back(i);
    return phy;
}

Task parse_task(const json& v, const std::string& path) {
    const std::string type = get_string(require(v, path, "type"), path + ".type");
    Task t;
    t.id = get_string(require(v, path, "id"), path + ".id");
    t.priority = get_number(require(v, path, "priority"), path + ".priority");
    if (!(t.priority > 0.0)) fail("invariant", path + ".priority", "priority must be > 0");

    if (type == "comm") {
        check_keys(v, path, {"type", "id", "priority", "src", "dst", "payload_epochs", "control"});
        CommLink c;
        c.src = get_string(require(v, path, "src"), path + ".src");
        c.dst = get_string(require(v, path, "dst"), path + ".dst");
        c.payload_epochs = get_int(require(v, path, "payload_epochs"), path + ".payload_epochs");
        if (auto it = v.find("control"); it != v.end()) {
            if (!it->is_boolean()) fail("type", path + ".control", "expected a boolean");
            c.control = it->get<bool>();
        }
        if (c.payload_epochs < 1) fail("invariant", path + ".payload_epochs", "must be >= 1");
        if (c.src == c.dst) fail("invariant", path + ".dst", "src and dst must differ");
        t.body = c;
    } else if (type == "radar") {
        check_keys(v, path, {"type", "id", "priority", "illuminator", "target", "receivers", "dwells"});
        RadarTrack r;
        r.illuminator = get_string(require(v, path, "illuminator"), path + ".illuminator");
        r.target = get_string(require(v, path, "target"), path + ".target");
        r.receivers = get_id_list(require(v, path, "receivers"), path + ".receivers");
        r.dwells = get_int(require(v, path, "dwells"), path + ".dwells");
        if (r.receivers.empty()) fail("invariant", path + ".receivers", "must be nonempty");
        if (r.dwells < 1) fail("invariant", path + ".dwells", "must be >= 1");
        t.body = r;
    } else if (type == "jam") {
        check_keys(v, path, {"type", "id", "priority", "candidate_jammers", "victim",
                             "cover_epochs", "jammers_per_epoch"});
        JamTask j;
        j.candidate_jammers = get_id_list(require(v, path, "candidate_jammers"), path + ".candidate_jammers");
        j.victim = get_string(require(v, path, "victim"), path + ".victim");
        j.cover_epochs = get_epoch_set(require(v, path, "cover_epochs"), path + ".cover_epochs");
        j.jammers_per_epoch = get_int(require(v, path, "jammers_per_epoch"), path + ".jammers_per_epoch");
        if (j.candidate_jammers.empty()) fail("invariant", path + ".candidate_jammers", "must be nonempty");
        if (j.cover_epochs.empty()) fail("invariant", path + ".cover_epochs", "must be nonempty");
        if (j.jammers_per_epoch < 1) fail("invariant", path + ".jammers_per_epoch", "must be >= 1");
        t.body = j;
    } else if (type == "intercept") {
        check_keys(v, path, {"type", "id", "priority", "listener", "source", "dwells"});
        PassiveIntercept p;
        p.listener = get_string(require(v, path, "listener"), path + ".listener");
        p.source = get_string(require(v, path, "source"), path + ".source");
        p.dwells = get_int(require(v, path, "dwells"), path + ".dwells");
        if (p.dwells < 1) fail("invariant", path + ".dwells", "must be >= 1");
        t.body = p;
    } else {
        fail("type", path + ".type", "unknown task type \"" + type + "\"");
    }
    return t;
}

json render_phy(const PhyDefaults& p) {
    json v;
    v["ref_gain"] = p.ref_gain;
    v["noise_power"] = p.noise_power;
    v["sample_rate_epochs"] = p.sample_rate_epochs;
    v["seed"] = p.seed;
    v["n_subcarriers"] = p.n_subcarriers;
    v["cp_len"] = p.cp_len;
    v["comm_subcarriers"] = p.comm_subcarriers;
    v["radar_subcarriers"] = p.radar_subcarriers;
    v["modulation"] = to_string(p.modulation);
    v["noma_split_db"] = p.noma_split_db;
    v["transec_key"] = p.transec_key;
    v["combine_mode"] = to_string(p.combine_mode);
    v["reflectivity"] = p.reflectivity;
    v["radar_pulse_symbols"] = p.radar_pulse_symbols;
    v["threshold_k"] = p.threshold_k;
    return v;
}

json render_task(const Task& t) {
    json v;
    v["id"] = t.id;
    v["priority"] = t.priority;
    if (const auto* c = std::get_if<CommLink>(&t.body)) {
        v["type"] = "comm";
        v["src"] = c->src;
        v["dst"] = c->dst;
        v["payload_epochs"] = c->payload_epochs;
        if (c->control) v["control"] = true;
    } else if (const auto* r = std::get_if<RadarTrack>(&t.body)) {
        v["type"] = "radar";
        v["illuminator"] = r->illuminator;
        v["target"] = r->target;
        v["receivers"] = r->receivers;
        v["dwells"] = r->dwells;
    } else if (const auto* j = std::get_if<JamTask>(&t.body)) {
        v["type"] = "jam";
        v["candidate_jammers"] = j->candidate_jammers;
        v["victim"] = j->victim;
        v["cover_epochs"] = j->cover_epochs;
        v["jammers_per_epoch"] = j->jammers_per_epoch;
    } else if (const auto* p = std::get_if<PassiveIntercept>(&t.body)) {
        v["type"] = "intercept";
        v["listener"] = p->listener;
        v["source"] = p->source;
        v["dwells"] = p->dwells;
    }
    return v;
}

} // namespace

ScenarioError::ScenarioError(std::string kind, std::string path, const std::string& what)
    : std::runtime_error(path.empty() ? what : path + ": " + what),
      kind_(std::move(kind)),
      path_(std::move(path)) {}

const Platform* Scenario::find_platform(const std::string& id) const {
    for (const auto& p : platforms)
        if (p.id == id) return &p;
    return nullptr;
}

const EnemyEmitter* Scenario::find_emitter(const std::string& id) const {
    for (const auto& e : emitters)
        if (e.id == id) return &e;
    return nullptr;
}

const Task* Scenario::find_task(const std::string& id) const {
    for (const auto& t : tasks)
        if (t.id == id) return &t;
    return nullptr;
}

void validate_scenario(const Scenario& s) {
    if (!(s.epoch_duration_s > 0.0))
        fail("invariant", "epoch_duration_s", "must be > 0");
    if (s.num_epochs < 1) fail("invariant", "num_epochs", "must be >= 1");

    std::set<std::string> ids;
    auto claim = [&](const std::string& id, const std::string& path) {
        if (id.empty()) fail("invariant", path, "empty id");
        if (!ids.insert(id).second) fail("invariant", path, "duplicate id \"" + id + "\"");
    };
    for (std::size_t i = 0; i < s.platforms.size(); ++i)
        claim(s.platforms[i].id, "platforms[" + std::to_string(i) + "].id");
    for (std::size_t i = 0; i < s.emitters.size(); ++i) {
        const auto& e = s.emitters[i];
        const std::string path = "emitters[" + std::to_string(i) + "]";
        claim(e.id, path + ".id");
        for (int epoch : e.active_epochs)
            if (epoch < 0 || epoch >= s.num_epochs)
                fail("invariant", path + ".active_epochs", "epoch " + std::to_string(epoch) + " out of range");
        if (e.emitted_power < 0.0) fail("invariant", path + ".emitted_power", "must be >= 0");
    }

    auto need_platform = [&](const std::string& id, const std::string& path) {
        if (!s.find_platform(id)) fail("unknown-id", path, "unknown platform id \"" + id + "\"");
    };
    auto need_emitter = [&](const std::string& id, const std::string& path) {
        if (!s.find_emitter(id)) fail("unknown-id", path, "unknown emitter id \"" + id + "\"");
    };

    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        const auto& t = s.tasks[i];
        const std::string path = "tasks[" + std::to_string(i) + "]";
        claim(t.id, path + ".id");
        if (!(t.priority > 0.0)) fail("invariant", path + ".priority", "must be > 0");
        if (const auto* c = std::get_if<CommLink>(&t.body)) {
            need_platform(c->src, path + ".src");
            need_platform(c->dst, path + ".dst");
            if (c->src == c->dst) fail("invariant", path + ".dst", "src and dst must differ");
            if (c->payload_epochs < 1) fail("invariant", path + ".payload_epochs", "must be >= 1");
        } else if (const auto* r = std::get_if<RadarTrack>(&t.body)) {
            need_platform(r->illuminator, path + ".illuminator");
            need_emitter(r->target, path + ".target");
            if (r->receivers.empty()) fail("invariant", path + ".receivers", "must be nonempty");
            for (const auto& id : r->receivers) need_platform(id, path + ".receivers");
            if (r->dwells < 1) fail("invariant", path + ".dwells", "must be >= 1");
        } else if (const auto* j = std::get_if<JamTask>(&t.body)) {
            if (j->candidate_jammers.empty())
                fail("invariant", path + ".candidate_jammers", "must be nonempty");
            for (const auto& id : j->candidate_jammers) need_platform(id, path + ".candidate_jammers");
            need_emitter(j->victim, path + ".victim");
            if (j->cover_epochs.empty()) fail("invariant", path + ".cover_epochs", "must be nonempty");
            for (int epoch : j->cover_epochs)
                if (epoch < 0 || epoch >= s.num_epochs)
                    fail("invariant", path + ".cover_epochs", "epoch " + std::to_string(epoch) + " out of range");
            if (j->jammers_per_epoch < 1) fail("invariant", path + ".jammers_per_epoch", "must be >= 1");
        } else if (const auto* p = std::get_if<PassiveIntercept>(&t.body)) {
            need_platform(p->listener, path + ".listener");
            need_emitter(p->source, path + ".source");
            if (p->dwells < 1) fail("invariant", path + ".dwells", "must be >= 1");
        }
    }

    // PHY invariants.
    const auto& phy = s.phy;
    if (phy.noise_power < 0.0) fail("invariant", "phy.noise_power", "must be >= 0");
    if (phy.n_subcarriers < 2 || (phy.n_subcarriers & (phy.n_subcarriers - 1)) != 0)
        fail("invariant", "phy.n_subcarriers", "must be a power of two >= 2");
    if (phy.cp_len < 0 || phy.cp_len >= phy.n_subcarriers)
        fail("invariant", "phy.cp_len", "must satisfy 0 <= cp_len < n_subcarriers");
    if (phy.sample_rate_epochs < phy.n_subcarriers + phy.cp_len)
        fail("invariant", "phy.sample_rate_epochs", "must be >= n_subcarriers + cp_len");
    for (int k : phy.comm_subcarriers)
        if (k < 0 || k >= phy.n_subcarriers)
            fail("invariant", "phy.comm_subcarriers", "index " + std::to_string(k) + " out of range");
    for (int k : phy.radar_subcarriers)
        if (k < 0 || k >= phy.n_subcarriers)
            fail("invariant", "phy.radar_subcarriers", "index " + std::to_string(k) + " out of range");
    std::vector<int> overlap;
    std::set_intersection(phy.comm_subcarriers.begin(), phy.comm_subcarriers.end(),
                          phy.radar_subcarriers.begin(), phy.radar_subcarriers.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty())
        fail("invariant", "phy.radar_subcarriers", "allocation overlaps comm_subcarriers");
    if (phy.transec_key.empty() || phy.transec_key.size() > 32 ||
        phy.transec_key.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
        fail("invariant", "phy.transec_key", "expected up to 32 hex digits");
    if (phy.radar_pulse_symbols < 1) fail("invariant", "phy.radar_pulse_symbols", "must be >= 1");
    if (phy.reflectivity < 0.0) fail("invariant", "phy.reflectivity", "must be >= 0");
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("syntax", "", std::string("scenario document: ") + e.what());
    }
    if (!doc.is_object()) fail("syntax", "", "top level must be an object");
    check_keys(doc, "$",
               {"epoch_duration_s", "num_epochs", "platforms", "emitters", "tasks", "phy"});

    Scenario s;
    s.epoch_duration_s = get_number(require(doc, "$", "epoch_duration_s"), "epoch_duration_s");
    s.num_epochs = get_int(require(doc, "$", "num_epochs"), "num_epochs");

    const json& plats = require(doc, "$", "platforms");
    if (!plats.is_array()) fail("type", "platforms", "expected an array");
    for (std::size_t i = 0; i < plats.size(); ++i) {
        const std::string path = "platforms[" + std::to_string(i) + "]";
        const json& v = plats[i];
        check_keys(v, path, {"id", "kind", "position"});
        Platform p;
        p.id = get_string(require(v, path, "id"), path + ".id");
        p.kind = parse_kind(get_string(require(v, path, "kind"), path + ".kind"), path + ".kind");
        p.position = get_vec3(require(v, path, "position"), path + ".position");
        s.platforms.push_back(std::move(p));
    }

    if (auto it = doc.find("emitters"); it != doc.end()) {
        if (!it->is_array()) fail("type", "emitters", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "emitters[" + std::to_string(i) + "]";
            const json& v = (*it)[i];
            check_keys(v, path, {"id", "position", "active_epochs", "emitted_power"});
            EnemyEmitter e;
            e.id = get_string(require(v, path, "id"), path + ".id");
            e.position = get_vec3(require(v, path, "position"), path + ".position");
            e.active_epochs = get_epoch_set(require(v, path, "active_epochs"), path + ".active_epochs");
            e.emitted_power = get_number(require(v, path, "emitted_power"), path + ".emitted_power");
            s.emitters.push_back(std::move(e));
        }
    }

    if (auto it = doc.find("tasks"); it != doc.end()) {
        if (!it->is_array()) fail("type", "tasks", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            s.tasks.push_back(parse_task((*it)[i], "tasks[" + std::to_string(i) + "]"));
    }

    if (auto it = doc.find("phy"); it != doc.end()) {
        if (!it->is_object()) fail("type", "phy", "expected an object");
        s.phy = parse_phy(*it, "phy");
    } else {
        s.phy = parse_phy(json::object(), "phy");
    }

    validate_scenario(s);
    return s;
}

std::string render_scenario(const Scenario& s) {
    json doc;
    doc["epoch_duration_s"] = s.epoch_duration_s;
    doc["num_epochs"] = s.num_epochs;
    doc["platforms"] = json::array();
    for (const auto& p : s.platforms) {
        json v;
        v["id"] = p.id;
        v["kind"] = to_string(p.kind);
        v["position"] = {p.position.x, p.position.y, p.position.z};
        doc["platforms"].push_back(std::move(v));
    }
    doc["emitters"] = json::array();
    for (const auto& e : s.emitters) {
        json v;
        v["id"] = e.id;
        v["position"] = {e.position.x, e.position.y, e.position.z};
        v["active_epochs"] = e.active_epochs;
        v["emitted_power"] = e.emitted_power;
        doc["emitters"].push_back(std::move(v));
    }
    doc["tasks"] = json::array();
    for (const auto& t : s.tasks) doc["tasks"].push_back(render_task(t));
    doc["phy"] = render_phy(s.phy);
    return doc.dump(2) + "\n";
}

const char* to_string(PlatformKind k) {
    switch (k) {
        case PlatformKind::aircraft: return "aircraft";
        case PlatformKind::ground: return "ground";
        case PlatformKind::ship: return "ship";
        case PlatformKind::uav: return "uav";
    }
    return "aircraft";
}

const char* to_string(Modulation m) {
    return m == Modulation::qpsk ? "qpsk" : "bpsk_robust";
}

const char* to_string(CombineMode m) {
    switch (m) {
        case CombineMode::none: return "none";
        case CombineMode::noma: return "noma";
        case CombineMode::ofdm_partition: return "ofdm_partition";
    }
    return "none";
}

} // namespace vemo
