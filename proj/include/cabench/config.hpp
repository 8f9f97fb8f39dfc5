// Copyright 2026 The cabench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CABENCH_CONFIG_HPP
#define CABENCH_CONFIG_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabench/analysis.hpp"
#include "cabench/cab.hpp"
#include "cabench/calibration.hpp"
#include "cabench/cycle_benchmarking.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/optimize.hpp"

namespace cabench {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::string join_path(const std::string &base, const std::string &key) {
    return base.empty() ? key : base + "." + key;
}
inline std::string index_path(const std::string &base, size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Rejects keys outside `allowed`; catches misspelled options.
inline void check_keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto &[k, v] : obj.items()) {
        bool ok = false;
        for (const char *a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError(join_path(path, k), "unknown key");
    }
}

inline const json &require(const json &obj, const std::string &path, const char *key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join_path(path, key), "missing required key");
    return *it;
}

template <typename T>
T as(const json &v, const std::string &path) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
        return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(path, "expected a string");
        return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
        return d;
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0))
            throw ConfigError(path, "expected a non-negative integer");
        return T(v.get<uint64_t>());
    } else {
        if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
        return T(v.get<int64_t>());
    }
}

template <typename T>
void read(const json &obj, const std::string &path, const char *key, T &out) {
    auto it = obj.find(key);
    if (it != obj.end()) out = as<T>(*it, join_path(path, key));
}

template <typename T>
std::vector<T> as_list(const json &v, const std::string &path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array");
    std::vector<T> r;
    for (size_t i = 0; i < v.size(); ++i) r.push_back(as<T>(v[i], index_path(path, i)));
    return r;
}

inline std::pair<int, int> as_pair(const json &v, const std::string &path) {
    auto l = as_list<int>(v, path);
    if (l.size() != 2) throw ConfigError(path, "expected a pair [a, b]");
    return {l[0], l[1]};
}

template <typename E, size_t N>
E as_enum(const json &v, const std::string &path, const std::pair<const char *, E> (&names)[N]) {
    auto s = as<std::string>(v, path);
    for (const auto &[n, e] : names)
        if (s == n) return e;
    std::string allowed;
    for (const auto &[n, e] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
    throw ConfigError(path, "'" + s + "' is not one of {" + allowed + "}");
}

inline constexpr std::pair<const char *, Backend> kBackendNames[] = {{"dm", Backend::dm}, {"stab", Backend::stab}};
inline constexpr std::pair<const char *, ObservableMode> kModeNames[] = {{"traverse", ObservableMode::traverse},
                                                                        {"sample", ObservableMode::sample}};
inline constexpr std::pair<const char *, FidelityKind> kKindNames[] = {
    {"dressed", FidelityKind::dressed}, {"twirl", FidelityKind::twirl}, {"pure", FidelityKind::pure}};
inline constexpr std::pair<const char *, OptTarget> kTargetNames[] = {{"global", OptTarget::global},
                                                                     {"local", OptTarget::local}};

}  // namespace detail

inline Backend backend_from_string(const std::string &s, const std::string &path = "backend") {
    return detail::as_enum(json(s), path, detail::kBackendNames);
}

// ---------------------------------------------------------------------------
// Device

inline json device_to_json(const DeviceModel &d) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = d.name;
    j["n_qubits"] = d.n_qubits;
    j["layout"] = json::array();
    for (auto [a, b] : d.layout) j["layout"].push_back({a, b});
    j["gates"] = json::array();
    for (const auto &g : d.gates) {
        json jg;
        jg["pair"] = {g.pair.first, g.pair.second};
        jg["depol_p"] = g.depol_p;
        jg["coupled_qubit"] = g.coupled_qubit;
        jg["control"] = {{"cond_phase_offset", g.control.cond_phase_offset},
                         {"dyn_phase_i", g.control.dyn_phase_i},
                         {"dyn_phase_j", g.control.dyn_phase_j},
                         {"coupler_comp", g.control.coupler_comp}};
        j["gates"].push_back(jg);
    }
    j["couplings"] = json::array();
    for (const auto &[kl, gamma] : d.couplings.entries())
        j["couplings"].push_back({{"gates", {kl.first, kl.second}}, {"gamma", gamma}});
    j["readout"] = json::array();
    for (const auto &r : d.readout) j["readout"].push_back({{"e0", r.e0}, {"e1", r.e1}});
    j["single_qubit_depol"] = d.single_qubit_depol;
    j["single_qubit_noise"] = d.single_qubit_noise;
    j["cluster_limit"] = d.cluster_limit;
    return j;
}

/// Parses and validates a device document. `readout` and
/// `single_qubit_depol` accept one value for every qubit or a per-qubit array.
inline DeviceModel device_from_json(const json &j, const std::string &path = "") {
    using namespace detail;
    check_keys(j, path,
               {"schema_version", "name", "n_qubits", "layout", "gates", "couplings", "readout",
                "single_qubit_depol", "single_qubit_noise", "cluster_limit"});
    int version = kSchemaVersion;
    read(j, path, "schema_version", version);
    if (version != kSchemaVersion)
        throw ConfigError(join_path(path, "schema_version"), "unsupported version " + std::to_string(version));
    DeviceModel d;
    read(j, path, "name", d.name);
    d.n_qubits = as<size_t>(require(j, path, "n_qubits"), join_path(path, "n_qubits"));
    if (auto it = j.find("layout"); it != j.end()) {
        auto p = join_path(path, "layout");
        if (!it->is_array()) throw ConfigError(p, "expected an array");
        for (size_t e = 0; e < it->size(); ++e) d.layout.push_back(as_pair((*it)[e], index_path(p, e)));
    }
    {
        auto p = join_path(path, "gates");
        const auto &gs = require(j, path, "gates");
        if (!gs.is_array()) throw ConfigError(p, "expected an array");
        for (size_t i = 0; i < gs.size(); ++i) {
            auto gp = index_path(p, i);
            const auto &jg = gs[i];
            check_keys(jg, gp, {"pair", "depol_p", "coupled_qubit", "control"});
            GateSpec g;
            g.pair = as_pair(require(jg, gp, "pair"), join_path(gp, "pair"));
            g.coupled_qubit = g.pair.first;
            read(jg, gp, "depol_p", g.depol_p);
            read(jg, gp, "coupled_qubit", g.coupled_qubit);
            if (auto c = jg.find("control"); c != jg.end()) {
                auto cp = join_path(gp, "control");
                check_keys(*c, cp, {"cond_phase_offset", "dyn_phase_i", "dyn_phase_j", "coupler_comp"});
                read(*c, cp, "cond_phase_offset", g.control.cond_phase_offset);
                read(*c, cp, "dyn_phase_i", g.control.dyn_phase_i);
                read(*c, cp, "dyn_phase_j", g.control.dyn_phase_j);
                read(*c, cp, "coupler_comp", g.control.coupler_comp);
            }
            d.gates.push_back(g);
        }
    }
    if (auto it = j.find("couplings"); it != j.end()) {
        auto p = join_path(path, "couplings");
        if (!it->is_array()) throw ConfigError(p, "expected an array");
        for (size_t i = 0; i < it->size(); ++i) {
            auto cp = index_path(p, i);
            const auto &c = (*it)[i];
            check_keys(c, cp, {"gates", "gamma"});
            auto [k, l] = as_pair(require(c, cp, "gates"), join_path(cp, "gates"));
            if (k < 0 || l < 0 || size_t(k) >= d.gates.size() || size_t(l) >= d.gates.size() || k == l)
                throw ConfigError(join_path(cp, "gates"), "gate index out of range");
            if (d.couplings.contains(k, l)) throw ConfigError(join_path(cp, "gates"), "duplicate coupling");
            d.couplings.set(k, l, as<double>(require(c, cp, "gamma"), join_path(cp, "gamma")));
        }
    }
    {
        auto p = join_path(path, "readout");
        auto parse_one = [&](const json &r, const std::string &rp) {
            check_keys(r, rp, {"e0", "e1"});
            Readout ro;
            read(r, rp, "e0", ro.e0);
            read(r, rp, "e1", ro.e1);
            return ro;
        };
        auto it = j.find("readout");
        if (it == j.end())
            d.readout.assign(d.n_qubits, Readout{});
        else if (it->is_object())
            d.readout.assign(d.n_qubits, parse_one(*it, p));
        else if (it->is_array())
            for (size_t q = 0; q < it->size(); ++q) d.readout.push_back(parse_one((*it)[q], index_path(p, q)));
        else
            throw ConfigError(p, "expected an object or an array");
    }
    {
        auto p = join_path(path, "single_qubit_depol");
        auto it = j.find("single_qubit_depol");
        if (it == j.end())
            d.single_qubit_depol.assign(d.n_qubits, kDefaultSingleQubitDepol);
        else if (it->is_number())
            d.single_qubit_depol.assign(d.n_qubits, as<double>(*it, p));
        else
            d.single_qubit_depol = as_list<double>(*it, p);
    }
    read(j, path, "single_qubit_noise", d.single_qubit_noise);
    read(j, path, "cluster_limit", d.cluster_limit);
    try {
        d.validate();
    } catch (const ConfigError &e) {
        throw ConfigError(join_path(path, e.field), std::string(e.what()).substr(e.field.size() + 2));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Document parsing

/// Parses JSON text; syntax errors report line and column.
inline json parse_document(const std::string &text, const std::string &source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col), msg);
    }
}

inline std::string read_text_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError(p.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline DeviceModel load_device(const std::filesystem::path &p) {
    return device_from_json(parse_document(read_text_file(p), p.string()));
}

// ---------------------------------------------------------------------------
// Experiment configuration

enum class ExperimentKind { cab, cb, fully_connected, parallel_cz_scan, correlate, landscape, optimize, calibrate,
                            order_stats };

inline constexpr std::pair<const char *, ExperimentKind> kExperimentKinds[] = {
    {"cab", ExperimentKind::cab},
    {"cb", ExperimentKind::cb},
    {"fully_connected", ExperimentKind::fully_connected},
    {"parallel_cz_scan", ExperimentKind::parallel_cz_scan},
    {"correlate", ExperimentKind::correlate},
    {"landscape", ExperimentKind::landscape},
    {"optimize", ExperimentKind::optimize},
    {"calibrate", ExperimentKind::calibrate},
    {"order_stats", ExperimentKind::order_stats}};

inline const char *to_string(ExperimentKind k) {
    for (const auto &[n, e] : kExperimentKinds)
        if (e == k) return n;
    return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string &s) {
    return detail::as_enum(json(s), "kind", kExperimentKinds);
}

struct FullyConnectedOptions {
    size_t n = 16;
    size_t gates = 1;  // independent random fully connected gates
    bool operator==(const FullyConnectedOptions &) const = default;
};

struct ScanOptions {
    std::vector<size_t> counts;  // empty: 1 .. all gates
    bool operator==(const ScanOptions &) const = default;
};

struct CorrelateOptions {
    size_t repeat = 1;
    FidelityKind kind = FidelityKind::pure;
    bool operator==(const CorrelateOptions &) const = default;
};

struct LandscapeOptions {
    std::vector<double> gamma12 = landscape_gamma12_values();
    size_t resolution = 41;
    double upper = 5 * std::numbers::pi / 16;
    bool operator==(const LandscapeOptions &) const = default;
};

struct CalibrateOptions {
    std::string method = "fast";  // fast | parallel
    size_t grid_points = 32;
    uint64_t shots = 0;
    ParallelCalibrationOptions parallel{};
    bool operator==(const CalibrateOptions &o) const {
        const auto &a = parallel, &b = o.parallel;
        return method == o.method && grid_points == o.grid_points && shots == o.shots && a.length == b.length &&
               a.K_s == b.K_s && a.sequences == b.sequences && a.iterations == b.iterations &&
               a.initial_step == b.initial_step;
    }
};

struct OrderStatsOptions {
    std::vector<size_t> ns{4, 8};
    size_t samples = 100;
    uint64_t cap = 100000;
    bool operator==(const OrderStatsOptions &) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::cab;
    /// Device document, relative to the configuration file. Empty with no
    /// inline device means the kind does not need one.
    std::string device_path;
    std::optional<DeviceModel> device;  // inline, or loaded from device_path
    bool device_inline = false;
    uint64_t seed = 1;
    std::string output = "out";
    std::map<std::string, std::vector<std::pair<int, int>>> patterns;
    std::string pattern;     // selects a pattern as the gate list
    std::vector<int> gates;  // explicit gate list; wins over `pattern`
    CabConfig cab{};
    CbConfig cb{};
    FullyConnectedOptions fully_connected{};
    ScanOptions scan{};
    CorrelateOptions correlate{};
    LandscapeOptions landscape{};
    OptimizeConfig optimize{};
    CalibrateOptions calibrate{};
    OrderStatsOptions order_stats{};

    /// Gate indices of a pattern, matched against device gate pairs in
    /// either orientation.
    std::vector<int> pattern_gates(const std::string &name) const {
        auto it = patterns.find(name);
        if (it == patterns.end()) throw ConfigError("pattern", "no pattern named '" + name + "'");
        if (!device) throw ConfigError("device", "patterns need a device");
        std::vector<int> r;
        for (size_t i = 0; i < it->second.size(); ++i) {
            auto [a, b] = it->second[i];
            int found = -1;
            for (size_t g = 0; g < device->gates.size(); ++g) {
                auto [x, y] = device->gates[g].pair;
                if ((x == a && y == b) || (x == b && y == a)) found = int(g);
            }
            if (found < 0)
                throw ConfigError("patterns." + name + "[" + std::to_string(i) + "]",
                                  "no device gate on qubits " + std::to_string(a) + "," + std::to_string(b));
            r.push_back(found);
        }
        return r;
    }

    /// Gates the experiment acts on: `gates`, else `pattern`, else all gates.
    std::vector<int> resolved_gates() const {
        if (!device) throw ConfigError("device", "this experiment needs a device");
        std::vector<int> r;
        if (!gates.empty())
            r = gates;
        else if (!pattern.empty())
            r = pattern_gates(pattern);
        else
            for (size_t g = 0; g < device->gates.size(); ++g) r.push_back(int(g));
        device->check_parallel_layer(r);
        return r;
    }

    CabConfig cab_config() const {
        auto c = cab;
        c.seed = seed;
        return c;
    }
    CbConfig cb_config() const {
        auto c = cb;
        c.seed = seed;
        c.backend = cab.backend;
        c.threads = cab.threads;
        c.pauli_layer_noise = cab.pauli_layer_noise;
        c.readout_twirl = cab.readout_twirl;
        c.coherent = cab.coherent;
        return c;
    }
    OptimizeConfig optimize_config() const {
        auto c = optimize;
        c.cab = cab_config();
        c.cab.subset_list.clear();
        return c;
    }

    bool needs_device() const {
        return kind != ExperimentKind::landscape && kind != ExperimentKind::order_stats &&
               kind != ExperimentKind::fully_connected;
    }

    void validate() const {
        if (needs_device() && !device) throw ConfigError("device", "this experiment needs a device");
        for (const auto &[name, pairs] : patterns) {
            std::set<int> used;
            for (size_t i = 0; i < pairs.size(); ++i)
                for (int q : {pairs[i].first, pairs[i].second})
                    if (!used.insert(q).second)
                        throw ConfigError("patterns." + name + "[" + std::to_string(i) + "]",
                                          "pattern gates must act on disjoint qubits");
            if (device) pattern_gates(name);
        }
        if (!pattern.empty() && !patterns.count(pattern))
            throw ConfigError("pattern", "no pattern named '" + pattern + "'");
        if (device) {
            for (size_t i = 0; i < gates.size(); ++i)
                if (gates[i] < 0 || size_t(gates[i]) >= device->gates.size())
                    throw ConfigError("gates[" + std::to_string(i) + "]", "gate does not exist");
            if (needs_device()) resolved_gates();
        }
        switch (kind) {
            case ExperimentKind::cab:
            case ExperimentKind::correlate:
            case ExperimentKind::parallel_cz_scan: cab_config().validate(); break;
            case ExperimentKind::cb: cb_config().validate(); break;
            case ExperimentKind::fully_connected:
                cab_config().validate();
                if (fully_connected.n < 4 || fully_connected.n % 2)
                    throw ConfigError("fully_connected.n", "must be even and >= 4");
                if (fully_connected.gates < 1) throw ConfigError("fully_connected.gates", "must be >= 1");
                if (device && device->n_qubits != fully_connected.n)
                    throw ConfigError("fully_connected.n", "differs from the device qubit count");
                break;
            case ExperimentKind::optimize: optimize_config().validate(); break;
            case ExperimentKind::calibrate:
                if (calibrate.method != "fast" && calibrate.method != "parallel")
                    throw ConfigError("calibrate.method", "must be 'fast' or 'parallel'");
                if (calibrate.grid_points < 8) throw ConfigError("calibrate.grid_points", "must be >= 8");
                break;
            case ExperimentKind::landscape:
                if (landscape.resolution < 2) throw ConfigError("landscape.resolution", "must be >= 2");
                if (landscape.gamma12.empty()) throw ConfigError("landscape.gamma12", "need at least one value");
                if (!(landscape.upper > 0)) throw ConfigError("landscape.upper", "must be positive");
                break;
            case ExperimentKind::order_stats:
                for (size_t i = 0; i < order_stats.ns.size(); ++i)
                    if (order_stats.ns[i] < 4 || order_stats.ns[i] % 2)
                        throw ConfigError("order_stats.ns[" + std::to_string(i) + "]", "must be even and >= 4");
                if (order_stats.ns.empty()) throw ConfigError("order_stats.ns", "need at least one size");
                if (order_stats.cap < 1) throw ConfigError("order_stats.cap", "must be >= 1");
                break;
        }
        if (correlate.repeat < 1) throw ConfigError("correlate.repeat", "must be >= 1");
        if (optimize.window_first > optimize.window_last)
            throw ConfigError("optimize.window", "first must not exceed last");
    }
};

inline json cab_to_json(const CabConfig &c) {
    json j;
    j["depths"] = c.depths;
    j["K_r"] = c.K_r;
    j["K_s"] = c.K_s;
    j["K_q"] = c.K_q;
    j["mode"] = to_string(c.mode);
    j["backend"] = to_string(c.backend);
    j["threads"] = c.threads;
    j["run_twirl"] = c.run_twirl;
    j["pauli_layer_noise"] = c.pauli_layer_noise;
    j["coherent"] = c.coherent;
    j["readout_twirl"] = c.readout_twirl;
    j["subsets"] = c.subset_list;
    return j;
}

inline CabConfig cab_from_json(const json &j, const std::string &path) {
    using namespace detail;
    check_keys(j, path,
               {"depths", "K_r", "K_s", "K_q", "mode", "backend", "threads", "run_twirl", "pauli_layer_noise",
                "coherent", "readout_twirl", "subsets"});
    CabConfig c;
    c.threads = default_threads();
    if (auto it = j.find("depths"); it != j.end()) c.depths = as_list<int>(*it, join_path(path, "depths"));
    read(j, path, "K_r", c.K_r);
    read(j, path, "K_s", c.K_s);
    read(j, path, "K_q", c.K_q);
    if (auto it = j.find("mode"); it != j.end()) c.mode = as_enum(*it, join_path(path, "mode"), kModeNames);
    if (auto it = j.find("backend"); it != j.end())
        c.backend = as_enum(*it, join_path(path, "backend"), kBackendNames);
    read(j, path, "threads", c.threads);
    read(j, path, "run_twirl", c.run_twirl);
    read(j, path, "pauli_layer_noise", c.pauli_layer_noise);
    read(j, path, "coherent", c.coherent);
    read(j, path, "readout_twirl", c.readout_twirl);
    if (auto it = j.find("subsets"); it != j.end()) {
        auto p = join_path(path, "subsets");
        if (!it->is_array()) throw ConfigError(p, "expected an array");
        for (size_t i = 0; i < it->size(); ++i) c.subset_list.push_back(as_list<int>((*it)[i], index_path(p, i)));
    }
    return c;
}

/// Serializes every field; parsing the result gives back an equal config.
inline json config_to_json(const ExperimentConfig &c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = to_string(c.kind);
    if (c.device_inline && c.device)
        j["device"] = device_to_json(*c.device);
    else if (!c.device_path.empty())
        j["device"] = c.device_path;
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["patterns"] = json::object();
    for (const auto &[name, pairs] : c.patterns) {
        json a = json::array();
        for (auto [x, y] : pairs) a.push_back({x, y});
        j["patterns"][name] = a;
    }
    j["pattern"] = c.pattern;
    j["gates"] = c.gates;
    j["cab"] = cab_to_json(c.cab);
    j["cb"] = {{"depths", c.cb.depths},
               {"K_r", c.cb.K_r},
               {"K_s", c.cb.K_s},
               {"characters", c.cb.characters},
               {"order_cap", c.cb.order_cap}};
    j["fully_connected"] = {{"n", c.fully_connected.n}, {"gates", c.fully_connected.gates}};
    j["parallel_cz_scan"] = {{"counts", c.scan.counts}};
    j["correlate"] = {{"repeat", c.correlate.repeat}, {"kind", to_string(c.correlate.kind)}};
    j["landscape"] = {{"gamma12", c.landscape.gamma12},
                      {"resolution", c.landscape.resolution},
                      {"upper", c.landscape.upper}};
    {
        const auto &o = c.optimize;
        std::vector<std::string> names;
        for (auto p : o.parameters) names.push_back(to_string(p));
        j["optimize"] = {{"target", to_string(o.target)},
                         {"iterations", o.iterations},
                         {"parameters", names},
                         {"initial_step", o.initial_step},
                         {"tol", o.tol},
                         {"reevaluate_every", o.reevaluate_every},
                         {"window", {o.window_first, o.window_last}}};
    }
    {
        const auto &k = c.calibrate;
        j["calibrate"] = {{"method", k.method},
                          {"grid_points", k.grid_points},
                          {"shots", k.shots},
                          {"length", k.parallel.length},
                          {"K_s", k.parallel.K_s},
                          {"sequences", k.parallel.sequences},
                          {"iterations", k.parallel.iterations},
                          {"initial_step", k.parallel.initial_step}};
    }
    j["order_stats"] = {{"ns", c.order_stats.ns}, {"samples", c.order_stats.samples}, {"cap", c.order_stats.cap}};
    return j;
}

/// `base_dir` resolves a relative device path.
inline ExperimentConfig config_from_json(const json &j, const std::filesystem::path &base_dir = {}) {
    using namespace detail;
    check_keys(j, "",
               {"schema_version", "kind", "device", "seed", "output", "patterns", "pattern", "gates", "cab", "cb",
                "fully_connected", "parallel_cz_scan", "correlate", "landscape", "optimize", "calibrate",
                "order_stats"});
    int version = as<int>(require(j, "", "schema_version"), "schema_version");
    if (version != kSchemaVersion) throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
    ExperimentConfig c;
    c.kind = as_enum(require(j, "", "kind"), "kind", kExperimentKinds);
    if (auto it = j.find("device"); it != j.end()) {
        if (it->is_string()) {
            c.device_path = it->get<std::string>();
            std::filesystem::path p = c.device_path;
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            try {
                c.device = load_device(p);
            } catch (const ConfigError &e) {
                throw ConfigError("device", std::string(e.what()));
            }
        } else if (it->is_object()) {
            c.device = device_from_json(*it, "device");
            c.device_inline = true;
        } else {
            throw ConfigError("device", "expected a file path or an inline device object");
        }
    }
    read(j, "", "seed", c.seed);
    read(j, "", "output", c.output);
    if (auto it = j.find("patterns"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("patterns", "expected an object of named pair lists");
        for (const auto &[name, v] : it->items()) {
            auto p = "patterns." + name;
            if (!v.is_array()) throw ConfigError(p, "expected an array of pairs");
            auto &dst = c.patterns[name];
            for (size_t i = 0; i < v.size(); ++i) dst.push_back(as_pair(v[i], index_path(p, i)));
        }
    }
    read(j, "", "pattern", c.pattern);
    if (auto it = j.find("gates"); it != j.end()) c.gates = as_list<int>(*it, "gates");
    if (auto it = j.find("cab"); it != j.end())
        c.cab = cab_from_json(*it, "cab");
    else
        c.cab.threads = default_threads();
    if (auto it = j.find("cb"); it != j.end()) {
        check_keys(*it, "cb", {"depths", "K_r", "K_s", "characters", "order_cap"});
        if (auto d = it->find("depths"); d != it->end()) c.cb.depths = as_list<int>(*d, "cb.depths");
        read(*it, "cb", "K_r", c.cb.K_r);
        read(*it, "cb", "K_s", c.cb.K_s);
        read(*it, "cb", "characters", c.cb.characters);
        read(*it, "cb", "order_cap", c.cb.order_cap);
    }
    if (auto it = j.find("fully_connected"); it != j.end()) {
        check_keys(*it, "fully_connected", {"n", "gates"});
        read(*it, "fully_connected", "n", c.fully_connected.n);
        read(*it, "fully_connected", "gates", c.fully_connected.gates);
    }
    if (auto it = j.find("parallel_cz_scan"); it != j.end()) {
        check_keys(*it, "parallel_cz_scan", {"counts"});
        if (auto v = it->find("counts"); v != it->end())
            c.scan.counts = as_list<size_t>(*v, "parallel_cz_scan.counts");
    }
    if (auto it = j.find("correlate"); it != j.end()) {
        check_keys(*it, "correlate", {"repeat", "kind"});
        read(*it, "correlate", "repeat", c.correlate.repeat);
        if (auto v = it->find("kind"); v != it->end()) c.correlate.kind = as_enum(*v, "correlate.kind", kKindNames);
    }
    if (auto it = j.find("landscape"); it != j.end()) {
        check_keys(*it, "landscape", {"gamma12", "resolution", "upper"});
        if (auto v = it->find("gamma12"); v != it->end()) {
            if (v->is_number())
                c.landscape.gamma12 = {as<double>(*v, "landscape.gamma12")};
            else
                c.landscape.gamma12 = as_list<double>(*v, "landscape.gamma12");
        }
        read(*it, "landscape", "resolution", c.landscape.resolution);
        read(*it, "landscape", "upper", c.landscape.upper);
    }
    if (auto it = j.find("optimize"); it != j.end()) {
        const std::string p = "optimize";
        check_keys(*it, p, {"target", "iterations", "parameters", "initial_step", "tol", "reevaluate_every", "window"});
        auto &o = c.optimize;
        if (auto v = it->find("target"); v != it->end()) o.target = as_enum(*v, "optimize.target", kTargetNames);
        read(*it, p, "iterations", o.iterations);
        if (auto v = it->find("parameters"); v != it->end()) {
            o.parameters.clear();
            auto names = as_list<std::string>(*v, "optimize.parameters");
            for (size_t i = 0; i < names.size(); ++i) {
                try {
                    o.parameters.push_back(gate_param_from_string(names[i]));
                } catch (const ConfigError &) {
                    throw ConfigError(index_path("optimize.parameters", i), "unknown parameter '" + names[i] + "'");
                }
            }
        }
        read(*it, p, "initial_step", o.initial_step);
        read(*it, p, "tol", o.tol);
        read(*it, p, "reevaluate_every", o.reevaluate_every);
        if (auto v = it->find("window"); v != it->end()) {
            auto w = as_list<size_t>(*v, "optimize.window");
            if (w.size() != 2) throw ConfigError("optimize.window", "expected [first, last]");
            o.window_first = w[0];
            o.window_last = w[1];
        }
    }
    if (auto it = j.find("calibrate"); it != j.end()) {
        const std::string p = "calibrate";
        check_keys(*it, p,
                   {"method", "grid_points", "shots", "length", "K_s", "sequences", "iterations", "initial_step"});
        auto &k = c.calibrate;
        read(*it, p, "method", k.method);
        read(*it, p, "grid_points", k.grid_points);
        read(*it, p, "shots", k.shots);
        read(*it, p, "length", k.parallel.length);
        read(*it, p, "K_s", k.parallel.K_s);
        read(*it, p, "sequences", k.parallel.sequences);
        read(*it, p, "iterations", k.parallel.iterations);
        read(*it, p, "initial_step", k.parallel.initial_step);
    }
    if (auto it = j.find("order_stats"); it != j.end()) {
        check_keys(*it, "order_stats", {"ns", "samples", "cap"});
        if (auto v = it->find("ns"); v != it->end()) c.order_stats.ns = as_list<size_t>(*v, "order_stats.ns");
        read(*it, "order_stats", "samples", c.order_stats.samples);
        read(*it, "order_stats", "cap", c.order_stats.cap);
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path &p) {
    return config_from_json(parse_document(read_text_file(p), p.string()), p.parent_path());
}

}  // namespace cabench

#endif
