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


#ifndef CABENCH_DEVICE_HPP
#define CABENCH_DEVICE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cabench/errors.hpp"

namespace cabench {

/// Control offsets of a parametric CZ, all in radians.
struct ControlParams {
    double cond_phase_offset = 0.0;  // delta phi
    double dyn_phase_i = 0.0;        // theta_1, on pair.first
    double dyn_phase_j = 0.0;        // theta_2, on pair.second
    /// Counter-rotation applied by this gate's coupler to each ZZ link it
    /// participates in; enters the link strength as -(c_k + c_l)/2.
    double coupler_comp = 0.0;

    bool is_zero() const {
        return cond_phase_offset == 0.0 && dyn_phase_i == 0.0 && dyn_phase_j == 0.0;
    }
    bool operator==(const ControlParams &) const = default;
};

struct GateSpec {
    std::pair<int, int> pair{0, 1};
    double depol_p = 1.0;
    int coupled_qubit = 0;
    ControlParams control;

    bool operator==(const GateSpec &) const = default;
};

/// P(read 1 | 0) and P(read 0 | 1).
struct Readout {
    double e0 = 0.0;
    double e1 = 0.0;
    bool operator==(const Readout &) const = default;
};

/// Symmetric sparse map (gate k, gate l) -> gamma_kl.
class CouplingMap {
   public:
    void set(int k, int l, double gamma) {
        if (k == l) throw DomainError("coupling of a gate with itself");
        if (!std::isfinite(gamma)) throw DomainError("coupling strength must be finite");
        entries_[key(k, l)] = gamma;
    }
    double get(int k, int l) const {
        if (k == l) return 0.0;
        auto it = entries_.find(key(k, l));
        return it == entries_.end() ? 0.0 : it->second;
    }
    bool contains(int k, int l) const { return k != l && entries_.count(key(k, l)) > 0; }
    const std::map<std::pair<int, int>, double> &entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    bool operator==(const CouplingMap &) const = default;

   private:
    static std::pair<int, int> key(int k, int l) { return k < l ? std::make_pair(k, l) : std::make_pair(l, k); }
    std::map<std::pair<int, int>, double> entries_;
};

/// Pauli error 0.24% of a single-qubit gate as a depolarizing parameter:
/// a fraction 3/4 of the replaced weight is a non-identity Pauli.
inline constexpr double kDefaultSingleQubitDepol = 1.0 - 0.0024 * 4.0 / 3.0;

struct DeviceModel {
    std::string name;
    size_t n_qubits = 0;
    std::vector<std::pair<int, int>> layout;
    std::vector<GateSpec> gates;
    CouplingMap couplings;
    std::vector<Readout> readout;             // one per qubit
    std::vector<double> single_qubit_depol;   // one per qubit
    bool single_qubit_noise = true;           // toggle for twirling-layer noise
    size_t cluster_limit = 8;                 // max gates per coupling component

    /// Throws ConfigError naming the first violated field.
    void validate() const {
        auto prob = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
        if (n_qubits == 0) throw ConfigError("n_qubits", "must be positive");
        for (size_t e = 0; e < layout.size(); ++e) {
            auto [a, b] = layout[e];
            if (a < 0 || b < 0 || size_t(a) >= n_qubits || size_t(b) >= n_qubits || a == b)
                throw ConfigError("layout[" + std::to_string(e) + "]", "bad qubit pair");
        }
        for (size_t g = 0; g < gates.size(); ++g) {
            const auto &s = gates[g];
            std::string f = "gates[" + std::to_string(g) + "]";
            auto [a, b] = s.pair;
            if (a < 0 || b < 0 || size_t(a) >= n_qubits || size_t(b) >= n_qubits || a == b)
                throw ConfigError(f + ".pair", "bad qubit pair");
            if (!layout.empty() && !has_edge(a, b)) throw ConfigError(f + ".pair", "pair is not a layout edge");
            if (!prob(s.depol_p)) throw ConfigError(f + ".depol_p", "must lie in [0,1]");
            if (s.coupled_qubit != a && s.coupled_qubit != b)
                throw ConfigError(f + ".coupled_qubit", "must be a member of the pair");
            const auto &c = s.control;
            for (double v : {c.cond_phase_offset, c.dyn_phase_i, c.dyn_phase_j, c.coupler_comp})
                if (!std::isfinite(v)) throw ConfigError(f + ".control", "must be finite");
        }
        for (const auto &[kl, gamma] : couplings.entries()) {
            if (kl.first < 0 || size_t(kl.second) >= gates.size())
                throw ConfigError("couplings", "gate index out of range");
            if (!std::isfinite(gamma)) throw ConfigError("couplings", "gamma must be finite");
        }
        if (readout.size() != n_qubits) throw ConfigError("readout", "need one entry per qubit");
        for (size_t q = 0; q < readout.size(); ++q)
            if (!prob(readout[q].e0) || !prob(readout[q].e1))
                throw ConfigError("readout[" + std::to_string(q) + "]", "must lie in [0,1]");
        if (single_qubit_depol.size() != n_qubits)
            throw ConfigError("single_qubit_depol", "need one entry per qubit");
        for (size_t q = 0; q < n_qubits; ++q)
            if (!prob(single_qubit_depol[q]))
                throw ConfigError("single_qubit_depol[" + std::to_string(q) + "]", "must lie in [0,1]");
        if (cluster_limit == 0) throw ConfigError("cluster_limit", "must be positive");
    }

    bool has_edge(int a, int b) const {
        for (auto [x, y] : layout)
            if ((x == a && y == b) || (x == b && y == a)) return true;
        return false;
    }

    /// Gate indices must exist and act on disjoint qubits.
    void check_parallel_layer(const std::vector<int> &layer) const {
        std::vector<bool> used(n_qubits, false);
        for (int g : layer) {
            if (g < 0 || size_t(g) >= gates.size())
                throw ConfigError("gates", "gate index " + std::to_string(g) + " does not exist");
            for (int q : {gates[g].pair.first, gates[g].pair.second}) {
                if (used[q]) throw ConfigError("gates", "gates in one parallel layer share qubit " + std::to_string(q));
                used[q] = true;
            }
        }
    }

    /// Coupling strength between gates k and l after coupler compensation.
    double effective_gamma(int k, int l) const {
        if (!couplings.contains(k, l)) return 0.0;
        return couplings.get(k, l) - 0.5 * (gates[k].control.coupler_comp + gates[l].control.coupler_comp);
    }

    /// Depolarizing parameter of single-qubit layers on qubit q (1 when disabled).
    double local_depol(size_t q) const { return single_qubit_noise ? single_qubit_depol[q] : 1.0; }

    /// Shortest path length in the layout graph between any qubit of gate a
    /// and any qubit of gate b.
    int gate_distance(int a, int b) const {
        std::vector<int> dist(n_qubits, -1);
        std::vector<int> frontier;
        for (int q : {gates[a].pair.first, gates[a].pair.second}) {
            dist[q] = 0;
            frontier.push_back(q);
        }
        for (size_t head = 0; head < frontier.size(); ++head) {
            int q = frontier[head];
            for (auto [x, y] : layout) {
                int o = x == q ? y : (y == q ? x : -1);
                if (o >= 0 && dist[o] < 0) {
                    dist[o] = dist[q] + 1;
                    frontier.push_back(o);
                }
            }
        }
        int best = -1;
        for (int q : {gates[b].pair.first, gates[b].pair.second})
            if (dist[q] >= 0 && (best < 0 || dist[q] < best)) best = dist[q];
        return best;
    }

    bool operator==(const DeviceModel &) const = default;
};

/// Even-length ring with brickwork gates: layer A (0,1),(2,3),... is gates
/// [0, n/2) and, when `both_layers`, layer B (1,2),...,(n-1,0) is [n/2, n).
inline DeviceModel ring_device(size_t n, double depol_p, double single_q, Readout ro, bool both_layers) {
    if (n < 4 || n % 2) throw DomainError("ring_device: n must be even and >= 4");
    DeviceModel d;
    d.name = "ring" + std::to_string(n);
    d.n_qubits = n;
    for (size_t q = 0; q < n; ++q) d.layout.emplace_back(int(q), int((q + 1) % n));
    auto add = [&](int a, int b) {
        GateSpec g;
        g.pair = {a, b};
        g.depol_p = depol_p;
        g.coupled_qubit = a;
        d.gates.push_back(g);
    };
    for (size_t q = 0; q < n; q += 2) add(int(q), int(q + 1));
    if (both_layers)
        for (size_t q = 1; q < n; q += 2) add(int(q), int((q + 1) % n));
    d.readout.assign(n, ro);
    d.single_qubit_depol.assign(n, single_q);
    return d;
}

/// Four qubits in a line, CZ gates on (0,1) and (2,3), with a weak coupling
/// between the neighbouring qubits 1 and 2 and small control offsets.
inline DeviceModel example_device_4q() {
    DeviceModel d;
    d.name = "example4";
    d.n_qubits = 4;
    d.layout = {{0, 1}, {1, 2}, {2, 3}};
    GateSpec a, b;
    a.pair = {0, 1};
    a.depol_p = 0.9823;
    a.coupled_qubit = 1;
    a.control = {0.02, 0.01, -0.015, 0.0};
    b.pair = {2, 3};
    b.depol_p = 0.9823;
    b.coupled_qubit = 2;
    b.control = {-0.015, 0.012, 0.008, 0.0};
    d.gates = {a, b};
    d.couplings.set(0, 1, 0.05);
    d.readout.assign(4, Readout{0.0103, 0.0382});
    d.single_qubit_depol.assign(4, 0.99656);
    return d;
}

/// Six-qubit line with three parallel gates A=(0,1), B=(2,3), C=(4,5).
/// Couplings act between the inner qubits 1, 2 and 4 (A-B 0.15, A-C 0.1,
/// B-C 0.2) and every gate starts with control offsets.
inline DeviceModel example_device_6q() {
    DeviceModel d;
    d.name = "example6";
    d.n_qubits = 6;
    d.layout = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    const std::pair<int, int> pairs[3] = {{0, 1}, {2, 3}, {4, 5}};
    const int coupled[3] = {1, 2, 4};
    const ControlParams control[3] = {{0.15, 0.1, -0.12, 0.0}, {-0.1, 0.08, 0.12, 0.0}, {0.12, -0.1, 0.09, 0.0}};
    for (int k = 0; k < 3; ++k) {
        GateSpec g;
        g.pair = pairs[k];
        g.depol_p = 0.975;
        g.coupled_qubit = coupled[k];
        g.control = control[k];
        d.gates.push_back(g);
    }
    d.couplings.set(0, 1, 0.15);
    d.couplings.set(0, 2, 0.1);
    d.couplings.set(1, 2, 0.2);
    d.readout.assign(6, Readout{0.0103, 0.0382});
    d.single_qubit_depol.assign(6, 0.99656);
    return d;
}

}  // namespace cabench

#endif
