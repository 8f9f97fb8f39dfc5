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


#ifndef CABENCH_EXPERIMENTS_HPP
#define CABENCH_EXPERIMENTS_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cabench/analysis.hpp"
#include "cabench/cab.hpp"
#include "cabench/device.hpp"
#include "cabench/format.hpp"
#include "cabench/random.hpp"

namespace cabench {

/// Depolarizing parameter whose process fidelity on a `dim`-dimensional
/// system is `fidelity`: F = (1 + (dim^2 - 1) p) / dim^2.
inline double depol_for_process_fidelity(double fidelity, size_t dim = 4) {
    double d2 = double(dim * dim);
    double p = (d2 * fidelity - 1.0) / (d2 - 1.0);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("depol_for_process_fidelity: fidelity out of range");
    return p;
}

/// 44 qubits on a ring with the 22 gates (0,1), (2,3), ...; every CZ has
/// process fidelity 0.9794 and there is no coupling.
inline DeviceModel example_ring_44q() {
    auto d = ring_device(44, depol_for_process_fidelity(0.9794), kDefaultSingleQubitDepol, Readout{0.0103, 0.0382},
                         false);
    d.name = "ring44";
    return d;
}

// ---------------------------------------------------------------------------
// Fully connected gate on a ring

struct FullyConnectedGate {
    DeviceModel device;  // ring with both brickwork layers
    TargetGate gate;
    CliffordTableau tableau;
};

/// CZ layer A, random local layer, CZ layer B, random local layer on an
/// existing ring device (from ring_device(n, ..., true)).
inline TargetGate fully_connected_gate(const DeviceModel &ring, Rng &rng) {
    size_t n = ring.n_qubits;
    if (n < 4 || n % 2) throw DomainError("fully_connected_gate: n must be even and >= 4");
    if (ring.gates.size() != n) throw ConfigError("gates", "fully connected gate needs a ring with both layers");
    std::vector<int> a(n / 2), b(n / 2);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), int(n / 2));
    TargetGate u;
    u.name = "fully_connected";
    u.n = n;
    u.layers.push_back(GateLayer{a});
    u.layers.push_back(sample_local_clifford(n, rng));
    u.layers.push_back(GateLayer{b});
    u.layers.push_back(sample_local_clifford(n, rng));
    return u;
}

/// Noise-free ring of n qubits with a random fully connected gate.
inline FullyConnectedGate fully_connected_gate(size_t n, Rng &rng) {
    if (n < 4 || n % 2) throw DomainError("fully_connected_gate: n must be even and >= 4");
    FullyConnectedGate r{ring_device(n, 1.0, 1.0, Readout{}, true), {}, CliffordTableau(n)};
    r.gate = fully_connected_gate(r.device, rng);
    r.tableau = r.gate.tableau(r.device);
    return r;
}

struct OrderStats {
    size_t n = 0;
    uint64_t cap = 0;
    std::vector<uint64_t> orders;  // 0 where the order exceeds `cap`
    size_t above_cap = 0;

    /// Median with orders above the cap ranked highest.
    double median() const {
        if (orders.empty()) return 0;
        std::vector<uint64_t> v = orders;
        for (auto &o : v)
            if (o == 0) o = UINT64_MAX;
        std::sort(v.begin(), v.end());
        size_t m = v.size() / 2;
        if (v.size() % 2) return double(v[m]);
        return 0.5 * (double(v[m - 1]) + double(v[m]));
    }
    std::string to_csv() const {
        CsvTable t({"n", "sample", "order"});
        for (size_t i = 0; i < orders.size(); ++i)
            t.add({std::to_string(n), std::to_string(i), orders[i] ? std::to_string(orders[i]) : "inf"});
        return t.str();
    }
};

/// Orders of `samples` independent fully connected gates on n qubits.
inline OrderStats order_stats(size_t n, size_t samples, uint64_t seed, uint64_t cap = 100000) {
    OrderStats s;
    s.n = n;
    s.cap = cap;
    for (size_t i = 0; i < samples; ++i) {
        Rng rng = make_stream(seed, {kTagFullyConnected, n, i});
        auto fc = fully_connected_gate(n, rng);
        auto o = gate_order(fc.tableau, cap);
        s.orders.push_back(o.value_or(0));
        if (!o) ++s.above_cap;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Parallel CZ scan

struct ScanRow {
    size_t n_gates = 0;
    FidelityEstimate dressed, twirl, pure;
    double theory = 0;  // analytic fidelity of the gate layer alone
};

struct ParallelCzScan {
    std::vector<ScanRow> rows;

    std::string to_csv() const {
        CsvTable t({"n_gates", "n_qubits", "dressed", "dressed_se", "twirl", "twirl_se", "pure", "pure_se",
                    "theory"});
        for (const auto &r : rows)
            t.add({std::to_string(r.n_gates), std::to_string(2 * r.n_gates), format_double(r.dressed.value),
                   format_double(r.dressed.se), format_double(r.twirl.value), format_double(r.twirl.se),
                   format_double(r.pure.value), format_double(r.pure.se), format_double(r.theory)});
        return t.str();
    }
};

/// Analytic fidelity of a parallel layer running only `gates`: couplings to
/// idle gates are dropped.
inline double layer_analytic_fidelity(const DeviceModel &dev, const std::vector<int> &gates) {
    std::vector<double> p;
    CouplingMap c;
    for (size_t a = 0; a < gates.size(); ++a) {
        p.push_back(dev.gates[gates[a]].depol_p);
        for (size_t b = a + 1; b < gates.size(); ++b) {
            double e = dev.effective_gamma(gates[a], gates[b]);
            if (e != 0.0) c.set(int(a), int(b), e);
        }
    }
    std::vector<int> all(gates.size());
    std::iota(all.begin(), all.end(), 0);
    return analytic_fidelity(all, p, c, std::vector<int>(gates.size(), 4), dev.cluster_limit);
}

/// CAB of the parallel layer of the first k gates for each k in `counts`.
/// `counts` empty means 1, 2, ..., all gates.
inline ParallelCzScan parallel_cz_scan(const DeviceModel &dev, std::vector<size_t> counts, const CabConfig &cfg) {
    if (counts.empty())
        for (size_t k = 1; k <= dev.gates.size(); ++k) counts.push_back(k);
    ParallelCzScan out;
    for (size_t k : counts) {
        if (k < 1 || k > dev.gates.size())
            throw ConfigError("parallel_cz_scan.counts", "gate count " + std::to_string(k) + " out of range");
        std::vector<int> gates(k);
        std::iota(gates.begin(), gates.end(), 0);
        dev.check_parallel_layer(gates);
        auto c = cfg;
        c.subset_list = {gates};
        auto rep = run_cab_experiment(TargetGate::parallel_cz(dev.n_qubits, gates), dev, c);
        ScanRow r;
        r.n_gates = k;
        r.dressed = rep.dressed;
        r.twirl = rep.twirl;
        r.pure = rep.pure;
        r.theory = layer_analytic_fidelity(dev, gates);
        out.rows.push_back(std::move(r));
    }
    return out;
}

}  // namespace cabench

#endif
