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


#ifndef CABENCH_CHANNELS_HPP
#define CABENCH_CHANNELS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cabench/bits.hpp"
#include "cabench/clifford1q.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"
#include "cabench/random.hpp"

namespace cabench {

/// Diagonal unitary on a list of qubits; index bit t corresponds to qubits[t].
struct DiagonalUnitary {
    std::vector<int> qubits;
    std::vector<cplx> diag;

    static DiagonalUnitary identity(std::vector<int> qubits) {
        DiagonalUnitary d;
        d.diag.assign(size_t{1} << qubits.size(), 1.0);
        d.qubits = std::move(qubits);
        return d;
    }
    size_t k() const { return qubits.size(); }
    /// Position of a qubit in `qubits`, or -1.
    int slot(int q) const {
        for (size_t t = 0; t < qubits.size(); ++t)
            if (qubits[t] == q) return int(t);
        return -1;
    }
    /// Elementwise product; `o` must act on a subset of this unitary's qubits.
    DiagonalUnitary &operator*=(const DiagonalUnitary &o) {
        std::vector<int> pos;
        for (int q : o.qubits) {
            int s = slot(q);
            if (s < 0) throw DimensionError("DiagonalUnitary: operand qubit outside support");
            pos.push_back(s);
        }
        for (size_t x = 0; x < diag.size(); ++x) {
            size_t y = 0;
            for (size_t t = 0; t < pos.size(); ++t) y |= ((x >> pos[t]) & 1) << t;
            diag[x] *= o.diag[y];
        }
        return *this;
    }
};

/// Pauli channel sum_Q w_Q Q rho Q on `support`; Paulis are local to the
/// support (qubit t of the string is support[t]).
struct PauliChannel {
    std::vector<int> support;
    std::vector<std::pair<PauliString, double>> weights;

    double total() const {
        double s = 0;
        for (const auto &[p, w] : weights) s += w;
        return s;
    }
    double weight_of(const PauliString &local) const {
        for (const auto &[p, w] : weights)
            if (p.equal_up_to_phase(local)) return w;
        return 0.0;
    }
    PauliString embed(const PauliString &local, size_t n) const {
        PauliString r(n);
        for (size_t t = 0; t < support.size(); ++t) r.set(support[t], local.get(t));
        return r;
    }
};

/// Parametric CZ error E = diag(1, e^{i th2}, e^{i th1}, e^{i(th1+th2+dphi)})
/// in the |q_i q_j> basis, i.e. the gate is E times the ideal CZ.
inline DiagonalUnitary control_error_diagonal(const GateSpec &g) {
    auto d = DiagonalUnitary::identity({g.pair.first, g.pair.second});
    const auto &c = g.control;
    for (size_t x = 0; x < 4; ++x) {
        int bi = x & 1, bj = (x >> 1) & 1;
        double ph = c.dyn_phase_i * bi + c.dyn_phase_j * bj + c.cond_phase_offset * bi * bj;
        d.diag[x] = std::polar(1.0, ph);
    }
    return d;
}

/// diag(1, e^{i th2}, e^{i th1}, e^{i(th1+th2+pi+dphi)}); ideal CZ at zero controls.
inline DiagonalUnitary parametric_cz_unitary(const GateSpec &g) {
    auto d = control_error_diagonal(g);
    d.diag[3] = -d.diag[3];
    return d;
}

/// Qubits of the listed gates, two per gate in gate order.
inline std::vector<int> gate_qubits(const DeviceModel &dev, const std::vector<int> &gates) {
    std::vector<int> qs;
    for (int g : gates) {
        qs.push_back(dev.gates[g].pair.first);
        qs.push_back(dev.gates[g].pair.second);
    }
    return qs;
}

inline void check_cluster_size(const DeviceModel &dev, const std::vector<int> &cluster) {
    if (cluster.size() > dev.cluster_limit) {
        std::string ids;
        for (int g : cluster) ids += (ids.empty() ? "" : ",") + std::to_string(g);
        throw ResourceError("coupling component {" + ids + "} has " + std::to_string(cluster.size()) +
                            " gates, above the cluster limit " + std::to_string(dev.cluster_limit));
    }
}

/// V = exp(-i sum_{k<l} gamma_kl Z_{i_k} Z_{i_l}) over the 2k qubits of the cluster.
inline DiagonalUnitary build_coupling_unitary(const DeviceModel &dev, const std::vector<int> &cluster) {
    check_cluster_size(dev, cluster);
    auto v = DiagonalUnitary::identity(gate_qubits(dev, cluster));
    std::vector<double> ham(v.diag.size(), 0.0);
    for (size_t a = 0; a < cluster.size(); ++a) {
        for (size_t b = a + 1; b < cluster.size(); ++b) {
            double gamma = dev.effective_gamma(cluster[a], cluster[b]);
            if (gamma == 0.0) continue;
            int sa = v.slot(dev.gates[cluster[a]].coupled_qubit);
            int sb = v.slot(dev.gates[cluster[b]].coupled_qubit);
            for (size_t x = 0; x < ham.size(); ++x) {
                int za = ((x >> sa) & 1) ? -1 : 1;
                int zb = ((x >> sb) & 1) ? -1 : 1;
                ham[x] += gamma * za * zb;
            }
        }
    }
    for (size_t x = 0; x < ham.size(); ++x) v.diag[x] = std::polar(1.0, -ham[x]);
    return v;
}

/// Coherent error of a cluster within one parallel layer: V times every
/// member's control error.
inline DiagonalUnitary cluster_error_diagonal(const DeviceModel &dev, const std::vector<int> &cluster) {
    auto d = build_coupling_unitary(dev, cluster);
    for (int g : cluster) d *= control_error_diagonal(dev.gates[g]);
    return d;
}

/// Connected components of the layer's gates under nonzero effective coupling.
/// Components whose coherent error is trivially the identity are dropped.
inline std::vector<std::vector<int>> coupling_clusters(const DeviceModel &dev, const std::vector<int> &layer) {
    std::vector<int> comp(layer.size(), -1);
    std::vector<std::vector<int>> out;
    for (size_t s = 0; s < layer.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<size_t> stack{s};
        comp[s] = int(out.size());
        std::vector<int> members;
        while (!stack.empty()) {
            size_t a = stack.back();
            stack.pop_back();
            members.push_back(layer[a]);
            for (size_t b = 0; b < layer.size(); ++b)
                if (comp[b] < 0 && dev.effective_gamma(layer[a], layer[b]) != 0.0) {
                    comp[b] = comp[s];
                    stack.push_back(b);
                }
        }
        std::sort(members.begin(), members.end());
        bool trivial = members.size() == 1 && dev.gates[members[0]].control.is_zero();
        if (!trivial) check_cluster_size(dev, members);
        out.push_back(trivial ? std::vector<int>{} : members);
    }
    std::vector<std::vector<int>> kept;
    for (auto &m : out)
        if (!m.empty()) kept.push_back(std::move(m));
    return kept;
}

/// Exact Pauli twirl of a diagonal unitary: weights |2^-k tr(Q D)|^2 on
/// Z-type Q, computed with a fast Walsh-Hadamard transform.
inline PauliChannel pauli_twirl_diagonal(const DiagonalUnitary &v) {
    size_t k = v.k();
    size_t dim = size_t{1} << k;
    if (v.diag.size() != dim) throw DimensionError("pauli_twirl_diagonal: diagonal length mismatch");
    std::vector<cplx> c = v.diag;
    for (const auto &e : c)
        if (std::abs(std::abs(e) - 1.0) > 1e-9) throw ContractViolation("pauli_twirl_diagonal: entry is not unit modulus");
    for (size_t h = 1; h < dim; h <<= 1)
        for (size_t i = 0; i < dim; i += 2 * h)
            for (size_t j = i; j < i + h; ++j) {
                cplx a = c[j], b = c[j + h];
                c[j] = a + b;
                c[j + h] = a - b;
            }
    PauliChannel ch;
    ch.support = v.qubits;
    double norm = 1.0 / double(dim);
    for (size_t s = 0; s < dim; ++s) {
        double w = std::norm(c[s] * norm);
        if (w < 1e-300) continue;
        PauliString z(k);
        for (size_t t = 0; t < k; ++t) z.z.set(t, (s >> t) & 1);
        ch.weights.emplace_back(std::move(z), w);
    }
    return ch;
}

/// With probability p the identity, otherwise a uniform Pauli on the support
/// (identity included).
inline PauliString apply_depolarizing(double p, const std::vector<int> &support, size_t n, Rng &rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("apply_depolarizing: p outside [0,1]");
    PauliString r(n);
    if (uniform01(rng) < p) return r;
    for (int q : support) {
        uint64_t bits = rng() & 3;
        r.x.set(q, bits & 1);
        r.z.set(q, bits & 2);
    }
    return r;
}

/// Independent flips: 0 -> 1 with e0, 1 -> 0 with e1.
inline BitVector apply_readout_noise(BitVector bits, const std::vector<Readout> &ro, Rng &rng) {
    if (ro.size() != bits.size()) throw DimensionError("apply_readout_noise: one readout entry per bit");
    for (size_t q = 0; q < bits.size(); ++q) {
        double e = bits.get(q) ? ro[q].e1 : ro[q].e0;
        if (!(e >= 0.0 && e <= 1.0)) throw DomainError("apply_readout_noise: probability outside [0,1]");
        if (e > 0.0 && uniform01(rng) < e) bits.flip(q);
    }
    return bits;
}

}  // namespace cabench

#endif
