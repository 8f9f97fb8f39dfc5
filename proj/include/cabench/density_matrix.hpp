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


#ifndef CABENCH_DENSITY_MATRIX_HPP
#define CABENCH_DENSITY_MATRIX_HPP

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <variant>
#include <utility>
#include <vector>

#include "cabench/channels.hpp"
#include "cabench/circuit.hpp"
#include "cabench/dense.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"

namespace cabench {

/// Dense operator on n qubits evolved by linear maps. Usually a density
/// matrix, but every operation is linear so any operator can be pushed
/// through (used by the process-fidelity oracles).
class DensityMatrix {
   public:
    DensityMatrix() = default;
    explicit DensityMatrix(size_t n) : n_(n), d_(size_t{1} << n), rho_(d_ * d_, 0.0) {}

    static DensityMatrix zero_state(size_t n) {
        DensityMatrix r(n);
        r.rho_[0] = 1.0;
        return r;
    }
    static DensityMatrix from_matrix(Matrix m) {
        size_t n = 0;
        while ((size_t{1} << n) < m.dim) ++n;
        if ((size_t{1} << n) != m.dim) throw DimensionError("DensityMatrix: dimension is not a power of two");
        DensityMatrix r;
        r.n_ = n;
        r.d_ = m.dim;
        r.rho_ = std::move(m.a);
        return r;
    }
    Matrix to_matrix() const & {
        Matrix m;
        m.dim = d_;
        m.a = rho_;
        return m;
    }
    Matrix to_matrix() && {
        Matrix m;
        m.dim = d_;
        m.a = std::move(rho_);
        return m;
    }

    size_t n() const { return n_; }
    size_t dim() const { return d_; }
    cplx &at(size_t i, size_t j) { return rho_[i * d_ + j]; }
    const cplx &at(size_t i, size_t j) const { return rho_[i * d_ + j]; }

    /// rho -> U rho U^dagger with U acting on qubit q.
    void apply_1q(size_t q, const Mat2 &u) {
        size_t bit = size_t{1} << q;
        for (size_t j = 0; j < d_; ++j)
            for (size_t i0 = 0; i0 < d_; ++i0) {
                if (i0 & bit) continue;
                size_t i1 = i0 | bit;
                cplx a = at(i0, j), b = at(i1, j);
                at(i0, j) = u[0] * a + u[1] * b;
                at(i1, j) = u[2] * a + u[3] * b;
            }
        cplx c0 = std::conj(u[0]), c1 = std::conj(u[1]), c2 = std::conj(u[2]), c3 = std::conj(u[3]);
        for (size_t i = 0; i < d_; ++i) {
            cplx *row = &rho_[i * d_];
            for (size_t j0 = 0; j0 < d_; ++j0) {
                if (j0 & bit) continue;
                size_t j1 = j0 | bit;
                cplx a = row[j0], b = row[j1];
                row[j0] = a * c0 + b * c1;
                row[j1] = a * c2 + b * c3;
            }
        }
    }

    /// rho_ij -> D_i conj(D_j) rho_ij for a diagonal on a subset of qubits.
    void apply_diagonal(const DiagonalUnitary &dg) {
        std::vector<cplx> full(d_);
        for (size_t x = 0; x < d_; ++x) {
            size_t y = 0;
            for (size_t t = 0; t < dg.qubits.size(); ++t) y |= ((x >> dg.qubits[t]) & 1) << t;
            full[x] = dg.diag[y];
        }
        for (size_t i = 0; i < d_; ++i) {
            cplx *row = &rho_[i * d_];
            for (size_t j = 0; j < d_; ++j) row[j] *= full[i] * std::conj(full[j]);
        }
    }

    /// rho -> P rho P^dagger.
    void apply_pauli(const PauliString &p) {
        if (p.n() != n_) throw DimensionError("apply_pauli: size mismatch");
        size_t xm = 0, zm = 0;
        for (size_t q = 0; q < n_; ++q) {
            if (p.x.get(q)) xm |= size_t{1} << q;
            if (p.z.get(q)) zm |= size_t{1} << q;
        }
        // P|j> = ph(j)|j^x>, ph(j) = (-1)^{popcount(j & z)} i^{#Y}; the i^{#Y}
        // factors cancel between P and P^dagger.
        std::vector<double> ph(d_);
        for (size_t j = 0; j < d_; ++j) ph[j] = (std::popcount(j & zm) & 1) ? -1.0 : 1.0;
        std::vector<cplx> out(rho_.size());
        for (size_t a = 0; a < d_; ++a) {
            size_t sa = a ^ xm;
            for (size_t b = 0; b < d_; ++b) {
                size_t sb = b ^ xm;
                out[a * d_ + b] = ph[sa] * ph[sb] * rho_[sa * d_ + sb];
            }
        }
        rho_.swap(out);
    }

    /// rho -> sum_Q w_Q Q rho Q with Q local to ch.support.
    void apply_pauli_channel(const PauliChannel &ch) {
        bool z_only = true;
        for (const auto &[p, w] : ch.weights)
            if (p.x.any()) z_only = false;
        if (z_only) {
            // Entry (i, j) is scaled by sum_s w_s (-1)^{s . (i ^ j)} on the support.
            size_t k = ch.support.size();
            std::vector<double> factor(size_t{1} << k, 0.0);
            for (const auto &[p, w] : ch.weights) {
                size_t s = 0;
                for (size_t t = 0; t < k; ++t) s |= size_t(p.z.get(t)) << t;
                for (size_t t = 0; t < factor.size(); ++t) factor[t] += (std::popcount(s & t) & 1) ? -w : w;
            }
            for (size_t i = 0; i < d_; ++i)
                for (size_t j = 0; j < d_; ++j) {
                    size_t diff = i ^ j, t = 0;
                    for (size_t u = 0; u < k; ++u) t |= ((diff >> ch.support[u]) & 1) << u;
                    at(i, j) *= factor[t];
                }
            return;
        }
        std::vector<cplx> acc(rho_.size(), 0.0);
        for (const auto &[p, w] : ch.weights) {
            DensityMatrix tmp = *this;
            tmp.apply_pauli(ch.embed(p, n_));
            for (size_t k = 0; k < acc.size(); ++k) acc[k] += w * tmp.rho_[k];
        }
        rho_.swap(acc);
    }

    /// rho -> p rho + (1-p) (I_S / d_S) (x) tr_S rho.
    void depolarize(const std::vector<int> &support, double p) {
        if (p == 1.0 || support.empty()) return;
        size_t mask = 0;
        for (int q : support) mask |= size_t{1} << q;
        std::vector<size_t> sub;  // all settings of the support bits
        for (size_t s = mask;; s = (s - 1) & mask) {
            sub.push_back(s);
            if (s == 0) break;
        }
        // Partial traces over the support, then p * rho + (1-p) tr_S(rho) (x) I / d_S.
        const double w = (1.0 - p) / double(sub.size());
        std::vector<cplx> traces;
        traces.reserve(d_ * d_ / (sub.size() * sub.size()));
        for (size_t a = 0; a < d_; ++a) {
            if (a & mask) continue;
            for (size_t b = 0; b < d_; ++b) {
                if (b & mask) continue;
                cplx t = 0;
                for (size_t s : sub) t += at(a | s, b | s);
                traces.push_back(w * t);
            }
        }
        for (auto &v : rho_) v *= p;
        size_t k = 0;
        for (size_t a = 0; a < d_; ++a) {
            if (a & mask) continue;
            for (size_t b = 0; b < d_; ++b) {
                if (b & mask) continue;
                for (size_t s : sub) at(a | s, b | s) += traces[k];
                ++k;
            }
        }
    }

    std::vector<double> probabilities() const {
        std::vector<double> pr(d_);
        for (size_t i = 0; i < d_; ++i) pr[i] = at(i, i).real();
        return pr;
    }

   private:
    size_t n_ = 0;
    size_t d_ = 1;
    std::vector<cplx> rho_;
};

struct DmOptions {
    /// Keep the coupling and control errors coherent; otherwise apply their
    /// exact Pauli twirl (the model the stabilizer backend samples).
    bool coherent = true;
    /// Apply depolarizing noise after Pauli layers.
    bool pauli_layer_noise = true;
    /// Apply all noise; false gives the ideal circuit.
    bool noisy = true;
    /// Average over per-shot random final X flips (undone classically); the
    /// readout confusion becomes symmetric with rate (e0 + e1) / 2.
    bool readout_twirl = false;
    size_t max_qubits = 12;
};

namespace detail {

inline void local_noise(DensityMatrix &rho, const DeviceModel &dev, const std::vector<int> &qubits) {
    for (int q : qubits) rho.depolarize({q}, dev.local_depol(q));
}

inline std::vector<int> all_qubits(size_t n) {
    std::vector<int> r(n);
    for (size_t q = 0; q < n; ++q) r[q] = int(q);
    return r;
}

}  // namespace detail

/// Noise of one parallel gate layer: gate depolarizing, then the coherent
/// (or twirled) coupling and control error of every cluster.
inline void apply_gate_layer_noise(DensityMatrix &rho, const DeviceModel &dev, const std::vector<int> &gates,
                                   const DmOptions &opt) {
    for (int g : gates) rho.depolarize({dev.gates[g].pair.first, dev.gates[g].pair.second}, dev.gates[g].depol_p);
    for (const auto &cluster : coupling_clusters(dev, gates)) {
        auto dg = cluster_error_diagonal(dev, cluster);
        if (opt.coherent)
            rho.apply_diagonal(dg);
        else
            rho.apply_pauli_channel(pauli_twirl_diagonal(dg));
    }
}

inline void apply_layer(DensityMatrix &rho, const Layer &layer, const DeviceModel &dev, const DmOptions &opt) {
    size_t n = rho.n();
    std::visit(
        [&](const auto &l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, LocalCliffordLayer>) {
                const auto &tab = Clifford1QTable::get();
                for (size_t q = 0; q < n; ++q)
                    if (l.per_qubit[q] != 0) rho.apply_1q(q, tab[l.per_qubit[q]].unitary);
                if (opt.noisy) detail::local_noise(rho, dev, detail::all_qubits(n));
            } else if constexpr (std::is_same_v<T, PauliLayer>) {
                rho.apply_pauli(l.pauli);
                if (opt.noisy && opt.pauli_layer_noise) detail::local_noise(rho, dev, detail::all_qubits(n));
            } else if constexpr (std::is_same_v<T, GateLayer>) {
                dev.check_parallel_layer(l.gates);
                if (opt.noisy) apply_gate_layer_noise(rho, dev, l.gates, opt);
                DiagonalUnitary cz = DiagonalUnitary::identity(gate_qubits(dev, l.gates));
                for (int g : l.gates) {
                    GateSpec ideal = dev.gates[g];
                    ideal.control = ControlParams{};
                    cz *= parametric_cz_unitary(ideal);
                }
                rho.apply_diagonal(cz);
            } else {
                rho.apply_1q(size_t(l.qubit), l.unitary);
                if (opt.noisy) detail::local_noise(rho, dev, {l.qubit});
            }
        },
        layer);
}

/// Per-qubit readout confusion applied to an outcome distribution.
inline std::vector<double> apply_readout_confusion(std::vector<double> probs, const std::vector<Readout> &ro) {
    size_t d = probs.size();
    for (size_t q = 0; q < ro.size(); ++q) {
        size_t bit = size_t{1} << q;
        double e0 = ro[q].e0, e1 = ro[q].e1;
        if (e0 == 0.0 && e1 == 0.0) continue;
        for (size_t x = 0; x < d; ++x) {
            if (x & bit) continue;
            double p0 = probs[x], p1 = probs[x | bit];
            probs[x] = (1 - e0) * p0 + e1 * p1;
            probs[x | bit] = e0 * p0 + (1 - e1) * p1;
        }
    }
    return probs;
}

/// Exact outcome distribution of a sequence started in |0...0>, readout included.
inline std::vector<double> dm_run(const CircuitSequence &seq, const DeviceModel &dev, const DmOptions &opt = {}) {
    if (seq.n > opt.max_qubits)
        throw ResourceError("dm_run: " + std::to_string(seq.n) + " qubits exceed the density-matrix limit " +
                            std::to_string(opt.max_qubits));
    if (seq.n != dev.n_qubits) throw DimensionError("dm_run: sequence and device qubit counts differ");
    auto rho = DensityMatrix::zero_state(seq.n);
    for (const auto &layer : seq.layers) apply_layer(rho, layer, dev, opt);
    auto probs = rho.probabilities();
    if (opt.noisy) {
        auto ro = dev.readout;
        if (opt.readout_twirl)
            for (auto &r : ro) r.e0 = r.e1 = 0.5 * (r.e0 + r.e1);
        probs = apply_readout_confusion(std::move(probs), ro);
    }
    double s = 0;
    for (double &p : probs) {
        if (p < 0 && p > -1e-12) p = 0;
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-10) throw ContractViolation("dm_run: probabilities do not sum to one");
    return probs;
}

}  // namespace cabench

#endif
