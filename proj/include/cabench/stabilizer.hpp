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


#ifndef CABENCH_STABILIZER_HPP
#define CABENCH_STABILIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "cabench/channels.hpp"
#include "cabench/circuit.hpp"
#include "cabench/clifford1q.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/random.hpp"
#include "cabench/shots.hpp"

namespace cabench {

namespace detail {

/// Threshold t with P(rng() < t) = prob for a 64-bit uniform draw.
inline uint64_t bernoulli_threshold(double prob) {
    if (prob <= 0.0) return 0;
    if (prob >= 1.0) return UINT64_MAX;
    return uint64_t(std::ldexp(prob, 64));
}

/// Twirled coherent error of one coupling cluster, ready to sample.
struct ClusterSampler {
    std::vector<int> qubits;
    uint64_t no_fault = UINT64_MAX;     // threshold of the identity outcome
    std::vector<double> cumulative;     // over non-identity patterns, normalized
    std::vector<uint64_t> patterns;     // Z-pattern over `qubits`
};

}  // namespace detail

/// Noise tables for the stabilizer backend: per-qubit and per-gate fault
/// thresholds and the twirled coupling channels of every gate layer seen.
class CompiledNoise {
   public:
    struct Options {
        bool pauli_layer_noise = true;
        /// Per shot, flip a uniformly random subset of qubits with X gates
        /// folded into the final local layer and undo the flips classically.
        bool readout_twirl = false;
    };

    CompiledNoise(const DeviceModel &dev, Options opt) : dev_(&dev), opt_(opt) {
        dev.validate();
        for (size_t q = 0; q < dev.n_qubits; ++q) local_.push_back(detail::bernoulli_threshold(1.0 - dev.local_depol(q)));
        for (const auto &g : dev.gates) gate_.push_back(detail::bernoulli_threshold(1.0 - g.depol_p));
    }
    explicit CompiledNoise(const DeviceModel &dev) : CompiledNoise(dev, Options{}) {}

    /// Precomputes the samplers of a gate layer. Must be called for every
    /// layer before shots run concurrently.
    void prepare(const std::vector<int> &gates) {
        auto key = gates;
        std::sort(key.begin(), key.end());
        if (layers_.count(key)) return;
        dev_->check_parallel_layer(gates);
        std::vector<detail::ClusterSampler> samplers;
        for (const auto &cluster : coupling_clusters(*dev_, key)) {
            auto ch = pauli_twirl_diagonal(cluster_error_diagonal(*dev_, cluster));
            detail::ClusterSampler s;
            s.qubits = ch.support;
            double p_id = 0;
            std::vector<std::pair<uint64_t, double>> faults;
            for (const auto &[p, w] : ch.weights) {
                uint64_t pat = 0;
                for (size_t t = 0; t < p.n(); ++t) pat |= uint64_t(p.z.get(t)) << t;
                if (pat == 0)
                    p_id += w;
                else
                    faults.emplace_back(pat, w);
            }
            if (faults.empty()) continue;
            double tot = 0;
            for (auto &[pat, w] : faults) tot += w;
            s.no_fault = detail::bernoulli_threshold(p_id);
            double acc = 0;
            for (auto &[pat, w] : faults) {
                acc += w / tot;
                s.patterns.push_back(pat);
                s.cumulative.push_back(acc);
            }
            s.cumulative.back() = 1.0;
            samplers.push_back(std::move(s));
        }
        layers_.emplace(std::move(key), std::move(samplers));
    }
    void prepare(const CircuitSequence &seq) {
        for (const auto &l : seq.layers)
            if (auto *g = std::get_if<GateLayer>(&l)) prepare(g->gates);
    }

    const std::vector<detail::ClusterSampler> &layer(const std::vector<int> &gates) const {
        auto key = gates;
        std::sort(key.begin(), key.end());
        auto it = layers_.find(key);
        if (it == layers_.end()) throw ContractViolation("CompiledNoise: gate layer was not prepared");
        return it->second;
    }

    const DeviceModel &device() const { return *dev_; }
    const Options &options() const { return opt_; }
    uint64_t local_threshold(size_t q) const { return local_[q]; }
    uint64_t gate_threshold(size_t g) const { return gate_[g]; }

   private:
    const DeviceModel *dev_;
    Options opt_;
    std::vector<uint64_t> local_;
    std::vector<uint64_t> gate_;
    std::map<std::vector<int>, std::vector<detail::ClusterSampler>> layers_;
};

/// Pauli frame propagated through a Clifford circuit. Benchmark sequences
/// compose to the identity up to final X flips, so the ideal outcome is the
/// sequence's `expected` bits and the frame's X part is the error pattern.
class PauliFrameSimulator {
   public:
    explicit PauliFrameSimulator(const CompiledNoise &noise)
        : noise_(&noise), n_(noise.device().n_qubits), x_(n_), z_(n_) {}

    BitVector run_shot(const CircuitSequence &seq, Rng &rng) {
        const auto &dev = noise_->device();
        std::fill(x_.words().begin(), x_.words().end(), 0);
        std::fill(z_.words().begin(), z_.words().end(), 0);
        const auto &tab = Clifford1QTable::get();
        for (const auto &layer : seq.layers) {
            if (auto *loc = std::get_if<LocalCliffordLayer>(&layer)) {
                for (size_t q = 0; q < n_; ++q) {
                    int c = loc->per_qubit[q];
                    if (c == 0) continue;
                    uint8_t code = uint8_t(x_.get(q)) | uint8_t(z_.get(q) << 1);
                    uint8_t img = tab.frame_map(c, code);
                    x_.set(q, img & 1);
                    z_.set(q, img & 2);
                }
                local_faults(rng);
            } else if (std::holds_alternative<PauliLayer>(layer)) {
                if (noise_->options().pauli_layer_noise) local_faults(rng);
            } else if (auto *gl = std::get_if<GateLayer>(&layer)) {
                for (int g : gl->gates) {
                    auto [a, b] = dev.gates[g].pair;
                    bool xa = x_.get(a), xb = x_.get(b);
                    if (xb) z_.flip(a);
                    if (xa) z_.flip(b);
                }
                for (int g : gl->gates) {
                    if (rng() < noise_->gate_threshold(g)) {
                        uint64_t r = rng();
                        auto [a, b] = dev.gates[g].pair;
                        if (r & 1) x_.flip(a);
                        if (r & 2) z_.flip(a);
                        if (r & 4) x_.flip(b);
                        if (r & 8) z_.flip(b);
                    }
                }
                for (const auto &s : noise_->layer(gl->gates)) {
                    if (rng() < s.no_fault) continue;
                    double u = uniform01(rng);
                    size_t k = size_t(std::lower_bound(s.cumulative.begin(), s.cumulative.end(), u) -
                                      s.cumulative.begin());
                    k = std::min(k, s.patterns.size() - 1);
                    uint64_t pat = s.patterns[k];
                    for (size_t t = 0; t < s.qubits.size(); ++t)
                        if ((pat >> t) & 1) z_.flip(s.qubits[t]);
                }
            } else {
                throw UnsupportedError("stabilizer backend cannot run rotation layers");
            }
        }
        BitVector out = x_;
        if (seq.expected.size() == n_) out ^= seq.expected;
        const bool twirl = noise_->options().readout_twirl;
        for (size_t q = 0; q < n_; ++q) {
            bool actual = out.get(q) ^ (twirl && (rng() & 1));
            double e = actual ? dev.readout[q].e1 : dev.readout[q].e0;
            if (e > 0.0 && uniform01(rng) < e) out.flip(q);
        }
        return out;
    }

   private:
    void local_faults(Rng &rng) {
        for (size_t q = 0; q < n_; ++q) {
            if (rng() < noise_->local_threshold(q)) {
                uint64_t r = rng();
                if (r & 1) x_.flip(q);
                if (r & 2) z_.flip(q);
            }
        }
    }

    const CompiledNoise *noise_;
    size_t n_;
    BitVector x_, z_;
};

/// One shot of a closed sequence on the twirled-noise model.
inline BitVector stab_run_shot(const CircuitSequence &seq, const DeviceModel &dev, Rng &rng) {
    if (!seq.closes(dev)) throw ContractViolation("stab_run_shot: sequence does not compose to the identity");
    CompiledNoise noise(dev);
    noise.prepare(seq);
    PauliFrameSimulator sim(noise);
    return sim.run_shot(seq, rng);
}

/// `shots` shots of a closed sequence; `noise` must have been prepared for it.
inline ShotCounts stab_run(const CircuitSequence &seq, const CompiledNoise &noise, uint64_t shots, Rng &rng) {
    PauliFrameSimulator sim(noise);
    ShotAccumulator acc(seq.n);
    for (uint64_t t = 0; t < shots; ++t) acc.add(sim.run_shot(seq, rng));
    return acc.finish();
}

}  // namespace cabench

#endif
