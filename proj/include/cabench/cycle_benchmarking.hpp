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


#ifndef CABENCH_CYCLE_BENCHMARKING_HPP
#define CABENCH_CYCLE_BENCHMARKING_HPP

#include <cmath>
#include <vector>

#include "cabench/cab.hpp"

namespace cabench {

/// Cycle benchmarking baseline. A depth unit is ord(U) repetitions of
/// (random Pauli, U), so `depths` count units, not gates.
struct CbConfig {
    std::vector<int> depths{5, 10};
    size_t K_r = 25;  // sequences per depth, split evenly over the characters
    uint64_t K_s = 20000;
    size_t characters = 5;
    uint64_t seed = 1;
    Backend backend = Backend::stab;
    unsigned threads = 1;
    bool pauli_layer_noise = true;
    bool readout_twirl = true;
    bool coherent = true;
    uint64_t order_cap = 64;

    void validate() const {
        std::set<int> distinct(depths.begin(), depths.end());
        if (distinct.size() < 2) throw ConfigError("cb.depths", "need at least two distinct depths");
        for (int m : depths)
            if (m < 0) throw ConfigError("cb.depths", "depths must be non-negative");
        if (characters < 1) throw ConfigError("cb.characters", "must be >= 1");
        if (K_r < characters) throw ConfigError("cb.K_r", "need at least one sequence per character");
        if (K_s == 0 && backend != Backend::dm) throw ConfigError("cb.K_s", "exact mode (0) needs the dm backend");
    }

    CabConfig execution() const {
        CabConfig c;
        c.depths = depths;
        c.K_r = K_r;
        c.K_s = K_s;
        c.seed = seed;
        c.backend = backend;
        c.threads = threads;
        c.pauli_layer_noise = pauli_layer_noise;
        c.readout_twirl = readout_twirl;
        c.coherent = coherent;
        return c;
    }
};

/// Prepares the +1 eigenstate of `character` on its support (|0> elsewhere),
/// runs `units` x ord x (P, U), closes the Pauli frame and undoes the preparation.
inline CircuitSequence build_cb_sequence(const TargetGate &u, const CliffordTableau &u_tab, uint64_t order,
                                         const PauliString &character, size_t units, Rng &rng) {
    size_t n = u.n;
    const auto &tab = Clifford1QTable::get();
    LocalCliffordLayer prep(n);
    for (size_t q = 0; q < n; ++q) {
        char c = character.get(q);
        if (c != 'I') prep.per_qubit[q] = uint8_t(tab.preparing(c));
    }
    CircuitSequence seq;
    seq.n = n;
    seq.layers.emplace_back(prep);
    CliffordTableau body(n);
    for (size_t i = 0; i < units * order; ++i) {
        auto p = sample_random_pauli(n, rng);
        seq.layers.emplace_back(PauliLayer{p, false});
        seq.layers.insert(seq.layers.end(), u.layers.begin(), u.layers.end());
        body = body.then(CliffordTableau::pauli(p)).then(u_tab);
    }
    seq.layers.emplace_back(PauliLayer{pauli_of_tableau(body), true});
    seq.layers.emplace_back(prep.inverse());
    return seq;
}

/// Process fidelity of the Pauli-dressed U by cycle benchmarking: each
/// character Q (uniform over all n-qubit Paulis) gives a per-gate decay
/// lambda_Q from the parity over supp(Q); F is the mean over characters.
inline FidelityEstimate run_cb_experiment(const TargetGate &u, const DeviceModel &dev, const CbConfig &cfg) {
    cfg.validate();
    dev.validate();
    if (u.n != dev.n_qubits) throw DimensionError("target and device qubit counts differ");
    auto u_tab = u.tableau(dev);
    auto ord = gate_order(u_tab, cfg.order_cap);
    if (!ord) throw UnsupportedError("run_cb_experiment: gate order exceeds " + std::to_string(cfg.order_cap));

    size_t G = cfg.characters;
    std::vector<PauliString> chars;
    for (size_t g = 0; g < G; ++g) {
        Rng rng = make_stream(cfg.seed, {kTagCharacters, g});
        chars.push_back(sample_random_pauli(u.n, rng));
    }
    auto group_of = [&](size_t k) { return k * G / cfg.K_r; };
    auto exec = cfg.execution();
    auto data = execute_sequences(dev, exec, kTagSequences, cfg.K_r, cfg.depths, [&](size_t j, size_t k, Rng &rng) {
        auto seq = build_cb_sequence(u, u_tab, *ord, chars[group_of(k)], size_t(cfg.depths[j]), rng);
        if (!seq.closes(dev)) throw ContractViolation("CB sequence does not compose to the identity");
        return seq;
    });

    FidelityEstimate est;
    est.kind = FidelityKind::dressed;
    est.meta.mode = "cb";
    est.meta.seed = cfg.seed;
    double sum = 0, var = 0;
    size_t used = 0;
    for (size_t g = 0; g < G; ++g) {
        QualityParameter qp;
        qp.w = chars[g].support();
        if (chars[g].weight() > 0) {
            std::vector<DecayPoint> pts;
            for (size_t j = 0; j < cfg.depths.size(); ++j) {
                double acc = 0, acc2 = 0;
                size_t cnt = 0;
                for (size_t k = 0; k < cfg.K_r; ++k) {
                    if (group_of(k) != g) continue;
                    double s = survival_probability(data.tables[j][k], qp.w);
                    acc += s;
                    acc2 += s * s;
                    ++cnt;
                }
                double m = acc / double(cnt);
                double v = cnt > 1 ? std::max(0.0, (acc2 - double(cnt) * m * m) / double(cnt - 1)) : 0.0;
                // f = A lambda^{2m'} with 2m' = gates applied.
                pts.push_back({0.5 * double(cfg.depths[j]) * double(*ord), m, std::sqrt(v / double(cnt))});
            }
            auto fit = fit_quality_parameter(pts);
            qp.lambda = fit.lambda;
            qp.se = fit.se;
            qp.flagged = fit.flagged;
        }
        est.quality_params.push_back(qp);
        if (qp.flagged) {
            ++est.meta.excluded_flagged;
            continue;
        }
        sum += qp.lambda;
        var += qp.se * qp.se;
        ++used;
    }
    if (used == 0) throw FitError("run_cb_experiment: every character was flagged");
    est.value = sum / double(used);
    est.meta.se_delta = std::sqrt(var) / double(used);
    // Spread over the sampled characters, the analogue of observable sampling.
    if (used > 1) {
        double ss = 0;
        for (const auto &qp : est.quality_params)
            if (!qp.flagged) ss += (qp.lambda - est.value) * (qp.lambda - est.value);
        est.meta.se_observable_sampling = std::sqrt(ss / double(used - 1) / double(used));
    }
    est.se = std::hypot(est.meta.se_delta, est.meta.se_observable_sampling);
    return est;
}

}  // namespace cabench

#endif
