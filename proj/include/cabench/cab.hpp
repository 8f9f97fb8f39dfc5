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


#ifndef CABENCH_CAB_HPP
#define CABENCH_CAB_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cabench/circuit.hpp"
#include "cabench/density_matrix.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/parallel.hpp"
#include "cabench/random.hpp"
#include "cabench/shots.hpp"
#include "cabench/stabilizer.hpp"
#include "cabench/tableau.hpp"

namespace cabench {

enum class Backend { dm, stab };
enum class ObservableMode { traverse, sample };
enum class FidelityKind { dressed, twirl, pure };

inline const char *to_string(Backend b) { return b == Backend::dm ? "dm" : "stab"; }
inline const char *to_string(ObservableMode m) { return m == ObservableMode::traverse ? "traverse" : "sample"; }
inline const char *to_string(FidelityKind k) {
    return k == FidelityKind::dressed ? "dressed" : (k == FidelityKind::twirl ? "twirl" : "pure");
}

/// Largest register for which every Z observable is traversed.
inline constexpr size_t kTraverseLimit = 12;

struct CabConfig {
    std::vector<int> depths{0, 2};
    size_t K_r = 50;
    uint64_t K_s = 20000;  // 0: exact outcome distributions (dm backend only)
    size_t K_q = 0;
    ObservableMode mode = ObservableMode::traverse;
    uint64_t seed = 1;
    std::vector<std::vector<int>> subset_list;
    Backend backend = Backend::stab;
    unsigned threads = 1;
    bool run_twirl = true;
    /// Depolarize after every Pauli layer. When false the Pauli layers are
    /// treated as compiled into neighbouring gates and contribute no noise.
    bool pauli_layer_noise = true;
    /// dm backend: keep coupling/control errors coherent.
    bool coherent = true;
    /// Per-shot random X flips before readout, undone in post-processing;
    /// symmetrizes asymmetric readout error.
    bool readout_twirl = true;

    void validate() const {
        std::set<int> distinct(depths.begin(), depths.end());
        if (distinct.size() < 2) throw ConfigError("cab.depths", "need at least two distinct depths");
        for (int m : depths)
            if (m < 0) throw ConfigError("cab.depths", "depths must be non-negative");
        if (K_r < 1) throw ConfigError("cab.K_r", "must be >= 1");
        if (K_s == 0 && backend != Backend::dm) throw ConfigError("cab.K_s", "exact mode (0) needs the dm backend");
        if (mode == ObservableMode::sample && K_q < 1) throw ConfigError("cab.K_q", "must be >= 1 in sample mode");
    }
    bool operator==(const CabConfig &) const = default;
};

struct QualityParameter {
    BitVector w;
    double lambda = 1.0;
    double se = 0.0;
    bool flagged = false;  // non-positive decay ratio; excluded from means
};

struct EstimateMeta {
    std::string mode;
    uint64_t seed = 0;
    size_t excluded_flagged = 0;
    double se_jackknife = 0.0;
    double se_delta = 0.0;
    double se_observable_sampling = 0.0;
    std::string flag_policy = "exclude";
};

struct FidelityEstimate {
    double value = 1.0;
    double se = 0.0;
    std::vector<QualityParameter> quality_params;
    FidelityKind kind = FidelityKind::dressed;
    EstimateMeta meta;
};

// ---------------------------------------------------------------------------
// Sequences

/// C, then m x (P, U, P, U^-1), then U_inv, then C^-1.
inline CircuitSequence assemble_cab_sequence(const TargetGate &u, const CliffordTableau &u_tab,
                                             const LocalCliffordLayer &c, const std::vector<PauliString> &paulis,
                                             size_t m) {
    size_t n = u.n;
    auto closing = compile_inverse_pauli(u_tab, paulis, m);
    auto inv = u.inverse_layers();
    CircuitSequence seq;
    seq.n = n;
    seq.layers.emplace_back(c);
    for (size_t i = 0; i < m; ++i) {
        seq.layers.emplace_back(PauliLayer{paulis[2 * i], false});
        seq.layers.insert(seq.layers.end(), u.layers.begin(), u.layers.end());
        seq.layers.emplace_back(PauliLayer{paulis[2 * i + 1], false});
        seq.layers.insert(seq.layers.end(), inv.begin(), inv.end());
    }
    closing.phase_exp = 0;  // global phase is irrelevant for execution
    seq.layers.emplace_back(PauliLayer{closing, true});
    seq.layers.emplace_back(c.inverse());
    return seq;
}

inline CircuitSequence build_cab_sequence(const TargetGate &u, const CliffordTableau &u_tab, size_t m, Rng &rng) {
    if (!u_tab.is_valid()) throw UnsupportedError("build_cab_sequence: target is not Clifford");
    size_t n = u.n;
    auto c = sample_local_clifford(n, rng);
    std::vector<PauliString> ps;
    for (size_t k = 0; k < 2 * m; ++k) ps.push_back(sample_random_pauli(n, rng));
    return assemble_cab_sequence(u, u_tab, c, ps, m);
}

inline CircuitSequence build_cab_sequence(const TargetGate &u, const DeviceModel &dev, size_t m, Rng &rng) {
    return build_cab_sequence(u, u.tableau(dev), m, rng);
}

// ---------------------------------------------------------------------------
// Execution

/// Outcome tables of one benchmark: tables[j][k] is sequence k at depth j.
struct RunData {
    size_t n = 0;
    std::vector<int> depths;
    std::vector<std::vector<OutcomeTable>> tables;
    std::vector<std::vector<CircuitSequence>> sequences;  // kept only on request
};

/// Executes a batch of sequences. Sequence (j, k) is generated by
/// `make(j, k, rng)` and its shots drawn from the same stream, so results are
/// independent of the thread schedule.
template <typename Make>
RunData execute_sequences(const DeviceModel &dev, const CabConfig &cfg, uint64_t tag, size_t per_depth,
                          const std::vector<int> &depths, Make make, bool keep_sequences = false) {
    RunData data;
    data.n = dev.n_qubits;
    data.depths = depths;
    size_t J = depths.size();
    data.tables.assign(J, std::vector<OutcomeTable>(per_depth));
    if (keep_sequences) data.sequences.assign(J, std::vector<CircuitSequence>(per_depth));

    std::optional<CompiledNoise> noise;
    if (cfg.backend == Backend::stab) noise.emplace(dev, CompiledNoise::Options{cfg.pauli_layer_noise, cfg.readout_twirl});
    DmOptions dm_opt;
    dm_opt.coherent = cfg.coherent;
    dm_opt.pauli_layer_noise = cfg.pauli_layer_noise;
    dm_opt.readout_twirl = cfg.readout_twirl;

    // Generate all sequences first (cheap) so the noise tables can be prepared
    // before any concurrent execution.
    std::vector<CircuitSequence> seqs(J * per_depth);
    std::vector<Rng> streams;
    streams.reserve(J * per_depth);
    for (size_t j = 0; j < J; ++j)
        for (size_t k = 0; k < per_depth; ++k) {
            streams.push_back(make_stream(cfg.seed, {tag, j, k}));
            seqs[j * per_depth + k] = make(j, k, streams.back());
            if (noise) noise->prepare(seqs[j * per_depth + k]);
        }
    parallel_for(J * per_depth, cfg.threads, [&](size_t idx) {
        size_t j = idx / per_depth, k = idx % per_depth;
        const auto &seq = seqs[idx];
        Rng &rng = streams[idx];
        OutcomeTable t;
        if (cfg.backend == Backend::stab) {
            t = OutcomeTable::from_counts(stab_run(seq, *noise, cfg.K_s, rng));
        } else {
            auto probs = dm_run(seq, dev, dm_opt);
            t = cfg.K_s == 0 ? OutcomeTable::from_probabilities(probs, dev.n_qubits)
                             : OutcomeTable::from_counts(sample_counts(probs, dev.n_qubits, cfg.K_s, rng));
        }
        // Outcomes relative to the ideal one, so survival means "no flip".
        t.relabel(seq.ideal_outcome());
        data.tables[j][k] = std::move(t);
    });
    if (keep_sequences)
        for (size_t idx = 0; idx < seqs.size(); ++idx) data.sequences[idx / per_depth][idx % per_depth] = seqs[idx];
    return data;
}

/// Runs the CAB sequences of target U at every configured depth.
inline RunData run_cab_sequences(const TargetGate &u, const DeviceModel &dev, const CabConfig &cfg, uint64_t tag,
                                 bool keep_sequences = false) {
    cfg.validate();
    if (u.n != dev.n_qubits) throw DimensionError("target and device qubit counts differ");
    for (const auto &l : u.layers)
        if (auto *g = std::get_if<GateLayer>(&l)) dev.check_parallel_layer(g->gates);
    auto tab = u.tableau(dev);
    return execute_sequences(
        dev, cfg, tag, cfg.K_r, cfg.depths,
        [&](size_t j, size_t, Rng &rng) {
            auto seq = build_cab_sequence(u, tab, size_t(cfg.depths[j]), rng);
            if (!seq.closes(dev)) throw ContractViolation("CAB sequence does not compose to the identity");
            return seq;
        },
        keep_sequences);
}

// ---------------------------------------------------------------------------
// Observables and fitting

/// Each bit set independently with probability 3/4; duplicates kept.
inline std::vector<BitVector> sample_observables(size_t n, size_t K_q, Rng &rng) {
    if (K_q < 1) throw DomainError("sample_observables: K_q must be >= 1");
    std::vector<BitVector> r;
    r.reserve(K_q);
    for (size_t i = 0; i < K_q; ++i) {
        BitVector w(n);
        for (size_t q = 0; q < n; ++q) w.set(q, (rng() & 3) != 0);
        r.push_back(std::move(w));
    }
    return r;
}

struct DecayPoint {
    double m = 0;
    double f = 0;
    double se = 0;
};

/// Fits f(m) = A lambda^{2m}. Two depths are solved exactly; more depths use
/// weighted least squares on log f. A non-positive value or ratio flags the
/// result.
inline QualityParameter fit_quality_parameter(const std::vector<DecayPoint> &pts) {
    std::set<double> ms;
    for (const auto &p : pts) {
        if (!std::isfinite(p.f)) throw FitError("fit_quality_parameter: non-finite survival");
        ms.insert(p.m);
    }
    if (ms.size() < 2 || ms.size() != pts.size()) throw FitError("fit_quality_parameter: need >= 2 distinct depths");
    QualityParameter r;
    if (pts.size() == 2) {
        const auto &a = pts[0].m < pts[1].m ? pts[0] : pts[1];
        const auto &b = pts[0].m < pts[1].m ? pts[1] : pts[0];
        if (a.f == 0.0) throw FitError("fit_quality_parameter: zero survival at the shallow depth");
        double ratio = b.f / a.f;
        double span = 2.0 * (b.m - a.m);
        if (ratio <= 0.0) {
            r.flagged = true;
            r.lambda = std::pow(std::abs(ratio), 1.0 / span);
            r.se = std::numeric_limits<double>::infinity();
            return r;
        }
        r.lambda = std::pow(ratio, 1.0 / span);
        double rel = 0;
        if (a.se > 0) rel += (a.se / a.f) * (a.se / a.f);
        if (b.se > 0 && b.f != 0) rel += (b.se / b.f) * (b.se / b.f);
        r.se = r.lambda * std::sqrt(rel) / span;
        return r;
    }
    for (const auto &p : pts)
        if (p.f <= 0.0) {
            r.flagged = true;
            r.se = std::numeric_limits<double>::infinity();
        }
    if (r.flagged) {
        // Report the two-point value between the extreme depths.
        auto lo = *std::min_element(pts.begin(), pts.end(), [](auto &x, auto &y) { return x.m < y.m; });
        auto hi = *std::max_element(pts.begin(), pts.end(), [](auto &x, auto &y) { return x.m < y.m; });
        r.lambda = lo.f != 0.0 ? std::pow(std::abs(hi.f / lo.f), 1.0 / (2.0 * (hi.m - lo.m))) : 0.0;
        return r;
    }
    bool have_se = std::all_of(pts.begin(), pts.end(), [](auto &p) { return p.se > 0; });
    double sw = 0, sx = 0, sy = 0;
    std::vector<double> w(pts.size()), x(pts.size()), y(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        x[i] = 2.0 * pts[i].m;
        y[i] = std::log(pts[i].f);
        double rel = pts[i].se / pts[i].f;
        w[i] = have_se ? 1.0 / (rel * rel) : 1.0;
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    double xm = sx / sw, ym = sy / sw, sxx = 0, sxy = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        sxx += w[i] * (x[i] - xm) * (x[i] - xm);
        sxy += w[i] * (x[i] - xm) * (y[i] - ym);
    }
    double slope = sxy / sxx;
    r.lambda = std::exp(slope);
    double var_slope;
    if (have_se) {
        var_slope = 1.0 / sxx;
    } else {
        double rss = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double res = y[i] - (ym + slope * (x[i] - xm));
            rss += res * res;
        }
        var_slope = pts.size() > 2 ? rss / double(pts.size() - 2) / sxx : 0.0;
    }
    r.se = r.lambda * std::sqrt(var_slope);
    return r;
}

/// ceil(2 eps^-2 ln(2/delta)) observables bound the sampling error by eps
/// with confidence 1 - delta.
inline size_t kq_for_accuracy(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta < 1.0))
        throw DomainError("kq_for_accuracy: need 0 < epsilon <= 1 and 0 < delta < 1");
    double v = 2.0 / (epsilon * epsilon) * std::log(2.0 / delta);
    return size_t(std::ceil(v - 1e-9));
}

// ---------------------------------------------------------------------------
// Aggregation

namespace detail {

/// Per-observable survival matrix: s[j][k][i] for depth j, sequence k, observable i.
using SurvivalTensor = std::vector<std::vector<std::vector<double>>>;

struct Aggregate {
    std::vector<QualityParameter> params;
    double value = 1.0;
    size_t flagged = 0;
};

/// Fits every observable from per-depth means and combines them with
/// `weights` (renormalized over unflagged entries). Observables with a zero
/// label are fixed at lambda = 1.
inline Aggregate aggregate(const std::vector<BitVector> &obs, const std::vector<double> &weights,
                           const std::vector<int> &depths, const std::vector<std::vector<double>> &mean,
                           const std::vector<std::vector<double>> &se) {
    Aggregate a;
    a.params.resize(obs.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < obs.size(); ++i) {
        QualityParameter &qp = a.params[i];
        qp.w = obs[i];
        if (obs[i].any()) {
            std::vector<DecayPoint> pts;
            for (size_t j = 0; j < depths.size(); ++j) pts.push_back({double(depths[j]), mean[j][i], se[j][i]});
            auto fit = fit_quality_parameter(pts);
            qp.lambda = fit.lambda;
            qp.se = fit.se;
            qp.flagged = fit.flagged;
        }
        if (qp.flagged) {
            ++a.flagged;
            continue;
        }
        num += weights[i] * qp.lambda;
        den += weights[i];
    }
    a.value = den > 0 ? num / den : std::numeric_limits<double>::quiet_NaN();
    return a;
}

inline FidelityEstimate estimate_from_survivals(const SurvivalTensor &s, const std::vector<BitVector> &obs,
                                                const std::vector<double> &weights, const std::vector<int> &depths,
                                                ObservableMode mode, FidelityKind kind, uint64_t seed) {
    size_t J = s.size(), K = s[0].size(), Q = obs.size();
    std::vector<std::vector<double>> mean(J, std::vector<double>(Q, 0.0)), se(J, std::vector<double>(Q, 0.0));
    for (size_t j = 0; j < J; ++j)
        for (size_t i = 0; i < Q; ++i) {
            double acc = 0, acc2 = 0;
            for (size_t k = 0; k < K; ++k) {
                acc += s[j][k][i];
                acc2 += s[j][k][i] * s[j][k][i];
            }
            double m = acc / double(K);
            mean[j][i] = m;
            double var = K > 1 ? std::max(0.0, (acc2 - double(K) * m * m) / double(K - 1)) : 0.0;
            se[j][i] = std::sqrt(var / double(K));
        }
    auto full = aggregate(obs, weights, depths, mean, se);

    FidelityEstimate est;
    est.kind = kind;
    est.value = full.value;
    est.quality_params = full.params;
    est.meta.mode = to_string(mode);
    est.meta.seed = seed;
    est.meta.excluded_flagged = full.flagged;

    // Jackknife over sequence index k (the k-th sequence of every depth).
    if (K > 1) {
        std::vector<double> reps;
        reps.reserve(K);
        std::vector<std::vector<double>> loo(J, std::vector<double>(Q));
        for (size_t k = 0; k < K; ++k) {
            for (size_t j = 0; j < J; ++j)
                for (size_t i = 0; i < Q; ++i) loo[j][i] = (mean[j][i] * double(K) - s[j][k][i]) / double(K - 1);
            Aggregate a;
            try {
                a = aggregate(obs, weights, depths, loo, se);
            } catch (const FitError &) {
                continue;
            }
            if (std::isfinite(a.value)) reps.push_back(a.value);
        }
        double rm = std::accumulate(reps.begin(), reps.end(), 0.0) / double(reps.size());
        double ss = 0;
        for (double v : reps) ss += (v - rm) * (v - rm);
        est.meta.se_jackknife = std::sqrt(double(reps.size() - 1) / double(reps.size()) * ss);
    }
    // Delta-method path: independent per-observable errors.
    double wsum = 0, var = 0;
    for (size_t i = 0; i < Q; ++i)
        if (!full.params[i].flagged) wsum += weights[i];
    for (size_t i = 0; i < Q; ++i)
        if (!full.params[i].flagged) var += std::pow(weights[i] / wsum * full.params[i].se, 2);
    est.meta.se_delta = std::sqrt(var);
    if (mode == ObservableMode::sample) {
        // Spread of the sampled lambdas adds the observable-sampling variance.
        std::vector<double> ls;
        for (const auto &p : full.params)
            if (!p.flagged) ls.push_back(p.lambda);
        if (ls.size() > 1) {
            double m = std::accumulate(ls.begin(), ls.end(), 0.0) / double(ls.size());
            double v = 0;
            for (double l : ls) v += (l - m) * (l - m);
            v /= double(ls.size() - 1);
            est.meta.se_observable_sampling = std::sqrt(v / double(ls.size()));
        }
    }
    est.se = std::hypot(est.meta.se_jackknife, est.meta.se_observable_sampling);
    return est;
}

inline std::vector<int> all_qubits_of(size_t n) {
    std::vector<int> r(n);
    std::iota(r.begin(), r.end(), 0);
    return r;
}

/// Traverse estimate over all Z observables supported on `qubits`.
inline FidelityEstimate traverse_estimate(const RunData &data, const std::vector<int> &qubits, FidelityKind kind,
                                          uint64_t seed) {
    if (qubits.size() > kTraverseLimit)
        throw ResourceError("traverse over " + std::to_string(qubits.size()) + " qubits exceeds the limit " +
                            std::to_string(kTraverseLimit));
    size_t J = data.tables.size(), K = data.tables[0].size(), Q = size_t{1} << qubits.size();
    SurvivalTensor s(J, std::vector<std::vector<double>>(K));
    for (size_t j = 0; j < J; ++j)
        for (size_t k = 0; k < K; ++k) s[j][k] = subset_survivals(data.tables[j][k], qubits);
    std::vector<BitVector> obs(Q, BitVector(data.n));
    std::vector<double> weights(Q);
    for (size_t y = 0; y < Q; ++y) {
        for (size_t t = 0; t < qubits.size(); ++t)
            if ((y >> t) & 1) obs[y].set(qubits[t], true);
        weights[y] = std::pow(3.0, double(std::popcount(y))) / std::pow(4.0, double(qubits.size()));
    }
    return estimate_from_survivals(s, obs, weights, data.depths, ObservableMode::traverse, kind, seed);
}

inline FidelityEstimate sample_estimate(const RunData &data, const std::vector<BitVector> &obs, FidelityKind kind,
                                        uint64_t seed) {
    size_t J = data.tables.size(), K = data.tables[0].size();
    SurvivalTensor s(J, std::vector<std::vector<double>>(K, std::vector<double>(obs.size())));
    for (size_t j = 0; j < J; ++j)
        for (size_t k = 0; k < K; ++k)
            for (size_t i = 0; i < obs.size(); ++i) s[j][k][i] = survival_probability(data.tables[j][k], obs[i]);
    std::vector<double> weights(obs.size(), 1.0);
    return estimate_from_survivals(s, obs, weights, data.depths, ObservableMode::sample, kind, seed);
}

}  // namespace detail

/// Global fidelity from run data: mean of lambda over sampled observables, or
/// the 3^{|w|}-weighted average over all observables in traverse mode.
inline FidelityEstimate estimate_fidelity(const RunData &data, const CabConfig &cfg,
                                          FidelityKind kind = FidelityKind::dressed) {
    if (data.tables.empty() || data.tables[0].empty()) throw DomainError("estimate_fidelity: empty run data");
    if (cfg.mode == ObservableMode::traverse)
        return detail::traverse_estimate(data, detail::all_qubits_of(data.n), kind, cfg.seed);
    Rng rng = make_stream(cfg.seed, {kTagObservables});
    auto obs = sample_observables(data.n, cfg.K_q, rng);
    return detail::sample_estimate(data, obs, kind, cfg.seed);
}

/// Fidelity of the restriction to the qubits of gate subset S, from the same
/// shots: traverse over the 2^{|qubits|} Z observables supported there.
inline FidelityEstimate subset_fidelity(const RunData &data, const std::vector<int> &qubits,
                                        FidelityKind kind = FidelityKind::dressed, uint64_t seed = 0) {
    if (qubits.size() > 8) throw ResourceError("subset_fidelity: more than 8 qubits in the subset");
    return detail::traverse_estimate(data, qubits, kind, seed);
}

/// Pure fidelity from dressed and twirl-only fidelities on n qubits.
inline FidelityEstimate interleaved_pure_fidelity(const FidelityEstimate &dress, const FidelityEstimate &twirl,
                                                  size_t n) {
    double inv = std::pow(4.0, -double(n));
    double dt = twirl.value - inv, dd = dress.value - inv;
    if (dt == 0.0) throw DomainError("interleaved_pure_fidelity: twirl fidelity equals 4^-n");
    FidelityEstimate r;
    r.kind = FidelityKind::pure;
    r.value = (dd / dt) * (1.0 - inv) + inv;
    double rel = 0;
    if (dress.se > 0) rel += (dress.se / dd) * (dress.se / dd);
    if (twirl.se > 0) rel += (twirl.se / dt) * (twirl.se / dt);
    r.se = (r.value - inv) * std::sqrt(rel);
    r.se = std::abs(r.se);
    r.meta = dress.meta;
    r.meta.se_jackknife = r.meta.se_delta = r.meta.se_observable_sampling = 0;
    return r;
}

// ---------------------------------------------------------------------------
// Full experiment

struct SubsetResult {
    std::vector<int> gates;
    std::vector<int> qubits;
    FidelityEstimate dressed, twirl, pure;
    bool has_twirl = false;
};

struct CabReport {
    std::string target;
    FidelityEstimate dressed, twirl, pure;
    bool has_twirl = false;
    std::vector<SubsetResult> subsets;
    RunData dressed_data, twirl_data;
    CabConfig config;

    const SubsetResult *subset(std::vector<int> gates) const {
        std::sort(gates.begin(), gates.end());
        for (const auto &s : subsets) {
            auto g = s.gates;
            std::sort(g.begin(), g.end());
            if (g == gates) return &s;
        }
        return nullptr;
    }
};

/// Dressed run on U and (optionally) the twirl-only run with the identity
/// target; global and per-subset dressed, twirl and pure fidelities.
inline CabReport run_cab_experiment(const TargetGate &u, const DeviceModel &dev, const CabConfig &cfg) {
    cfg.validate();
    dev.validate();
    CabReport rep;
    rep.target = u.name;
    rep.config = cfg;
    rep.dressed_data = run_cab_sequences(u, dev, cfg, kTagSequences);
    rep.dressed = estimate_fidelity(rep.dressed_data, cfg, FidelityKind::dressed);
    if (cfg.run_twirl) {
        rep.has_twirl = true;
        rep.twirl_data = run_cab_sequences(TargetGate::identity(u.n), dev, cfg, kTagTwirlRun);
        rep.twirl = estimate_fidelity(rep.twirl_data, cfg, FidelityKind::twirl);
        rep.pure = interleaved_pure_fidelity(rep.dressed, rep.twirl, u.n);
    }
    auto subsets = cfg.subset_list;
    if (subsets.empty())
        for (int g : u.gates_used()) subsets.push_back({g});
    for (const auto &gs : subsets) {
        SubsetResult sr;
        sr.gates = gs;
        sr.qubits = gate_qubits(dev, gs);
        std::sort(sr.qubits.begin(), sr.qubits.end());
        sr.dressed = subset_fidelity(rep.dressed_data, sr.qubits, FidelityKind::dressed, cfg.seed);
        if (cfg.run_twirl) {
            sr.has_twirl = true;
            sr.twirl = subset_fidelity(rep.twirl_data, sr.qubits, FidelityKind::twirl, cfg.seed);
            sr.pure = interleaved_pure_fidelity(sr.dressed, sr.twirl, sr.qubits.size());
        }
        rep.subsets.push_back(std::move(sr));
    }
    return rep;
}

}  // namespace cabench

#endif
