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


#ifndef CABENCH_CALIBRATION_HPP
#define CABENCH_CALIBRATION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cabench/cab.hpp"
#include "cabench/circuit.hpp"
#include "cabench/clifford2q.hpp"
#include "cabench/density_matrix.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/nelder_mead.hpp"
#include "cabench/random.hpp"
#include "cabench/shots.hpp"
#include "cabench/stabilizer.hpp"

namespace cabench {

/// Wraps an angle to (-pi, pi].
inline double wrap_phase(double a) {
    const double pi = std::numbers::pi;
    double r = std::remainder(a, 2 * pi);
    return r <= -pi ? r + 2 * pi : r;
}

/// n points k * 2 pi / n, k = 0..n-1.
inline std::vector<double> uniform_phase_grid(size_t n) {
    std::vector<double> g(n);
    for (size_t k = 0; k < n; ++k) g[k] = 2 * std::numbers::pi * double(k) / double(n);
    return g;
}

/// Two-qubit device holding only gate g (qubit 0 = pair.first), with that
/// gate's noise, readout and single-qubit noise.
inline DeviceModel gate_subdevice(const DeviceModel &dev, int g) {
    dev.validate();
    if (g < 0 || size_t(g) >= dev.gates.size()) throw DomainError("gate_subdevice: no gate " + std::to_string(g));
    const auto &spec = dev.gates[g];
    auto [a, b] = spec.pair;
    DeviceModel d;
    d.name = dev.name + "/gate" + std::to_string(g);
    d.n_qubits = 2;
    d.layout = {{0, 1}};
    GateSpec s = spec;
    s.pair = {0, 1};
    s.coupled_qubit = spec.coupled_qubit == a ? 0 : 1;
    s.control.coupler_comp = 0.0;
    d.gates = {s};
    d.readout = {dev.readout[a], dev.readout[b]};
    d.single_qubit_depol = {dev.single_qubit_depol[a], dev.single_qubit_depol[b]};
    d.single_qubit_noise = dev.single_qubit_noise;
    return d;
}

struct CalibrationOptions {
    uint64_t shots = 0;  // 0: exact probabilities
    uint64_t seed = 1;
    double max_residual = 0.02;  // RMS of the sinusoid fit
    double min_contrast = 0.05;  // peak-to-peak response below this is no signal
};

namespace detail {

inline Mat2 rx(double beta) {
    double c = std::cos(beta / 2), s = std::sin(beta / 2);
    return {c, cplx(0, -s), cplx(0, -s), c};
}
inline Mat2 rz_virtual(double phi) { return {1, 0, 0, std::polar(1.0, phi)}; }

/// P(qubit reads 1) for a two-qubit sub-device circuit.
inline double prob_one(const DeviceModel &sub, const std::vector<Layer> &layers, int qubit, Rng &rng,
                       uint64_t shots) {
    CircuitSequence seq{2, layers, {}};
    auto probs = dm_run(seq, sub);
    size_t bit = size_t{1} << qubit;
    double p = 0;
    for (size_t x = 0; x < probs.size(); ++x)
        if (x & bit) p += probs[x];
    p = std::clamp(p, 0.0, 1.0);
    if (shots == 0) return p;
    std::binomial_distribution<uint64_t> d(shots, p);
    return double(d(rng)) / double(shots);
}

struct SinusoidFit {
    double offset = 0, amplitude = 0, phase = 0, rms = 0;
};

/// Least squares y ~ a + b cos(x + phase), b >= 0.
inline SinusoidFit fit_sinusoid(const std::vector<double> &x, const std::vector<double> &y) {
    // Normal equations for y = a + u cos x + v sin x.
    double m[3][4] = {};
    for (size_t i = 0; i < x.size(); ++i) {
        double f[3] = {1.0, std::cos(x[i]), std::sin(x[i])};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m[r][c] += f[r] * f[c];
            m[r][3] += f[r] * y[i];
        }
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-12) throw PoorFitError("sinusoid fit: grid does not determine the phase");
        std::swap(m[c], m[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            double k = m[r][c] / m[c][c];
            for (int j = c; j < 4; ++j) m[r][j] -= k * m[c][j];
        }
    }
    double a = m[0][3] / m[0][0], u = m[1][3] / m[1][1], v = m[2][3] / m[2][2];
    SinusoidFit f;
    f.offset = a;
    f.amplitude = std::hypot(u, v);
    f.phase = std::atan2(-v, u);  // u cos x + v sin x = b cos(x + phase)
    double ss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (a + f.amplitude * std::cos(x[i] + f.phase));
        ss += r * r;
    }
    f.rms = std::sqrt(ss / double(x.size()));
    return f;
}

inline void check_grid(const std::vector<double> &grid, size_t min_points, const char *what) {
    if (grid.size() < min_points)
        throw DomainError(std::string(what) + ": need at least " + std::to_string(min_points) + " grid points");
    double lo = *std::min_element(grid.begin(), grid.end()), hi = *std::max_element(grid.begin(), grid.end());
    if (hi - lo < std::numbers::pi) throw DomainError(std::string(what) + ": grid must cover [0, 2 pi)");
}

}  // namespace detail

struct ConditionalPhase {
    double phi_I = 0, phi_x = 0;
    double phi = 0;  // phi_x - phi_I wrapped to (-pi, pi]
    double residual = 0;
};

/// Ramsey-type scan on pair.first: X_{pi/2}, CZ with pair.second in |0>
/// (U = I) or |1> (U = X), virtual Z_beta, X_{pi/2}; P(1) = (1 + cos(beta + phi_U)) / 2
/// up to contrast. The ideal CZ gives phi = pi.
inline ConditionalPhase measure_conditional_phase(const DeviceModel &dev, int gate, const std::vector<double> &beta_grid,
                                                  const CalibrationOptions &opt = {}) {
    detail::check_grid(beta_grid, 8, "measure_conditional_phase");
    auto sub = gate_subdevice(dev, gate);
    Rng rng(opt.seed);
    const double half = std::numbers::pi / 2;
    auto scan = [&](bool flip) {
        std::vector<double> y;
        for (double beta : beta_grid) {
            std::vector<Layer> layers{RotationLayer{0, detail::rx(half)}};
            if (flip) layers.push_back(RotationLayer{1, detail::rx(std::numbers::pi)});
            layers.push_back(GateLayer{{0}});
            layers.push_back(RotationLayer{0, detail::rz_virtual(beta)});
            layers.push_back(RotationLayer{0, detail::rx(half)});
            y.push_back(detail::prob_one(sub, layers, 0, rng, opt.shots));
        }
        auto f = detail::fit_sinusoid(beta_grid, y);
        if (f.amplitude < opt.min_contrast / 2) throw NoSignalError("measure_conditional_phase: no fringe contrast");
        if (f.rms > opt.max_residual)
            throw PoorFitError("measure_conditional_phase: fit residual " + std::to_string(f.rms) + " above " +
                               std::to_string(opt.max_residual));
        return f;
    };
    auto fi = scan(false), fx = scan(true);
    ConditionalPhase r;
    r.phi_I = wrap_phase(fi.phase);
    r.phi_x = wrap_phase(fx.phase);
    r.phi = wrap_phase(r.phi_x - r.phi_I);
    r.residual = std::max(fi.rms, fx.rms);
    return r;
}

/// Scans a virtual Z_phi on `qubit` (a member of the gate's pair) between
/// X_{pi/2} pulses around the CZ, partner in |0>, and returns the phi with
/// the largest P(1). Adding it to the qubit's dynamic phase cancels it.
inline double calibrate_dynamic_phase(const DeviceModel &dev, int gate, int qubit,
                                      const std::vector<double> &phase_grid, const CalibrationOptions &opt = {}) {
    detail::check_grid(phase_grid, 4, "calibrate_dynamic_phase");
    auto sub = gate_subdevice(dev, gate);
    auto [a, b] = dev.gates[gate].pair;
    if (qubit != a && qubit != b) throw DomainError("calibrate_dynamic_phase: qubit is not on the gate");
    int q = qubit == a ? 0 : 1;
    Rng rng(opt.seed);
    const double half = std::numbers::pi / 2;
    std::vector<double> y;
    for (double phi : phase_grid) {
        std::vector<Layer> layers{RotationLayer{q, detail::rx(half)}, GateLayer{{0}},
                                  RotationLayer{q, detail::rz_virtual(phi)}, RotationLayer{q, detail::rx(half)}};
        y.push_back(detail::prob_one(sub, layers, q, rng, opt.shots));
    }
    auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*hi - *lo < opt.min_contrast) throw NoSignalError("calibrate_dynamic_phase: flat response");
    return wrap_phase(phase_grid[size_t(hi - y.begin())]);
}

struct FastCalibration {
    int gate = 0;
    double cond_phase_correction = 0;
    double dyn_correction_i = 0, dyn_correction_j = 0;
};

/// Conditional-phase and dynamic-phase calibration of one gate, applied to
/// its control parameters.
inline FastCalibration fast_calibrate(DeviceModel &dev, int gate, const std::vector<double> &grid,
                                      const CalibrationOptions &opt = {}) {
    FastCalibration r;
    r.gate = gate;
    auto cp = measure_conditional_phase(dev, gate, grid, opt);
    r.cond_phase_correction = -wrap_phase(cp.phi - std::numbers::pi);
    auto &c = dev.gates[gate].control;
    c.cond_phase_offset = wrap_phase(c.cond_phase_offset + r.cond_phase_correction);
    r.dyn_correction_i = calibrate_dynamic_phase(dev, gate, dev.gates[gate].pair.first, grid, opt);
    c.dyn_phase_i = wrap_phase(c.dyn_phase_i + r.dyn_correction_i);
    r.dyn_correction_j = calibrate_dynamic_phase(dev, gate, dev.gates[gate].pair.second, grid, opt);
    c.dyn_phase_j = wrap_phase(c.dyn_phase_j + r.dyn_correction_j);
    return r;
}

// ---------------------------------------------------------------------------
// Back probability

/// Random two-qubit Clifford sequence of `length` elements plus the
/// recovery element, run on every listed gate at once (independent draws per
/// gate). Every element is compiled to CZs and local Cliffords; gates needing
/// fewer CZs than the slowest idle through the extra CZ slots.
inline CircuitSequence back_probability_sequence(const DeviceModel &dev, const std::vector<int> &gates, size_t length,
                                                 Rng &rng) {
    if (length < 1) throw DomainError("back_probability: sequence length must be >= 1");
    dev.check_parallel_layer(gates);
    const auto &grp = Clifford2QGroup::get();
    std::vector<std::vector<size_t>> elems(gates.size());
    for (size_t k = 0; k < gates.size(); ++k) {
        CliffordTableau acc(2);
        for (size_t i = 0; i < length; ++i) {
            size_t e = grp.sample(rng);
            elems[k].push_back(e);
            acc = acc.then(grp.tableau(e));
        }
        elems[k].push_back(grp.index_of(acc.inverse()));
    }
    CircuitSequence seq;
    seq.n = dev.n_qubits;
    for (size_t i = 0; i <= length; ++i) {
        size_t slots = 0;
        for (size_t k = 0; k < gates.size(); ++k) slots = std::max(slots, grp.word(elems[k][i]).n_cz());
        for (size_t s = 0; s <= slots; ++s) {
            if (s > 0) {
                GateLayer gl;
                for (size_t k = 0; k < gates.size(); ++k)
                    if (grp.word(elems[k][i]).n_cz() >= s) gl.gates.push_back(gates[k]);
                seq.layers.push_back(gl);
            }
            LocalCliffordLayer loc(dev.n_qubits);
            for (size_t k = 0; k < gates.size(); ++k) {
                const auto &w = grp.word(elems[k][i]);
                if (s > w.n_cz()) continue;
                auto [a, b] = dev.gates[gates[k]].pair;
                loc.per_qubit[a] = w.locals[s][0];
                loc.per_qubit[b] = w.locals[s][1];
            }
            seq.layers.push_back(loc);
        }
    }
    return seq;
}

struct BackProbabilityOptions {
    size_t sequences = 1;
    /// dm (coherent errors) when the device fits, else the stabilizer backend.
    bool allow_dm = true;
    size_t dm_qubit_limit = 10;
};

/// P(pair returns to |00>) per gate, averaged over the sequences. The same
/// rng state reproduces the same circuits, so reference and iterative
/// parameters can be compared on identical sequences.
inline std::vector<double> back_probability(const DeviceModel &dev, const std::vector<int> &gates, size_t length,
                                            uint64_t K_s, Rng &rng, const BackProbabilityOptions &opt = {}) {
    dev.validate();
    if (opt.sequences < 1) throw DomainError("back_probability: sequences must be >= 1");
    bool dm = opt.allow_dm && dev.n_qubits <= opt.dm_qubit_limit;
    if (!dm && K_s == 0) throw DomainError("back_probability: exact mode (K_s = 0) needs a device small enough for dm");
    std::vector<double> out(gates.size(), 0.0);
    // All circuits are drawn before any shots, so the circuits depend on the
    // rng state only and not on the device.
    std::vector<CircuitSequence> seqs;
    for (size_t s = 0; s < opt.sequences; ++s) seqs.push_back(back_probability_sequence(dev, gates, length, rng));
    for (const auto &seq : seqs) {
        OutcomeTable table;
        if (dm) {
            auto probs = dm_run(seq, dev);
            table = K_s == 0 ? OutcomeTable::from_probabilities(probs, dev.n_qubits)
                             : OutcomeTable::from_counts(sample_counts(probs, dev.n_qubits, K_s, rng));
        } else {
            CompiledNoise noise(dev);
            noise.prepare(seq);
            table = OutcomeTable::from_counts(stab_run(seq, noise, K_s, rng));
        }
        for (size_t k = 0; k < gates.size(); ++k) {
            auto [a, b] = dev.gates[gates[k]].pair;
            out[k] += table.marginal({a, b})[0] / double(opt.sequences);
        }
    }
    return out;
}

inline double back_probability(const DeviceModel &dev, int gate, size_t length, uint64_t K_s, Rng &rng,
                               const BackProbabilityOptions &opt = {}) {
    return back_probability(dev, std::vector<int>{gate}, length, K_s, rng, opt)[0];
}

struct ParallelCalibrationOptions {
    size_t length = 8;
    uint64_t K_s = 2000;
    size_t sequences = 4;
    size_t iterations = 60;  // objective evaluations per gate
    double initial_step = 0.1;
    uint64_t seed = 1;
    BackProbabilityOptions backend{};
};

struct ParallelCalibrationStep {
    std::vector<double> reference, iterative;  // per gate
};

struct ParallelCalibration {
    DeviceModel device;  // with the best parameters found
    std::vector<int> gates;
    std::vector<std::vector<double>> best_params;  // per gate: dyn_i, dyn_j, cond_phase_offset
    std::vector<ParallelCalibrationStep> steps;
};

/// Per-gate Nelder-Mead over (dyn_i, dyn_j, cond_phase_offset) minimizing
/// reference minus iterative back probability; all gates run in the same
/// circuits, each scored by its own pair.
inline ParallelCalibration parallel_calibrate(const DeviceModel &dev, const std::vector<int> &gates,
                                              const ParallelCalibrationOptions &opt = {}) {
    dev.validate();
    dev.check_parallel_layer(gates);
    NelderMeadOptions nmo;
    nmo.initial_step = {opt.initial_step};
    nmo.tol = 1e-4;
    std::vector<NelderMead> nms;
    for (int g : gates) {
        const auto &c = dev.gates[g].control;
        nms.emplace_back(std::vector<double>{c.dyn_phase_i, c.dyn_phase_j, c.cond_phase_offset}, nmo);
    }
    ParallelCalibration r;
    r.gates = gates;
    r.device = dev;
    BackProbabilityOptions bo = opt.backend;
    bo.sequences = opt.sequences;
    for (size_t it = 0; it < opt.iterations; ++it) {
        bool any = false;
        DeviceModel trial = dev;
        for (size_t k = 0; k < gates.size(); ++k) {
            if (nms[k].done()) continue;
            any = true;
            const auto &x = nms[k].ask();
            auto &c = trial.gates[gates[k]].control;
            c.dyn_phase_i = x[0];
            c.dyn_phase_j = x[1];
            c.cond_phase_offset = x[2];
        }
        if (!any) break;
        std::seed_seq ss{opt.seed, uint64_t(it)};
        Rng base(ss);
        Rng r1 = base, r2 = base;
        ParallelCalibrationStep step;
        step.reference = back_probability(dev, gates, opt.length, opt.K_s, r1, bo);
        step.iterative = back_probability(trial, gates, opt.length, opt.K_s, r2, bo);
        for (size_t k = 0; k < gates.size(); ++k)
            if (!nms[k].done()) nms[k].tell(step.reference[k] - step.iterative[k]);
        r.steps.push_back(std::move(step));
    }
    for (size_t k = 0; k < gates.size(); ++k) {
        auto x = nms[k].best_x();
        auto &c = r.device.gates[gates[k]].control;
        c.dyn_phase_i = x[0];
        c.dyn_phase_j = x[1];
        c.cond_phase_offset = x[2];
        r.best_params.push_back(x);
    }
    return r;
}

}  // namespace cabench

#endif
