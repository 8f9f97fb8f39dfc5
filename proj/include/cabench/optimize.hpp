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


#ifndef CABENCH_OPTIMIZE_HPP
#define CABENCH_OPTIMIZE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cabench/analysis.hpp"
#include "cabench/cab.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/format.hpp"
#include "cabench/nelder_mead.hpp"

namespace cabench {

enum class OptTarget { global, local };

inline const char *to_string(OptTarget t) { return t == OptTarget::global ? "global" : "local"; }

/// Control parameters a gate exposes to the optimizer.
enum class GateParam { dyn_i, dyn_j, cond_phase, coupler };

inline const char *to_string(GateParam p) {
    switch (p) {
        case GateParam::dyn_i: return "dyn_i";
        case GateParam::dyn_j: return "dyn_j";
        case GateParam::cond_phase: return "cond_phase";
        case GateParam::coupler: return "coupler";
    }
    return "?";
}

inline GateParam gate_param_from_string(const std::string &s) {
    for (auto p : {GateParam::dyn_i, GateParam::dyn_j, GateParam::cond_phase, GateParam::coupler})
        if (s == to_string(p)) return p;
    throw ConfigError("optimize.parameters", "unknown parameter '" + s + "'");
}

inline double &control_ref(ControlParams &c, GateParam p) {
    switch (p) {
        case GateParam::dyn_i: return c.dyn_phase_i;
        case GateParam::dyn_j: return c.dyn_phase_j;
        case GateParam::cond_phase: return c.cond_phase_offset;
        case GateParam::coupler: return c.coupler_comp;
    }
    throw ContractViolation("control_ref: bad parameter");
}

struct OptimizeConfig {
    OptTarget target = OptTarget::global;
    size_t iterations = 200;
    /// Per gate; four parameters per gate give 2n for n qubits.
    std::vector<GateParam> parameters{GateParam::dyn_i, GateParam::dyn_j, GateParam::cond_phase, GateParam::coupler};
    double initial_step = 0.1;  // radians
    double tol = 1e-3;
    size_t reevaluate_every = 10;
    size_t window_first = 100, window_last = 180;  // inclusive
    CabConfig cab{};

    void validate() const {
        if (iterations < 1) throw ConfigError("optimize.iterations", "must be >= 1");
        if (parameters.empty()) throw ConfigError("optimize.parameters", "need at least one parameter per gate");
        if (!(initial_step > 0)) throw ConfigError("optimize.initial_step", "must be positive");
        if (window_first > window_last) throw ConfigError("optimize.window", "first must not exceed last");
        cab.validate();
    }
};

struct OptIteration {
    size_t index = 0;
    std::vector<double> params;       // all gates, gate-major
    double reference = 0, iterative = 0;  // global dressed fidelities
    double reference_se = 0, iterative_se = 0;
    double target = 0;  // iterative - reference of the global fidelity
    std::vector<double> local_reference, local_iterative;  // per gate
    std::vector<double> corr_reference, corr_iterative;    // per correlation group
};

struct WindowStat {
    double mean = 0, sd = 0;
    size_t count = 0;
};

inline WindowStat window_stat(const std::vector<double> &v) {
    WindowStat s;
    s.count = v.size();
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / double(v.size() - 1));
    }
    return s;
}

struct OptWindow {
    size_t first = 0, last = 0;
    WindowStat reference, iterative;
    std::vector<WindowStat> local_reference, local_iterative;
    std::vector<WindowStat> corr_reference, corr_iterative;
};

struct OptTrajectory {
    OptTarget target = OptTarget::global;
    std::vector<int> gates;
    std::vector<std::string> parameter_names;  // e.g. g0.dyn_i
    std::vector<std::vector<int>> corr_groups;  // gate subsets of size >= 2
    std::vector<OptIteration> iterations;
    std::vector<double> initial_params, best_params;
    bool converged = false;
    size_t reevaluations = 0;
    OptWindow window;

    /// Window statistics over iterations [first, last] (clipped to the run).
    OptWindow compute_window(size_t first, size_t last) const {
        OptWindow w;
        w.first = first;
        w.last = last;
        std::vector<double> ref, it;
        size_t g = gates.size(), c = corr_groups.size();
        std::vector<std::vector<double>> lr(g), li(g), cr(c), ci(c);
        for (const auto &s : iterations) {
            if (s.index < first || s.index > last) continue;
            ref.push_back(s.reference);
            it.push_back(s.iterative);
            for (size_t k = 0; k < g; ++k) {
                lr[k].push_back(s.local_reference[k]);
                li[k].push_back(s.local_iterative[k]);
            }
            for (size_t k = 0; k < c; ++k) {
                cr[k].push_back(s.corr_reference[k]);
                ci[k].push_back(s.corr_iterative[k]);
            }
        }
        w.reference = window_stat(ref);
        w.iterative = window_stat(it);
        for (size_t k = 0; k < g; ++k) {
            w.local_reference.push_back(window_stat(lr[k]));
            w.local_iterative.push_back(window_stat(li[k]));
        }
        for (size_t k = 0; k < c; ++k) {
            w.corr_reference.push_back(window_stat(cr[k]));
            w.corr_iterative.push_back(window_stat(ci[k]));
        }
        return w;
    }

    std::string group_label(size_t k) const {
        std::string s;
        for (int g : corr_groups[k]) s += (s.empty() ? "" : "_") + std::to_string(g);
        return s;
    }

    /// iteration, params..., ref_F, iter_F, target, per-gate F, correlations.
    std::string to_csv() const {
        std::vector<std::string> h{"iteration"};
        for (const auto &p : parameter_names) h.push_back(p);
        for (const char *s : {"ref_F", "iter_F", "target", "ref_se", "iter_se"}) h.push_back(s);
        for (int g : gates) {
            h.push_back("ref_F_g" + std::to_string(g));
            h.push_back("iter_F_g" + std::to_string(g));
        }
        for (size_t k = 0; k < corr_groups.size(); ++k) {
            h.push_back("ref_corr_" + group_label(k));
            h.push_back("iter_corr_" + group_label(k));
        }
        CsvTable t(h);
        for (const auto &s : iterations) {
            std::vector<std::string> row{std::to_string(s.index)};
            for (double p : s.params) row.push_back(format_double(p));
            for (double v : {s.reference, s.iterative, s.target, s.reference_se, s.iterative_se})
                row.push_back(format_double(v));
            for (size_t k = 0; k < gates.size(); ++k) {
                row.push_back(format_double(s.local_reference[k]));
                row.push_back(format_double(s.local_iterative[k]));
            }
            for (size_t k = 0; k < corr_groups.size(); ++k) {
                row.push_back(format_double(s.corr_reference[k]));
                row.push_back(format_double(s.corr_iterative[k]));
            }
            t.add(row);
        }
        return t.str();
    }
};

namespace detail {

/// Gate subsets of size >= 2 whose correlation is tracked: every subset for
/// up to 4 gates, pairs beyond that.
inline std::vector<std::vector<int>> correlation_groups(const std::vector<int> &gates) {
    std::vector<std::vector<int>> r;
    size_t g = gates.size();
    if (g <= 4) {
        for (size_t mask = 1; mask < (size_t{1} << g); ++mask) {
            if (std::popcount(mask) < 2) continue;
            std::vector<int> s;
            for (size_t i = 0; i < g; ++i)
                if ((mask >> i) & 1) s.push_back(gates[i]);
            r.push_back(s);
        }
        std::stable_sort(r.begin(), r.end(), [](const auto &a, const auto &b) { return a.size() < b.size(); });
    } else {
        for (size_t a = 0; a < g; ++a)
            for (size_t b = a + 1; b < g; ++b) r.push_back({gates[a], gates[b]});
    }
    return r;
}

struct Measured {
    double global = 0, global_se = 0;
    std::vector<double> local;
    std::vector<double> corr;
};

inline Measured measure(const DeviceModel &dev, const std::vector<int> &gates,
                        const std::vector<std::vector<int>> &groups, const CabConfig &cfg) {
    auto rep = run_cab_experiment(TargetGate::parallel_cz(dev.n_qubits, gates), dev, cfg);
    Measured m;
    m.global = rep.dressed.value;
    m.global_se = rep.dressed.se;
    auto fid = [&](const std::vector<int> &s) {
        if (s.size() == gates.size()) return rep.dressed.value;
        const auto *sr = rep.subset(s);
        if (!sr) throw IncompleteReportError("optimize: missing subset fidelity");
        return sr->dressed.value;
    };
    for (int g : gates) m.local.push_back(fid({g}));
    for (const auto &grp : groups) {
        std::vector<double> parts;
        for (int g : grp) parts.push_back(fid({g}));
        double f = fid(grp);
        bool ok = f > 0 && std::all_of(parts.begin(), parts.end(), [](double x) { return x > 0; });
        m.corr.push_back(ok ? correlation(f, parts) : std::nan(""));
    }
    return m;
}

}  // namespace detail

/// Nelder-Mead over the gates' control parameters. Every iteration runs CAB
/// (dressed) twice on the same seeds: once at the frozen initial parameters
/// (reference) and once at the proposed ones (iterative). The global target
/// maximizes iterative - reference of the parallel gate's fidelity; the local
/// target runs one optimizer per gate on its own subset fidelity, all fed
/// from the same CAB runs.
inline OptTrajectory optimize_parallel_cz(const DeviceModel &dev, const std::vector<int> &gates,
                                          const OptimizeConfig &cfg) {
    cfg.validate();
    dev.validate();
    dev.check_parallel_layer(gates);
    if (gates.empty()) throw ConfigError("optimize.gates", "need at least one gate");
    const size_t G = gates.size(), P = cfg.parameters.size();

    OptTrajectory tr;
    tr.target = cfg.target;
    tr.gates = gates;
    tr.corr_groups = detail::correlation_groups(gates);
    for (int g : gates)
        for (auto p : cfg.parameters) tr.parameter_names.push_back("g" + std::to_string(g) + "." + to_string(p));

    CabConfig cab = cfg.cab;
    cab.run_twirl = false;
    cab.subset_list.clear();
    for (int g : gates) cab.subset_list.push_back({g});
    for (const auto &grp : tr.corr_groups)
        if (grp.size() < G) cab.subset_list.push_back(grp);

    auto read_params = [&](const DeviceModel &d) {
        std::vector<double> x;
        for (int g : gates) {
            auto c = d.gates[g].control;
            for (auto p : cfg.parameters) x.push_back(control_ref(c, p));
        }
        return x;
    };
    auto write_params = [&](DeviceModel &d, const std::vector<double> &x) {
        for (size_t k = 0; k < G; ++k)
            for (size_t j = 0; j < P; ++j) control_ref(d.gates[gates[k]].control, cfg.parameters[j]) = x[k * P + j];
    };
    tr.initial_params = read_params(dev);

    NelderMeadOptions nmo;
    nmo.initial_step = {cfg.initial_step};
    nmo.tol = cfg.tol;
    nmo.max_iterations = cfg.iterations * 4;
    nmo.reevaluate_every = cfg.reevaluate_every;
    std::vector<NelderMead> nms;
    if (cfg.target == OptTarget::global) {
        nms.emplace_back(tr.initial_params, nmo);
    } else {
        for (size_t k = 0; k < G; ++k)
            nms.emplace_back(std::vector<double>(tr.initial_params.begin() + long(k * P),
                                                 tr.initial_params.begin() + long((k + 1) * P)),
                             nmo);
    }

    for (size_t it = 0; it < cfg.iterations; ++it) {
        std::vector<double> x;
        for (auto &nm : nms) {
            const auto &part = nm.done() ? nm.best_x() : nm.ask();
            x.insert(x.end(), part.begin(), part.end());
        }
        DeviceModel trial = dev;
        write_params(trial, x);
        CabConfig c = cab;
        c.seed = cab.seed + 1000003ULL * it;
        auto ref = detail::measure(dev, gates, tr.corr_groups, c);
        auto itr = detail::measure(trial, gates, tr.corr_groups, c);

        OptIteration s;
        s.index = it;
        s.params = x;
        s.reference = ref.global;
        s.iterative = itr.global;
        s.reference_se = ref.global_se;
        s.iterative_se = itr.global_se;
        s.target = itr.global - ref.global;
        s.local_reference = ref.local;
        s.local_iterative = itr.local;
        s.corr_reference = ref.corr;
        s.corr_iterative = itr.corr;
        tr.iterations.push_back(s);

        if (cfg.target == OptTarget::global) {
            if (!nms[0].done()) nms[0].tell(-s.target);
        } else {
            for (size_t k = 0; k < G; ++k)
                if (!nms[k].done()) nms[k].tell(-(itr.local[k] - ref.local[k]));
        }
    }
    tr.converged = std::all_of(nms.begin(), nms.end(), [](const NelderMead &nm) {
        return nm.stop_reason() == NmStop::converged;
    });
    for (const auto &nm : nms) {
        tr.best_params.insert(tr.best_params.end(), nm.best_x().begin(), nm.best_x().end());
        tr.reevaluations += nm.reevaluations();
    }
    tr.window = tr.compute_window(cfg.window_first, cfg.window_last);
    return tr;
}

}  // namespace cabench

#endif
