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


#ifndef CABENCH_RUNNER_HPP
#define CABENCH_RUNNER_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "cabench/analysis.hpp"
#include "cabench/cab.hpp"
#include "cabench/calibration.hpp"
#include "cabench/config.hpp"
#include "cabench/cycle_benchmarking.hpp"
#include "cabench/experiments.hpp"
#include "cabench/format.hpp"
#include "cabench/optimize.hpp"

namespace cabench {

/// Everything one run produces: the result document and named CSV files.
struct Artifacts {
    json document;
    std::map<std::string, std::string> files;  // file name -> contents
};

namespace detail {

inline json estimate_json(const FidelityEstimate &e) {
    return {{"kind", to_string(e.kind)},
            {"value", e.value},
            {"se", e.se},
            {"mode", e.meta.mode},
            {"excluded_flagged", e.meta.excluded_flagged},
            {"se_jackknife", e.meta.se_jackknife},
            {"se_delta", e.meta.se_delta},
            {"se_observable_sampling", e.meta.se_observable_sampling},
            {"flag_policy", e.meta.flag_policy}};
}

inline void add_lambdas(CsvTable &t, const std::string &run, const FidelityEstimate &e) {
    for (const auto &q : e.quality_params)
        t.add({run, q.w.str(), format_double(q.lambda), format_double(q.se), q.flagged ? "1" : "0"});
}

/// Mean survival over sequences per depth for every observable of `e`.
inline void add_survivals(CsvTable &t, const std::string &run, const RunData &data, const FidelityEstimate &e) {
    for (size_t j = 0; j < data.depths.size(); ++j)
        for (const auto &q : e.quality_params) {
            double acc = 0;
            for (const auto &table : data.tables[j]) acc += survival_probability(table, q.w);
            t.add({run, std::to_string(data.depths[j]), q.w.str(),
                   format_double(acc / double(data.tables[j].size()))});
        }
}

inline json gate_list_json(const std::vector<std::vector<int>> &v) {
    json a = json::array();
    for (const auto &g : v) a.push_back(g);
    return a;
}

inline json cab_report_json(const CabReport &rep) {
    json j;
    j["target"] = rep.target;
    j["dressed"] = estimate_json(rep.dressed);
    if (rep.has_twirl) {
        j["twirl"] = estimate_json(rep.twirl);
        j["pure"] = estimate_json(rep.pure);
    }
    j["subsets"] = json::array();
    for (const auto &s : rep.subsets) {
        json js{{"gates", s.gates}, {"qubits", s.qubits}, {"dressed", estimate_json(s.dressed)}};
        if (s.has_twirl) {
            js["twirl"] = estimate_json(s.twirl);
            js["pure"] = estimate_json(s.pure);
        }
        j["subsets"].push_back(js);
    }
    return j;
}

inline void cab_report_files(Artifacts &a, const CabReport &rep) {
    CsvTable lam({"run", "observable", "lambda", "se", "flagged"});
    add_lambdas(lam, "dressed", rep.dressed);
    if (rep.has_twirl) add_lambdas(lam, "twirl", rep.twirl);
    a.files["lambda.csv"] = lam.str();
    CsvTable surv({"run", "depth", "observable", "survival"});
    add_survivals(surv, "dressed", rep.dressed_data, rep.dressed);
    if (rep.has_twirl) add_survivals(surv, "twirl", rep.twirl_data, rep.twirl);
    a.files["survivals.csv"] = surv.str();
    CsvTable sub({"gates", "dressed", "dressed_se", "twirl", "twirl_se", "pure", "pure_se"});
    for (const auto &s : rep.subsets) {
        std::string g;
        for (int x : s.gates) g += (g.empty() ? "" : " ") + std::to_string(x);
        sub.add({g, format_double(s.dressed.value), format_double(s.dressed.se),
                 s.has_twirl ? format_double(s.twirl.value) : "", s.has_twirl ? format_double(s.twirl.se) : "",
                 s.has_twirl ? format_double(s.pure.value) : "", s.has_twirl ? format_double(s.pure.se) : ""});
    }
    a.files["subsets.csv"] = sub.str();
}

inline void run_cab(const ExperimentConfig &c, Artifacts &a) {
    const auto &dev = *c.device;
    auto gates = c.resolved_gates();
    auto rep = run_cab_experiment(TargetGate::parallel_cz(dev.n_qubits, gates), dev, c.cab_config());
    a.document["results"] = cab_report_json(rep);
    cab_report_files(a, rep);
}

inline void run_cb(const ExperimentConfig &c, Artifacts &a) {
    const auto &dev = *c.device;
    auto gates = c.resolved_gates();
    auto est = run_cb_experiment(TargetGate::parallel_cz(dev.n_qubits, gates), dev, c.cb_config());
    a.document["results"] = {{"dressed", estimate_json(est)}};
    CsvTable lam({"run", "observable", "lambda", "se", "flagged"});
    add_lambdas(lam, "cb", est);
    a.files["lambda.csv"] = lam.str();
}

inline void run_fully_connected(const ExperimentConfig &c, Artifacts &a) {
    size_t n = c.fully_connected.n;
    DeviceModel dev = c.device ? *c.device
                               : ring_device(n, depol_for_process_fidelity(0.9794), kDefaultSingleQubitDepol,
                                             Readout{0.0103, 0.0382}, true);
    CsvTable fid({"gate", "order", "dressed", "dressed_se", "twirl", "twirl_se", "pure", "pure_se"});
    CsvTable lam({"gate", "run", "observable", "lambda", "se", "flagged"});
    json runs = json::array();
    for (size_t i = 0; i < c.fully_connected.gates; ++i) {
        Rng rng = make_stream(c.seed, {kTagFullyConnected, n, i});
        auto u = fully_connected_gate(dev, rng);
        auto ord = gate_order(u.tableau(dev), 1000000);
        auto cfg = c.cab_config();
        cfg.seed = c.seed + i;
        auto rep = run_cab_experiment(u, dev, cfg);
        auto cell = [&](const FidelityEstimate &e, bool have) {
            return std::vector<std::string>{have ? format_double(e.value) : "", have ? format_double(e.se) : ""};
        };
        std::vector<std::string> row{std::to_string(i), ord ? std::to_string(*ord) : "inf"};
        for (auto [e, have] : {std::pair{&rep.dressed, true}, {&rep.twirl, rep.has_twirl}, {&rep.pure, rep.has_twirl}})
            for (auto &s : cell(*e, have)) row.push_back(s);
        fid.add(row);
        for (const auto &q : rep.dressed.quality_params)
            lam.add({std::to_string(i), "dressed", q.w.str(), format_double(q.lambda), format_double(q.se),
                     q.flagged ? "1" : "0"});
        json r{{"gate", i}, {"order", ord ? json(*ord) : json(nullptr)}, {"dressed", estimate_json(rep.dressed)}};
        if (rep.has_twirl) {
            r["twirl"] = estimate_json(rep.twirl);
            r["pure"] = estimate_json(rep.pure);
        }
        runs.push_back(r);
    }
    a.document["results"] = {{"n", n}, {"device", dev.name}, {"gates", runs}};
    a.files["fidelity.csv"] = fid.str();
    a.files["lambda.csv"] = lam.str();
}

inline void run_scan(const ExperimentConfig &c, Artifacts &a) {
    auto cfg = c.cab_config();
    cfg.subset_list.clear();
    auto scan = parallel_cz_scan(*c.device, c.scan.counts, cfg);
    json rows = json::array();
    for (const auto &r : scan.rows)
        rows.push_back({{"n_gates", r.n_gates},
                        {"dressed", estimate_json(r.dressed)},
                        {"twirl", estimate_json(r.twirl)},
                        {"pure", estimate_json(r.pure)},
                        {"theory", r.theory}});
    a.document["results"] = {{"rows", rows}};
    a.files["scan.csv"] = scan.to_csv();
}

inline json correlation_json(const CorrelationReport &r) {
    json a = json::array();
    for (const auto &e : r.entries) {
        json j{{"gates", e.gates}, {"value", e.value}, {"distance", e.distance}};
        if (!std::isnan(e.sd)) {
            j["mean"] = e.mean;
            j["sd"] = e.sd;
            j["lower_bound"] = e.lower_bound;
        }
        a.push_back(j);
    }
    return a;
}

inline void run_correlate(const ExperimentConfig &c, Artifacts &a) {
    const auto &dev = *c.device;
    auto gates = c.resolved_gates();
    auto base = c.cab_config();
    base.subset_list = pair_subsets(gates);
    if (c.correlate.kind != FidelityKind::dressed && !base.run_twirl)
        throw ConfigError("correlate.kind", "twirl and pure correlations need cab.run_twirl");
    auto u = TargetGate::parallel_cz(dev.n_qubits, gates);
    auto one = [&](size_t r) {
        auto cfg = base;
        cfg.seed = c.seed + r;
        return correlation_matrix(run_cab_experiment(u, dev, cfg), dev, c.correlate.kind);
    };
    CorrelationReport rep = c.correlate.repeat > 1 ? correlation_fluctuation(c.correlate.repeat, one) : one(0);
    a.document["results"] = {{"kind", to_string(rep.kind)}, {"repeat", c.correlate.repeat},
                             {"entries", correlation_json(rep)}};
    a.files["correlation.csv"] = rep.to_csv();
    if (c.correlate.repeat > 1) {
        CsvTable t({"gate_a", "gate_b", "distance", "mean", "sd", "lower_bound"});
        for (const auto &e : rep.entries)
            if (e.gates.size() == 2)
                t.add({std::to_string(e.gates[0]), std::to_string(e.gates[1]), std::to_string(e.distance),
                       format_double(e.mean), format_double(e.sd), format_double(e.lower_bound)});
        a.files["fluctuation.csv"] = t.str();
    }
}

inline void run_landscape(const ExperimentConfig &c, Artifacts &a) {
    json panels = json::array();
    for (size_t k = 0; k < c.landscape.gamma12.size(); ++k) {
        auto l = correlation_landscape(c.landscape.gamma12[k], c.landscape.resolution, c.landscape.upper);
        std::string name = "landscape_" + std::to_string(k) + ".csv";
        a.files[name] = l.to_csv();
        panels.push_back({{"gamma12", l.gamma12}, {"file", name}});
    }
    a.document["results"] = {{"panels", panels}, {"resolution", c.landscape.resolution}};
}

inline json window_json(const WindowStat &s) { return {{"mean", s.mean}, {"sd", s.sd}, {"count", s.count}}; }

inline void run_optimize(const ExperimentConfig &c, Artifacts &a) {
    auto tr = optimize_parallel_cz(*c.device, c.resolved_gates(), c.optimize_config());
    json w{{"first", tr.window.first},
           {"last", tr.window.last},
           {"reference", window_json(tr.window.reference)},
           {"iterative", window_json(tr.window.iterative)}};
    w["local_reference"] = json::array();
    w["local_iterative"] = json::array();
    for (size_t k = 0; k < tr.gates.size(); ++k) {
        w["local_reference"].push_back(window_json(tr.window.local_reference[k]));
        w["local_iterative"].push_back(window_json(tr.window.local_iterative[k]));
    }
    w["correlation"] = json::array();
    for (size_t k = 0; k < tr.corr_groups.size(); ++k)
        w["correlation"].push_back({{"gates", tr.corr_groups[k]},
                                    {"reference", window_json(tr.window.corr_reference[k])},
                                    {"iterative", window_json(tr.window.corr_iterative[k])}});
    a.document["results"] = {{"target", to_string(tr.target)},
                             {"gates", tr.gates},
                             {"parameters", tr.parameter_names},
                             {"initial_params", tr.initial_params},
                             {"best_params", tr.best_params},
                             {"converged", tr.converged},
                             {"reevaluations", tr.reevaluations},
                             {"window", w}};
    a.files["trajectory.csv"] = tr.to_csv();
}

inline void run_calibrate(const ExperimentConfig &c, Artifacts &a) {
    auto gates = c.resolved_gates();
    if (c.calibrate.method == "fast") {
        DeviceModel dev = *c.device;
        auto grid = uniform_phase_grid(c.calibrate.grid_points);
        CalibrationOptions opt;
        opt.shots = c.calibrate.shots;
        opt.seed = c.seed;
        CsvTable t({"gate", "phi_I", "phi_x", "phi", "residual", "cond_phase_correction", "dyn_correction_i",
                    "dyn_correction_j"});
        json rows = json::array();
        for (int g : gates) {
            auto cp = measure_conditional_phase(dev, g, grid, opt);
            auto fc = fast_calibrate(dev, g, grid, opt);
            t.add({std::to_string(g), format_double(cp.phi_I), format_double(cp.phi_x), format_double(cp.phi),
                   format_double(cp.residual), format_double(fc.cond_phase_correction),
                   format_double(fc.dyn_correction_i), format_double(fc.dyn_correction_j)});
            rows.push_back({{"gate", g},
                            {"phi", cp.phi},
                            {"residual", cp.residual},
                            {"cond_phase_correction", fc.cond_phase_correction},
                            {"dyn_correction_i", fc.dyn_correction_i},
                            {"dyn_correction_j", fc.dyn_correction_j}});
        }
        a.document["results"] = {{"method", "fast"}, {"gates", rows}, {"calibrated_device", device_to_json(dev)}};
        a.files["calibration.csv"] = t.str();
    } else {
        auto opt = c.calibrate.parallel;
        opt.seed = c.seed;
        auto pc = parallel_calibrate(*c.device, gates, opt);
        std::vector<std::string> h{"step"};
        for (int g : gates) {
            h.push_back("ref_g" + std::to_string(g));
            h.push_back("iter_g" + std::to_string(g));
        }
        CsvTable t(h);
        for (size_t s = 0; s < pc.steps.size(); ++s) {
            std::vector<std::string> row{std::to_string(s)};
            for (size_t k = 0; k < gates.size(); ++k) {
                row.push_back(format_double(pc.steps[s].reference[k]));
                row.push_back(format_double(pc.steps[s].iterative[k]));
            }
            t.add(row);
        }
        json best = json::array();
        for (const auto &b : pc.best_params) best.push_back(b);
        a.document["results"] = {{"method", "parallel"},
                                 {"gates", gates},
                                 {"best_params", best},
                                 {"calibrated_device", device_to_json(pc.device)}};
        a.files["back_probability.csv"] = t.str();
    }
}

inline void run_order_stats(const ExperimentConfig &c, Artifacts &a) {
    json rows = json::array();
    std::string csv;
    for (size_t n : c.order_stats.ns) {
        auto s = order_stats(n, c.order_stats.samples, c.seed, c.order_stats.cap);
        rows.push_back({{"n", n}, {"samples", s.orders.size()}, {"median", s.median()}, {"above_cap", s.above_cap}});
        auto part = s.to_csv();
        csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
    }
    a.document["results"] = {{"sizes", rows}};
    a.files["orders.csv"] = csv;
}

}  // namespace detail

/// Runs one experiment. The output depends only on the configuration.
inline Artifacts run_experiment(const ExperimentConfig &c) {
    c.validate();
    Artifacts a;
    a.document["schema_version"] = kSchemaVersion;
    a.document["kind"] = to_string(c.kind);
    a.document["seed"] = c.seed;
    a.document["config"] = config_to_json(c);
    if (c.device) a.document["device"] = device_to_json(*c.device);
    switch (c.kind) {
        case ExperimentKind::cab: detail::run_cab(c, a); break;
        case ExperimentKind::cb: detail::run_cb(c, a); break;
        case ExperimentKind::fully_connected: detail::run_fully_connected(c, a); break;
        case ExperimentKind::parallel_cz_scan: detail::run_scan(c, a); break;
        case ExperimentKind::correlate: detail::run_correlate(c, a); break;
        case ExperimentKind::landscape: detail::run_landscape(c, a); break;
        case ExperimentKind::optimize: detail::run_optimize(c, a); break;
        case ExperimentKind::calibrate: detail::run_calibrate(c, a); break;
        case ExperimentKind::order_stats: detail::run_order_stats(c, a); break;
    }
    json files = json::array();
    for (const auto &[name, body] : a.files) files.push_back(name);
    a.document["files"] = files;
    return a;
}

/// Writes result.json and the CSV files into `dir`, creating it if needed.
inline void write_artifacts(const Artifacts &a, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string &name, const std::string &body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ResourceError("cannot write " + (dir / name).string());
        out << body;
    };
    put("result.json", a.document.dump(2) + "\n");
    for (const auto &[name, body] : a.files) put(name, body);
}

}  // namespace cabench

#endif
