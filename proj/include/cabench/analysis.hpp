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


#ifndef CABENCH_ANALYSIS_HPP
#define CABENCH_ANALYSIS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "cabench/cab.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/format.hpp"

namespace cabench {

// ---------------------------------------------------------------------------
// Correlation metric

/// (F_U - prod F_i) / sqrt(F_U prod F_i).
inline double correlation(double f_u, const std::vector<double> &parts) {
    if (!(f_u > 0.0) || !std::isfinite(f_u)) throw DomainError("correlation: fidelities must be positive");
    double prod = 1.0;
    for (double f : parts) {
        if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("correlation: fidelities must be positive");
        prod *= f;
    }
    return (f_u - prod) / std::sqrt(f_u * prod);
}

/// max(|mean| - 3 sd, 0).
inline double correlation_lower_bound(double mean, double sd) { return std::max(std::abs(mean) - 3.0 * sd, 0.0); }

// ---------------------------------------------------------------------------
// Composite depolarizing + ZZ model

/// Couplings between gates after coupler compensation; control phases are
/// not part of the analytic model.
inline CouplingMap effective_couplings(const DeviceModel &dev) {
    CouplingMap m;
    for (const auto &[kl, g] : dev.couplings.entries()) {
        double e = dev.effective_gamma(kl.first, kl.second);
        if (e != 0.0) m.set(kl.first, kl.second, e);
    }
    return m;
}

namespace detail {

inline std::vector<std::vector<int>> coupling_components(size_t g, const CouplingMap &c) {
    std::vector<int> comp(g, -1);
    std::vector<std::vector<int>> out;
    for (size_t s = 0; s < g; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> members{int(s)};
        comp[s] = int(out.size());
        for (size_t h = 0; h < members.size(); ++h)
            for (size_t o = 0; o < g; ++o)
                if (comp[o] < 0 && c.get(members[h], int(o)) != 0.0) {
                    comp[o] = int(out.size());
                    members.push_back(int(o));
                }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

}  // namespace detail

/// Process fidelity of the restriction to gate subset S of
/// Lambda_V o (x)_i Lambda_{p_i}, where gate i has dimension d_i (2 or 4; a
/// 4-dimensional gate carries one qubit that V does not touch) and
/// V = exp(-i sum_{k<l} gamma_kl Z_k Z_l) on the coupled qubits. The sum over
/// L subset of S of p^L (1-p)^{S\L} d_L / (d d_S^2) ||tr_L V||^2 factorizes over
/// connected components of the coupling graph and is evaluated per component.
inline double analytic_fidelity(const std::vector<int> &subset, const std::vector<double> &p,
                                const CouplingMap &couplings, const std::vector<int> &dims,
                                size_t cluster_limit = 8) {
    size_t g = p.size();
    if (dims.size() != g) throw DimensionError("analytic_fidelity: need one dimension per gate");
    for (int d : dims)
        if (d != 2 && d != 4) throw DomainError("analytic_fidelity: gate dimensions must be 2 or 4");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("analytic_fidelity: depolarizing parameters must lie in [0, 1]");
    std::vector<bool> in_s(g, false);
    for (int s : subset) {
        if (s < 0 || size_t(s) >= g) throw DimensionError("analytic_fidelity: subset index out of range");
        in_s[s] = true;
    }
    for (const auto &[kl, gamma] : couplings.entries())
        if (size_t(std::max(kl.first, kl.second)) >= g)
            throw DimensionError("analytic_fidelity: coupling refers to a missing gate");

    double total = 1.0;
    for (const auto &comp : detail::coupling_components(g, couplings)) {
        size_t k = comp.size();
        if (k > cluster_limit)
            throw ResourceError("analytic_fidelity: coupling component of " + std::to_string(k) +
                                " gates exceeds the limit " + std::to_string(cluster_limit));
        std::vector<int> local_s;  // positions within comp that are in S
        for (size_t t = 0; t < k; ++t)
            if (in_s[comp[t]]) local_s.push_back(int(t));
        if (local_s.empty()) continue;  // factor 1

        // V on the k coupled qubits; bit t of z is gate comp[t], +1 for bit 0.
        size_t dim = size_t{1} << k;
        std::vector<std::complex<double>> v(dim);
        for (size_t z = 0; z < dim; ++z) {
            double phase = 0;
            for (size_t a = 0; a < k; ++a)
                for (size_t b = a + 1; b < k; ++b) {
                    double gam = couplings.get(comp[a], comp[b]);
                    if (gam == 0.0) continue;
                    int sa = (z >> a) & 1 ? -1 : 1, sb = (z >> b) & 1 ? -1 : 1;
                    phase += gam * sa * sb;
                }
            v[z] = std::polar(1.0, -phase);
        }
        double d_c = 1, d_s = 1;
        for (size_t t = 0; t < k; ++t) d_c *= dims[comp[t]];
        for (int t : local_s) d_s *= dims[comp[t]];

        double acc = 0;
        size_t ns = local_s.size();
        for (size_t lm = 0; lm < (size_t{1} << ns); ++lm) {
            size_t lmask = 0;  // traced gates, as bits of z
            double weight = 1, d_l = 1, spect = 1;
            for (size_t t = 0; t < ns; ++t) {
                int gi = comp[local_s[t]];
                if ((lm >> t) & 1) {
                    lmask |= size_t{1} << local_s[t];
                    weight *= p[gi];
                    d_l *= dims[gi];
                } else {
                    weight *= 1.0 - p[gi];
                }
            }
            if (weight == 0.0) continue;
            // ||tr_L V||^2: spectators of traced gates contribute s^2, the
            // others s (identity trace on the kept side).
            for (size_t t = 0; t < k; ++t) {
                double s = dims[comp[t]] / 2.0;
                spect *= ((lmask >> t) & 1) ? s * s : s;
            }
            double norm = 0;
            for (size_t rest = 0; rest < dim; ++rest) {
                if (rest & lmask) continue;
                std::complex<double> tr = 0;
                for (size_t sub = lmask;; sub = (sub - 1) & lmask) {
                    tr += v[rest | sub];
                    if (sub == 0) break;
                }
                norm += std::norm(tr);
            }
            acc += weight * d_l * spect * norm;
        }
        total *= acc / (d_c * d_s * d_s);
    }
    return total;
}

/// Device overload: gate depolarizing parameters and effective couplings.
inline double analytic_fidelity(const DeviceModel &dev, const std::vector<int> &subset, int gate_dim = 4) {
    std::vector<double> p;
    for (const auto &g : dev.gates) p.push_back(g.depol_p);
    return analytic_fidelity(subset, p, effective_couplings(dev), std::vector<int>(dev.gates.size(), gate_dim),
                             dev.cluster_limit);
}

struct R2ClosedForm {
    double f1 = 1, f2 = 1, f12 = 1;
    double correlation = 0;          // from the three fidelities
    double correlation_numerator = 0;  // p1 p2 cos^2 sin^2 / sqrt(F12 F1 F2)
    double correlation_limit = 0;    // sin(gamma) tan(gamma), the p -> 1 form
};

/// Two coupled gates. `gate_dim` 2 uses the (1-p)/4 constants, 4 the
/// two-qubit-gate constants (1-p)/16.
inline R2ClosedForm closed_form_r2(double p1, double p2, double gamma, int gate_dim = 4) {
    if (gate_dim != 2 && gate_dim != 4) throw DomainError("closed_form_r2: gate_dim must be 2 or 4");
    double a = 1.0 / double(gate_dim * gate_dim);
    double c2 = std::pow(std::cos(gamma), 2), s2 = std::pow(std::sin(gamma), 2);
    R2ClosedForm r;
    r.f1 = p1 * c2 + (1 - p1) * a;
    r.f2 = p2 * c2 + (1 - p2) * a;
    r.f12 = (p1 * p2 + p1 * (1 - p2) * a + p2 * (1 - p1) * a) * c2 + (1 - p1) * (1 - p2) * a * a;
    r.correlation = correlation(r.f12, {r.f1, r.f2});
    r.correlation_numerator = p1 * p2 * c2 * s2 / std::sqrt(r.f12 * r.f1 * r.f2);
    r.correlation_limit = std::sin(gamma) * std::tan(gamma);
    return r;
}

struct R3ClosedForm {
    double f1 = 1, f2 = 1, f3 = 1, f12 = 1, f13 = 1, f23 = 1, f123 = 1;
    double c12 = 0, c13 = 0, c23 = 0;  // pairwise correlations
    double c12_factored = 0;           // product form of the (1,2) numerator
    double c12_limit = 0;              // p1, p2 -> 1 form
};

/// Three mutually coupled two-qubit gates.
inline R3ClosedForm closed_form_r3(double p1, double p2, double p3, double g12, double g13, double g23) {
    auto c2 = [](double g) { return std::pow(std::cos(g), 2); };
    auto s2 = [](double g) { return std::pow(std::sin(g), 2); };
    double a1 = c2(g12) * c2(g13) + s2(g12) * s2(g13);
    double a2 = c2(g12) * c2(g23) + s2(g12) * s2(g23);
    double a3 = c2(g13) * c2(g23) + s2(g13) * s2(g23);
    double b = c2(g12) * c2(g13) * c2(g23) + s2(g12) * s2(g13) * s2(g23);
    double q1 = 1 - p1, q2 = 1 - p2, q3 = 1 - p3;
    R3ClosedForm r;
    r.f1 = p1 * a1 + q1 / 16;
    r.f2 = p2 * a2 + q2 / 16;
    r.f3 = p3 * a3 + q3 / 16;
    r.f12 = p1 * p2 * b + p1 * q2 / 16 * a1 + q1 * p2 / 16 * a2 + q1 * q2 / 256;
    r.f13 = p1 * p3 * b + p1 * q3 / 16 * a1 + q1 * p3 / 16 * a3 + q1 * q3 / 256;
    r.f23 = p2 * p3 * b + p2 * q3 / 16 * a2 + q2 * p3 / 16 * a3 + q2 * q3 / 256;
    r.f123 = (p1 * p2 * p3 + p1 * p2 * q3 / 16 + p1 * p3 * q2 / 16 + p2 * p3 * q1 / 16) * b +
             p1 * q2 * q3 / 256 * a1 + p2 * q1 * q3 / 256 * a2 + p3 * q1 * q2 / 256 * a3 + q1 * q2 * q3 / 4096;
    r.c12 = correlation(r.f12, {r.f1, r.f2});
    r.c13 = correlation(r.f13, {r.f1, r.f3});
    r.c23 = correlation(r.f23, {r.f2, r.f3});
    double num = c2(g12) * s2(g12) * (c2(g13) - s2(g13)) * (c2(g23) - s2(g23));
    r.c12_factored = p1 * p2 * num / std::sqrt(r.f12 * r.f1 * r.f2);
    r.c12_limit = num / std::sqrt(b * a1 * a2);
    return r;
}

// ---------------------------------------------------------------------------
// Landscape

struct CorrelationLandscape {
    double gamma12 = 0;
    std::vector<double> axis;                  // shared gamma13 / gamma23 grid
    std::vector<std::vector<double>> values;   // values[i][j]: gamma13 = axis[i], gamma23 = axis[j]

    std::string to_csv() const {
        CsvTable t({"gamma13", "gamma23", "correlation"});
        for (size_t i = 0; i < axis.size(); ++i)
            for (size_t j = 0; j < axis.size(); ++j)
                t.add({format_double(axis[i]), format_double(axis[j]), format_double(values[i][j])});
        return t.str();
    }
};

/// The gamma12 values of the reference figure: 0, pi/32, ..., 5 pi/32.
inline std::vector<double> landscape_gamma12_values() {
    std::vector<double> r;
    for (int k = 0; k <= 5; ++k) r.push_back(k * std::numbers::pi / 32);
    return r;
}

/// Correlation of gates 1 and 2 (p -> 1) over gamma13, gamma23 in [0, upper].
inline CorrelationLandscape correlation_landscape(double gamma12, size_t resolution,
                                                  double upper = 5 * std::numbers::pi / 16) {
    if (resolution < 2) throw DomainError("correlation_landscape: resolution must be >= 2");
    CorrelationLandscape l;
    l.gamma12 = gamma12;
    for (size_t i = 0; i < resolution; ++i) l.axis.push_back(upper * double(i) / double(resolution - 1));
    l.values.assign(resolution, std::vector<double>(resolution));
    for (size_t i = 0; i < resolution; ++i)
        for (size_t j = 0; j < resolution; ++j)
            l.values[i][j] = closed_form_r3(1, 1, 1, gamma12, l.axis[i], l.axis[j]).c12;
    return l;
}

// ---------------------------------------------------------------------------
// Correlation reports

struct CorrelationEntry {
    std::vector<int> gates;
    double value = 0;
    int distance = -1;  // layout distance for pairs, -1 otherwise
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    double lower_bound = std::numeric_limits<double>::quiet_NaN();
};

struct CorrelationReport {
    size_t n_gates = 0;
    FidelityKind kind = FidelityKind::pure;
    std::vector<CorrelationEntry> entries;

    const CorrelationEntry *find(std::vector<int> gates) const {
        std::sort(gates.begin(), gates.end());
        for (const auto &e : entries)
            if (e.gates == gates) return &e;
        return nullptr;
    }
    /// Pairwise values as a symmetric matrix; NaN where no pair was measured.
    std::vector<std::vector<double>> matrix() const {
        std::vector<std::vector<double>> m(n_gates,
                                           std::vector<double>(n_gates, std::numeric_limits<double>::quiet_NaN()));
        for (const auto &e : entries)
            if (e.gates.size() == 2) m[e.gates[0]][e.gates[1]] = m[e.gates[1]][e.gates[0]] = e.value;
        return m;
    }
    std::string to_csv() const {
        CsvTable t({"gate_a", "gate_b", "distance", "correlation"});
        for (const auto &e : entries)
            if (e.gates.size() == 2)
                t.add({std::to_string(e.gates[0]), std::to_string(e.gates[1]), std::to_string(e.distance),
                       format_double(e.value)});
        return t.str();
    }
};

inline const FidelityEstimate &subset_estimate(const SubsetResult &s, FidelityKind kind) {
    if (kind != FidelityKind::dressed && !s.has_twirl)
        throw IncompleteReportError("subset fidelities lack the twirl run needed for pure fidelities");
    return kind == FidelityKind::dressed ? s.dressed : (kind == FidelityKind::twirl ? s.twirl : s.pure);
}

/// Correlation of every multi-gate subset in the report against the product
/// of its single-gate fidelities. Pairs get their layout distance.
inline CorrelationReport correlation_matrix(const CabReport &rep, const DeviceModel &dev,
                                            FidelityKind kind = FidelityKind::pure) {
    CorrelationReport out;
    out.n_gates = dev.gates.size();
    out.kind = kind;
    for (const auto &s : rep.subsets) {
        if (s.gates.size() < 2) continue;
        std::vector<double> parts;
        for (int g : s.gates) {
            const auto *single = rep.subset({g});
            if (!single) throw IncompleteReportError("no single-gate fidelity for gate " + std::to_string(g));
            parts.push_back(subset_estimate(*single, kind).value);
        }
        CorrelationEntry e;
        e.gates = s.gates;
        std::sort(e.gates.begin(), e.gates.end());
        e.value = correlation(subset_estimate(s, kind).value, parts);
        if (e.gates.size() == 2) e.distance = dev.gate_distance(e.gates[0], e.gates[1]);
        out.entries.push_back(std::move(e));
    }
    if (out.entries.empty()) throw IncompleteReportError("report has no multi-gate subsets");
    return out;
}

/// Every pair of `gates` plus the singletons, for use as a CAB subset list.
inline std::vector<std::vector<int>> pair_subsets(const std::vector<int> &gates) {
    std::vector<std::vector<int>> r;
    for (int g : gates) r.push_back({g});
    for (size_t a = 0; a < gates.size(); ++a)
        for (size_t b = a + 1; b < gates.size(); ++b) r.push_back({gates[a], gates[b]});
    return r;
}

/// Repeats `experiment(repetition)` and fills mean, SD and the 3-SD lower
/// bound of every entry.
inline CorrelationReport correlation_fluctuation(size_t repeat,
                                                 const std::function<CorrelationReport(size_t)> &experiment) {
    if (repeat < 2) throw DomainError("correlation_fluctuation: repeat must be >= 2");
    std::vector<CorrelationReport> runs;
    for (size_t r = 0; r < repeat; ++r) runs.push_back(experiment(r));
    CorrelationReport out = runs.front();
    for (auto &e : out.entries) {
        std::vector<double> v;
        for (const auto &run : runs) {
            const auto *x = run.find(e.gates);
            if (!x) throw IncompleteReportError("repetitions measured different subsets");
            v.push_back(x->value);
        }
        double m = 0;
        for (double x : v) m += x;
        m /= double(v.size());
        double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        e.mean = m;
        e.value = m;
        e.sd = std::sqrt(ss / double(v.size() - 1));
        e.lower_bound = correlation_lower_bound(e.mean, e.sd);
    }
    return out;
}

}  // namespace cabench

#endif
