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


#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "cabench/analysis.hpp"
#include "cabench/process_fidelity.hpp"
#include "oracle_util.hpp"
#include "test_support.hpp"

using namespace cabench;

namespace {

constexpr double kPi = std::numbers::pi;

struct RandomModel {
    std::vector<double> p;
    CouplingMap map;
    std::vector<std::vector<double>> gamma;
};

RandomModel draw(size_t g, Rng &rng, double pmin = 0.8, double gmax = 0.3) {
    std::uniform_real_distribution<double> up(pmin, 1.0), ug(0.0, gmax);
    RandomModel m;
    m.gamma.assign(g, std::vector<double>(g, 0.0));
    for (size_t i = 0; i < g; ++i) m.p.push_back(up(rng));
    for (size_t a = 0; a < g; ++a)
        for (size_t b = a + 1; b < g; ++b) {
            double v = ug(rng);
            m.gamma[a][b] = m.gamma[b][a] = v;
            m.map.set(int(a), int(b), v);
        }
    return m;
}

double choi_of(const RandomModel &m, const std::vector<int> &subset, int dim) {
    oracle::CompositeChannel ch{m.p, m.gamma, dim, subset};
    return choi_process_fidelity(ch, ch.n_subset());
}

std::vector<std::vector<int>> nonempty_subsets(size_t g) {
    std::vector<std::vector<int>> r;
    for (size_t mask = 1; mask < (size_t{1} << g); ++mask) {
        std::vector<int> s;
        for (size_t i = 0; i < g; ++i)
            if ((mask >> i) & 1) s.push_back(int(i));
        r.push_back(s);
    }
    return r;
}

}  // namespace

TEST(Correlation, Examples) {
    EXPECT_EQ(correlation(0.94 * 0.94, {0.94, 0.94}), 0.0);
    EXPECT_NEAR(correlation(0.88, {0.94, 0.94}), (0.88 - 0.8836) / std::sqrt(0.88 * 0.8836), 1e-15);
    EXPECT_NEAR(correlation(0.88, {0.94, 0.94}), -0.004083, 1e-6);
    EXPECT_THROW(correlation(0.0, {0.9}), DomainError);
    EXPECT_THROW(correlation(0.9, {-0.1}), DomainError);
    EXPECT_EQ(correlation_lower_bound(0.012, 0.001), 0.012 - 0.003);
    EXPECT_EQ(correlation_lower_bound(0.001, 0.001), 0.0);
    EXPECT_NEAR(correlation_lower_bound(-0.012, 0.001), 0.009, 1e-15);
}

TEST(AnalyticFidelity, TrivialAndTensorLimits) {
    CouplingMap none;
    EXPECT_NEAR(analytic_fidelity({0, 1, 2}, {1, 1, 1}, none, {4, 4, 4}), 1.0, 1e-15);
    std::vector<double> p{0.9, 0.8, 0.95};
    double expect = 1;
    for (double v : p) expect *= (1 + 15 * v) / 16;
    EXPECT_NEAR(analytic_fidelity({0, 1, 2}, p, none, {4, 4, 4}), expect, 1e-14);
    EXPECT_NEAR(analytic_fidelity({1}, p, none, {4, 2, 4}), (1 + 3 * 0.8) / 4, 1e-15);
}

TEST(AnalyticFidelity, TwoGateMarginal) {
    CouplingMap c;
    c.set(0, 1, 0.1);
    EXPECT_NEAR(analytic_fidelity({0}, {1, 1}, c, {4, 4}), std::pow(std::cos(0.1), 2), 1e-15);
    EXPECT_NEAR(analytic_fidelity({0}, {1, 1}, c, {4, 4}), 0.990033, 1e-6);
}

TEST(AnalyticFidelity, MatchesExplicitChannelFourDim) {
    Rng rng(21);
    for (int t = 0; t < 6; ++t) {
        size_t g = 2 + t % 2;
        auto m = draw(g, rng);
        for (const auto &s : nonempty_subsets(g))
            EXPECT_NEAR(analytic_fidelity(s, m.p, m.map, std::vector<int>(g, 4)), choi_of(m, s, 4), 1e-10);
    }
}

TEST(AnalyticFidelity, MatchesExplicitChannelTwoDim) {
    Rng rng(22);
    for (int t = 0; t < 6; ++t) {
        size_t g = 2 + t % 3;
        auto m = draw(g, rng, 0.5, 1.2);
        for (const auto &s : nonempty_subsets(g))
            EXPECT_NEAR(analytic_fidelity(s, m.p, m.map, std::vector<int>(g, 2)), choi_of(m, s, 2), 1e-10);
    }
}

TEST(AnalyticFidelity, MixedDimensionsMatchExplicitChannel) {
    // Gate 0 with a spectator, gate 1 without: checked via the component product.
    CouplingMap c;
    c.set(0, 1, 0.4);
    c.set(2, 3, 0.2);
    std::vector<double> p{0.9, 0.85, 0.97, 0.92};
    double f = analytic_fidelity({0, 1, 2, 3}, p, c, {4, 4, 4, 4});
    double a = analytic_fidelity({0, 1}, {0.9, 0.85}, [] {
        CouplingMap m;
        m.set(0, 1, 0.4);
        return m;
    }(), {4, 4});
    double b = analytic_fidelity({0, 1}, {0.97, 0.92}, [] {
        CouplingMap m;
        m.set(0, 1, 0.2);
        return m;
    }(), {4, 4});
    EXPECT_NEAR(f, a * b, 1e-14);
}

TEST(AnalyticFidelity, DeviceOverloadMatchesTwirledGateNoise) {
    auto d = testdev::line(3, 0.93);
    d.couplings.set(0, 1, 0.2);
    d.couplings.set(1, 2, 0.35);
    d.couplings.set(0, 2, 0.05);
    d.gates[1].control.coupler_comp = 0.1;
    auto ch = gate_layer_noise_channel(d, {0, 1, 2});
    EXPECT_NEAR(analytic_fidelity(d, {0, 1, 2}), choi_process_fidelity(ch, 6), 1e-10);
}

TEST(AnalyticFidelity, Errors) {
    CouplingMap c;
    for (int k = 1; k < 10; ++k) c.set(0, k, 0.1);
    std::vector<double> p(10, 0.9);
    EXPECT_THROW(analytic_fidelity({0}, p, c, std::vector<int>(10, 4)), ResourceError);
    EXPECT_THROW(analytic_fidelity({0}, {0.9}, CouplingMap{}, {3}), DomainError);
    EXPECT_THROW(analytic_fidelity({2}, {0.9}, CouplingMap{}, {4}), DimensionError);
}

TEST(ClosedFormR2, MatchesAnalyticVariants) {
    Rng rng(30);
    std::uniform_real_distribution<double> up(0.5, 1.0), ug(0.0, 1.5);
    for (int t = 0; t < 100; ++t) {
        double p1 = up(rng), p2 = up(rng), g = ug(rng);
        CouplingMap c;
        c.set(0, 1, g);
        for (int dim : {2, 4}) {
            auto r = closed_form_r2(p1, p2, g, dim);
            std::vector<int> dims{dim, dim};
            EXPECT_NEAR(r.f1, analytic_fidelity({0}, {p1, p2}, c, dims), 1e-13);
            EXPECT_NEAR(r.f2, analytic_fidelity({1}, {p1, p2}, c, dims), 1e-13);
            EXPECT_NEAR(r.f12, analytic_fidelity({0, 1}, {p1, p2}, c, dims), 1e-13);
            EXPECT_NEAR(r.correlation, r.correlation_numerator, 1e-13);
        }
    }
}

TEST(ClosedFormR2, Examples) {
    auto r = closed_form_r2(0.9, 0.95, 0.0, 2);
    EXPECT_EQ(r.correlation, 0.0);
    EXPECT_NEAR(r.f1, 0.9 + 0.1 / 4, 1e-15);
    auto a = closed_form_r2(1, 1, 0.1);
    EXPECT_NEAR(a.correlation, std::sin(0.1) * std::tan(0.1), 1e-15);
    EXPECT_NEAR(a.correlation, 0.010017, 1e-6);
    auto b = closed_form_r2(1, 1, 0.033);
    EXPECT_NEAR(b.correlation, 0.00109, 1e-5);
}

TEST(ClosedFormR2, PositiveOnOpenInterval) {
    Rng rng(31);
    std::uniform_real_distribution<double> up(0.5 + 1e-9, 1.0);
    for (int t = 0; t < 50; ++t) {
        double p1 = up(rng), p2 = up(rng);
        for (int k = 1; k < 200; ++k)
            for (int dim : {2, 4}) EXPECT_GT(closed_form_r2(p1, p2, k * (kPi / 2) / 200, dim).correlation, 0.0);
    }
}

TEST(ClosedFormR2, MonotoneInCoupling) {
    auto increasing = [](double p1, double p2, int dim, double upper) {
        double prev = 0;
        for (int k = 1; k < 400; ++k) {
            double c = closed_form_r2(p1, p2, k * upper / 400, dim).correlation;
            if (!(c > prev)) return false;
            prev = c;
        }
        return true;
    };
    Rng rng(33);
    std::uniform_real_distribution<double> up(0.5 + 1e-9, 1.0);
    for (int t = 0; t < 50; ++t) {
        double p1 = up(rng), p2 = up(rng);
        for (int dim : {2, 4}) EXPECT_TRUE(increasing(p1, p2, dim, kPi / 4)) << p1 << " " << p2;
    }
    for (int dim : {2, 4}) EXPECT_TRUE(increasing(1, 1, dim, kPi / 2 - 1e-3));
    // With gate noise the correlation turns over before pi/2 and returns to 0.
    EXPECT_LT(closed_form_r2(0.9, 0.9, kPi / 2 - 1e-4).correlation, closed_form_r2(0.9, 0.9, 1.4).correlation);
}

TEST(ClosedFormR3, MatchesAnalytic) {
    Rng rng(32);
    std::uniform_real_distribution<double> up(0.8, 1.0), ug(0.0, 1.2);
    for (int t = 0; t < 100; ++t) {
        double p[3] = {up(rng), up(rng), up(rng)};
        double g12 = ug(rng), g13 = ug(rng), g23 = ug(rng);
        CouplingMap c;
        c.set(0, 1, g12);
        c.set(0, 2, g13);
        c.set(1, 2, g23);
        std::vector<double> pv(p, p + 3);
        std::vector<int> dims{4, 4, 4};
        auto r = closed_form_r3(p[0], p[1], p[2], g12, g13, g23);
        EXPECT_NEAR(r.f1, analytic_fidelity({0}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f2, analytic_fidelity({1}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f3, analytic_fidelity({2}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f12, analytic_fidelity({0, 1}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f13, analytic_fidelity({0, 2}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f23, analytic_fidelity({1, 2}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.f123, analytic_fidelity({0, 1, 2}, pv, c, dims), 1e-12);
        EXPECT_NEAR(r.c12, r.c12_factored, 1e-12);
    }
}

TEST(ClosedFormR3, Limits) {
    auto z = closed_form_r3(0.9, 0.8, 0.95, 0, 0, 0);
    EXPECT_NEAR(z.c12, 0.0, 1e-15);
    EXPECT_NEAR(z.c13, 0.0, 1e-15);
    EXPECT_NEAR(z.f2, 0.8 + 0.2 / 16, 1e-15);
    auto neg = closed_form_r3(1, 1, 1, 0.1, 1.0, 0.2);
    EXPECT_LT(neg.c12, 0.0);
    auto red = closed_form_r3(1, 1, 1, kPi / 16, 0, 0);
    EXPECT_NEAR(red.c12, closed_form_r2(1, 1, kPi / 16, 4).correlation, 1e-14);
    EXPECT_NEAR(red.c12, red.c12_limit, 1e-14);
}

TEST(Landscape, SignStructure) {
    const size_t n = 41;  // axis step 5 pi / 640; pi / 4 is axis[32]
    for (double g12 : landscape_gamma12_values()) {
        auto l = correlation_landscape(g12, n);
        ASSERT_EQ(l.axis.size(), n);
        EXPECT_NEAR(l.axis[32], kPi / 4, 1e-15);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                double v = l.values[i][j];
                EXPECT_NEAR(v, l.values[j][i], 1e-15);
                if (g12 == 0.0) {
                    EXPECT_EQ(v, 0.0);
                    continue;
                }
                if (i == 32 || j == 32) {
                    EXPECT_NEAR(v, 0.0, 1e-15);
                    continue;
                }
                bool neg = (i > 32) != (j > 32);
                EXPECT_EQ(v < 0, neg) << g12 << " " << i << " " << j;
            }
    }
    EXPECT_THROW(correlation_landscape(0.1, 1), DomainError);
    auto csv = correlation_landscape(0.1, 3).to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "gamma13,gamma23,correlation");
}

TEST(CorrelationReport, MatrixFromCab) {
    auto d = testdev::line(3, 0.985, 1.0);
    d.single_qubit_noise = false;
    d.couplings.set(0, 1, 0.1);
    CabConfig cfg;
    cfg.backend = Backend::dm;
    cfg.K_s = 0;
    cfg.K_r = 20;
    cfg.subset_list = pair_subsets({0, 1, 2});
    auto rep = run_cab_experiment(TargetGate::parallel_cz(6, {0, 1, 2}), d, cfg);
    auto cr = correlation_matrix(rep, d);
    auto m = cr.matrix();
    EXPECT_EQ(m[0][1], m[1][0]);
    EXPECT_NEAR(m[0][1], closed_form_r2(0.985, 0.985, 0.1).correlation, 3e-3);
    EXPECT_LT(std::abs(m[0][2]), 2e-3);
    EXPECT_LT(std::abs(m[1][2]), 2e-3);
    EXPECT_EQ(cr.find({0, 1})->distance, 1);
    EXPECT_EQ(cr.find({2, 0})->distance, 3);
    auto csv = cr.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "gate_a,gate_b,distance,correlation");

    cfg.subset_list = {{0, 1}};
    auto partial = run_cab_experiment(TargetGate::parallel_cz(6, {0, 1, 2}), d, cfg);
    EXPECT_THROW(correlation_matrix(partial, d), IncompleteReportError);
}

TEST(CorrelationReport, Fluctuation) {
    auto make = [](size_t r) {
        CorrelationReport c;
        c.n_gates = 2;
        c.entries.push_back({{0, 1}, 0.010 + 0.001 * double(r % 2), 1});
        return c;
    };
    auto f = correlation_fluctuation(4, make);
    const auto *e = f.find({0, 1});
    EXPECT_NEAR(e->mean, 0.0105, 1e-15);
    EXPECT_NEAR(e->sd, std::sqrt(4 * 0.0005 * 0.0005 / 3), 1e-15);
    EXPECT_NEAR(e->lower_bound, 0.0105 - 3 * e->sd, 1e-15);
    EXPECT_THROW(correlation_fluctuation(1, make), DomainError);
}
