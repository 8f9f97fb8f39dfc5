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

#include <cmath>

#include "cabench/optimize.hpp"
#include "test_support.hpp"

using namespace cabench;

namespace {

OptimizeConfig small_config(OptTarget t, size_t iterations) {
    OptimizeConfig c;
    c.target = t;
    c.iterations = iterations;
    c.cab.K_r = 16;
    c.cab.K_s = 1000;
    c.cab.seed = 3;
    c.window_first = 0;
    c.window_last = iterations;
    return c;
}

// Wilson-Hilferty approximation of the chi-square quantile for normal quantile z.
double chi2_quantile(double df, double z) {
    double a = 2.0 / (9.0 * df);
    return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

}  // namespace

TEST(Optimize, WindowStat) {
    auto s = window_stat({1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_EQ(window_stat({}).count, 0u);
    EXPECT_EQ(window_stat({2}).sd, 0.0);
}

TEST(Optimize, CorrelationGroups) {
    auto g = detail::correlation_groups({0, 1, 2});
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(g[1], (std::vector<int>{0, 2}));
    EXPECT_EQ(g[2], (std::vector<int>{1, 2}));
    EXPECT_EQ(g[3], (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(detail::correlation_groups({0, 1, 2, 3, 4}).size(), 10u);
}

TEST(Optimize, ParameterNames) {
    EXPECT_EQ(gate_param_from_string("coupler"), GateParam::coupler);
    EXPECT_THROW(gate_param_from_string("amplitude"), ConfigError);
}

TEST(Optimize, TargetIsIterativeMinusReference) {
    auto d = testdev::line(2, 0.98, 0.998);
    d.gates[0].control = {0.2, 0.1, 0, 0};
    auto tr = optimize_parallel_cz(d, {0, 1}, small_config(OptTarget::global, 12));
    ASSERT_EQ(tr.iterations.size(), 12u);
    EXPECT_EQ(tr.parameter_names.size(), 8u);  // 2n for n = 4
    EXPECT_EQ(tr.parameter_names[0], "g0.dyn_i");
    EXPECT_EQ(tr.parameter_names[7], "g1.coupler");
    for (const auto &s : tr.iterations) EXPECT_EQ(s.target, s.iterative - s.reference);
    // The first evaluation is the initial simplex vertex: identical parameters, identical seeds.
    EXPECT_EQ(tr.iterations[0].target, 0.0);
    EXPECT_EQ(tr.iterations[0].params, tr.initial_params);
    auto csv = tr.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find(',', 10)), "iteration,g0.dyn_i");
}

TEST(Optimize, AlreadyOptimalDevice) {
    auto d = testdev::line(1, 0.98, 0.998);
    auto cfg = small_config(OptTarget::global, 25);
    cfg.parameters = {GateParam::cond_phase};
    cfg.initial_step = 0.05;
    auto tr = optimize_parallel_cz(d, {0}, cfg);
    for (const auto &s : tr.iterations) {
        double se = std::hypot(s.reference_se, s.iterative_se);
        EXPECT_LT(s.target, 3 * se + 1e-12);  // nothing to gain beyond noise
        EXPECT_LT(std::abs(s.params[0]), 0.2);
    }
    EXPECT_LT(std::abs(tr.best_params[0]), 0.1);
}

TEST(Optimize, GlobalTargetRemovesControlError) {
    auto d = testdev::line(1, 0.99, 0.999);
    d.gates[0].control = {0.5, 0, 0, 0};
    auto cfg = small_config(OptTarget::global, 40);
    cfg.parameters = {GateParam::cond_phase};
    cfg.initial_step = 0.2;
    auto tr = optimize_parallel_cz(d, {0}, cfg);
    EXPECT_LT(std::abs(tr.best_params[0]), 0.15);
    auto late = tr.compute_window(30, 39);
    EXPECT_GT(late.iterative.mean, late.reference.mean + 0.03);
}

TEST(Optimize, LocalTargetsRunPerGate) {
    auto d = testdev::line(2, 0.99, 0.999);
    d.gates[0].control = {0.5, 0, 0, 0};
    d.gates[1].control = {-0.4, 0, 0, 0};
    auto cfg = small_config(OptTarget::local, 40);
    cfg.parameters = {GateParam::cond_phase};
    cfg.initial_step = 0.2;
    auto tr = optimize_parallel_cz(d, {0, 1}, cfg);
    ASSERT_EQ(tr.best_params.size(), 2u);
    EXPECT_LT(std::abs(tr.best_params[0]), 0.15);
    EXPECT_LT(std::abs(tr.best_params[1]), 0.15);
    ASSERT_EQ(tr.corr_groups.size(), 1u);
    auto w = tr.compute_window(30, 39);
    EXPECT_GT(w.local_iterative[0].mean, w.local_reference[0].mean);
    EXPECT_GT(w.local_iterative[1].mean, w.local_reference[1].mean);
}

TEST(Optimize, ReferenceStationarity) {
    // Drift-free device: reference fluctuations across iterations come from
    // sequence and shot sampling only, which the reported SE describes.
    auto d = example_device_4q();
    auto cfg = small_config(OptTarget::global, 40);
    cfg.parameters = {GateParam::cond_phase};
    auto tr = optimize_parallel_cz(d, {0, 1}, cfg);
    std::vector<double> ref, se2;
    for (const auto &s : tr.iterations) {
        ref.push_back(s.reference);
        se2.push_back(s.reference_se * s.reference_se);
    }
    auto st = window_stat(ref);
    double mean_se2 = window_stat(se2).mean;
    double df = double(ref.size() - 1);
    double chi2 = df * st.sd * st.sd / mean_se2;
    EXPECT_GT(chi2, chi2_quantile(df, -3.0));
    EXPECT_LT(chi2, chi2_quantile(df, 3.0));
}

TEST(Optimize, AntagonismWitness) {
    // gamma23 > pi/4: lowering gamma12 raises F1 and lowers F2.
    double g13 = 0.1, g23 = 1.0;
    ASSERT_LT(std::pow(std::cos(g23), 2) - std::pow(std::sin(g23), 2), 0.0);
    for (double g12 : {0.2, 0.4, 0.6}) {
        auto hi = closed_form_r3(0.95, 0.95, 0.95, g12, g13, g23);
        auto lo = closed_form_r3(0.95, 0.95, 0.95, g12 - 0.05, g13, g23);
        EXPECT_GT(lo.f1, hi.f1);
        EXPECT_LT(lo.f2, hi.f2);
    }
}

TEST(Optimize, Validation) {
    auto d = testdev::line(1, 0.99, 0.999);
    auto cfg = small_config(OptTarget::global, 0);
    EXPECT_THROW(optimize_parallel_cz(d, {0}, cfg), ConfigError);
    cfg = small_config(OptTarget::global, 5);
    cfg.parameters.clear();
    EXPECT_THROW(optimize_parallel_cz(d, {0}, cfg), ConfigError);
    cfg = small_config(OptTarget::global, 5);
    EXPECT_THROW(optimize_parallel_cz(d, {}, cfg), ConfigError);
}
