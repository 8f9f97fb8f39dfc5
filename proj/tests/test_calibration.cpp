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
#include <numbers>

#include "cabench/calibration.hpp"
#include "test_support.hpp"

using namespace cabench;

namespace {

constexpr double kPi = std::numbers::pi;

DeviceModel one_gate(ControlParams c = {}, double depol = 0.98) {
    auto d = testdev::line(1, depol, 0.998, Readout{0.01, 0.03});
    d.gates[0].control = c;
    return d;
}

CliffordTableau word_tableau(const Clifford2QWord &w) {
    CliffordTableau t(2);
    for (size_t s = 0; s < w.locals.size(); ++s) {
        if (s > 0) t = t.then(CliffordTableau::cz(2, 0, 1));
        t = t.then(CliffordTableau::local(LocalCliffordLayer(std::vector<uint8_t>{w.locals[s][0], w.locals[s][1]})));
    }
    return t;
}

}  // namespace

TEST(Clifford2Q, GroupStructure) {
    const auto &g = Clifford2QGroup::get();
    ASSERT_EQ(g.size(), 11520u);
    auto h = g.cz_histogram();
    EXPECT_EQ(h[0], 576u);
    EXPECT_EQ(h[1], 5184u);
    EXPECT_EQ(h[2], 5184u);
    EXPECT_EQ(h[3], 576u);
    for (size_t i = 0; i < g.size(); i += 7) {
        EXPECT_EQ(word_tableau(g.word(i)), g.tableau(i));
        EXPECT_TRUE(g.tableau(i).is_valid());
    }
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        size_t a = g.sample(rng), b = g.sample(rng);
        auto c = g.tableau(a).then(g.tableau(b));
        EXPECT_EQ(g.tableau(g.index_of(c)), c);
        EXPECT_TRUE(g.tableau(a).then(g.tableau(g.index_of(g.tableau(a).inverse()))).is_identity());
    }
    EXPECT_THROW(g.index_of(CliffordTableau(3)), DimensionError);
}

TEST(Calibration, WrapPhase) {
    EXPECT_NEAR(wrap_phase(kPi), kPi, 1e-15);
    EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-15);
    EXPECT_NEAR(wrap_phase(kPi + 0.2), -kPi + 0.2, 1e-15);
    EXPECT_NEAR(wrap_phase(7.0), 7.0 - 2 * kPi, 1e-15);
}

TEST(Calibration, ConditionalPhaseIdeal) {
    auto r = measure_conditional_phase(one_gate(), 0, uniform_phase_grid(16));
    EXPECT_NEAR(std::abs(r.phi), kPi, 1e-6);
    EXPECT_LT(r.residual, 1e-9);
}

TEST(Calibration, ConditionalPhaseOffset) {
    auto d = one_gate({0.2, 0.1, -0.3, 0});
    d.single_qubit_noise = false;
    auto r = measure_conditional_phase(d, 0, uniform_phase_grid(16));
    EXPECT_NEAR(wrap_phase(r.phi - kPi - 0.2), 0.0, 1e-6);
    EXPECT_NEAR(r.phi_I, 0.1, 1e-6);  // the scanned qubit's dynamic phase
    // A noisy X_pi leaves the partner in |0> with small probability, which
    // mixes in the U = I fringe and pulls phi_x slightly.
    auto noisy = measure_conditional_phase(one_gate({0.2, 0.1, -0.3, 0}), 0, uniform_phase_grid(16));
    EXPECT_NEAR(wrap_phase(noisy.phi - kPi - 0.2), 0.0, 1e-3);
}

TEST(Calibration, ConditionalPhaseOfIdentity) {
    // A conditional-phase offset of pi turns the CZ into the identity.
    auto r = measure_conditional_phase(one_gate({kPi, 0, 0, 0}), 0, uniform_phase_grid(12));
    EXPECT_NEAR(r.phi, 0.0, 1e-6);
}

TEST(Calibration, ConditionalPhaseWithShots) {
    CalibrationOptions o;
    o.shots = 20000;
    o.seed = 9;
    auto r = measure_conditional_phase(one_gate({0.2, 0, 0, 0}), 0, uniform_phase_grid(16), o);
    EXPECT_NEAR(wrap_phase(r.phi - kPi - 0.2), 0.0, 0.03);
}

TEST(Calibration, ConditionalPhaseErrors) {
    EXPECT_THROW(measure_conditional_phase(one_gate(), 0, uniform_phase_grid(6)), DomainError);
    CalibrationOptions o;
    o.shots = 50;
    o.max_residual = 1e-3;
    EXPECT_THROW(measure_conditional_phase(one_gate(), 0, uniform_phase_grid(16), o), PoorFitError);
    EXPECT_THROW(measure_conditional_phase(one_gate({}, 0.0), 0, uniform_phase_grid(16)), NoSignalError);
}

TEST(Calibration, DynamicPhase) {
    auto grid = uniform_phase_grid(64);
    double step = 2 * kPi / 64;
    EXPECT_NEAR(calibrate_dynamic_phase(one_gate(), 0, 0, grid), 0.0, 1e-12);
    double c = calibrate_dynamic_phase(one_gate({0, 0.3, 0, 0}), 0, 0, grid);
    EXPECT_LE(std::abs(wrap_phase(c + 0.3)), step / 2 + 1e-12);
    double other = calibrate_dynamic_phase(one_gate({0, 0.3, -1.1, 0}), 0, 0, grid);
    EXPECT_EQ(other, c);
    double second = calibrate_dynamic_phase(one_gate({0, 0.3, -1.1, 0}), 0, 1, grid);
    EXPECT_LE(std::abs(wrap_phase(second - 1.1)), step / 2 + 1e-12);
    EXPECT_THROW(calibrate_dynamic_phase(one_gate({}, 0.0), 0, 0, grid), NoSignalError);
    EXPECT_THROW(calibrate_dynamic_phase(one_gate(), 0, 5, grid), DomainError);
}

TEST(Calibration, FastCalibrationIsIdempotent) {
    auto d = one_gate({0.25, 0.4, -0.35, 0});
    auto grid = uniform_phase_grid(64);
    double step = 2 * kPi / 64;
    auto first = fast_calibrate(d, 0, grid);
    EXPECT_NEAR(first.cond_phase_correction, -0.25, 1e-3);
    EXPECT_LT(std::abs(d.gates[0].control.cond_phase_offset), 1e-3);
    EXPECT_LE(std::abs(d.gates[0].control.dyn_phase_i), step / 2 + 1e-9);
    EXPECT_LE(std::abs(d.gates[0].control.dyn_phase_j), step / 2 + 1e-9);
    auto second = fast_calibrate(d, 0, grid);
    EXPECT_LT(std::abs(second.cond_phase_correction), step);
    EXPECT_LT(std::abs(second.dyn_correction_i), step);
    EXPECT_LT(std::abs(second.dyn_correction_j), step);
}

TEST(BackProbability, SequencesClose) {
    auto d = example_device_4q();
    Rng rng(4);
    for (size_t len : {1, 3, 6}) {
        auto seq = back_probability_sequence(d, {0, 1}, len, rng);
        EXPECT_TRUE(seq.closes(d));
    }
    EXPECT_THROW(back_probability_sequence(d, {0}, 0, rng), DomainError);
}

TEST(BackProbability, PerfectDevice) {
    auto d = testdev::line(2, 1.0, 1.0);
    Rng rng(5);
    auto p = back_probability(d, {0, 1}, 6, 0, rng);
    EXPECT_NEAR(p[0], 1.0, 1e-12);
    EXPECT_NEAR(p[1], 1.0, 1e-12);
    BackProbabilityOptions stab;
    stab.allow_dm = false;
    auto q = back_probability(d, {0, 1}, 6, 1000, rng, stab);
    EXPECT_EQ(q[0], 1.0);
    EXPECT_EQ(q[1], 1.0);
}

TEST(BackProbability, DecaysWithLength) {
    auto d = one_gate({0.05, 0.03, -0.04, 0}, 0.97);
    BackProbabilityOptions o;
    o.sequences = 40;
    double prev = 1.0;
    for (size_t len : {2, 4, 8}) {
        Rng rng(11);
        double p = back_probability(d, 0, len, 0, rng, o);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(BackProbability, ReferenceDifferencing) {
    auto d = example_device_4q();
    Rng a(8), b(8);
    auto ref = back_probability(d, {0, 1}, 4, 2000, a);
    auto iter = back_probability(d, {0, 1}, 4, 2000, b);
    EXPECT_EQ(ref, iter);
    // Same circuits on changed parameters: only the device differs.
    auto worse = d;
    worse.gates[0].control.cond_phase_offset += 0.5;
    Rng c(8), e(8);
    BackProbabilityOptions o;
    o.sequences = 10;
    auto r0 = back_probability(d, {0, 1}, 4, 0, c, o);
    auto r1 = back_probability(worse, {0, 1}, 4, 0, e, o);
    EXPECT_GT(r0[0] - r1[0], 0.01);
    EXPECT_NEAR(r0[1], r1[1], 0.01);
}

TEST(BackProbability, ParallelCalibrationImproves) {
    auto d = example_device_4q();
    d.gates[0].control = {0.3, 0.2, -0.25, 0};
    ParallelCalibrationOptions o;
    o.K_s = 0;
    o.sequences = 6;
    o.length = 6;
    o.iterations = 80;
    o.initial_step = 0.15;
    auto r = parallel_calibrate(d, {0, 1}, o);
    ASSERT_EQ(r.best_params.size(), 2u);
    Rng a(99), b(99);
    BackProbabilityOptions bo;
    bo.sequences = 20;
    auto before = back_probability(d, {0, 1}, 6, 0, a, bo);
    auto after = back_probability(r.device, {0, 1}, 6, 0, b, bo);
    EXPECT_GT(after[0], before[0] + 0.02);
    EXPECT_GT(after[1], before[1] - 0.01);
    EXPECT_EQ(r.steps.size(), 80u);
}
