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

#include "cabench/cab.hpp"
#include "cabench/density_matrix.hpp"
#include "cabench/oracle.hpp"
#include "cabench/process_fidelity.hpp"
#include "cabench/stabilizer.hpp"
#include "oracle_util.hpp"
#include "test_support.hpp"

using namespace cabench;

namespace {

DeviceModel noisy_pair_device() {
    auto d = testdev::line(2, 0.97, 0.995, Readout{0.01, 0.03});
    d.couplings.set(0, 1, 0.2);
    d.gates[0].control = {0.05, 0.02, -0.03, 0.0};
    return d;
}

}  // namespace

TEST(DensityMatrix, IdealClosedSequenceReturnsZero) {
    auto d = testdev::line(2);
    auto u = TargetGate::parallel_cz(4, {0, 1});
    Rng rng(5);
    DmOptions ideal;
    ideal.noisy = false;
    for (int t = 0; t < 10; ++t) {
        auto seq = build_cab_sequence(u, d, 3, rng);
        auto p = dm_run(seq, d, ideal);
        EXPECT_NEAR(p[0], 1.0, 1e-12);
    }
}

TEST(DensityMatrix, CzMatchesDenseOracle) {
    auto d = testdev::line(1);
    DmOptions ideal;
    ideal.noisy = false;
    Rng rng(3);
    std::normal_distribution<double> g;
    Matrix a(4);
    for (auto &v : a.a) v = cplx(g(rng), g(rng));
    Matrix rho = a * a.dagger();
    auto dm = DensityMatrix::from_matrix(rho);
    apply_layer(dm, GateLayer{{0}}, d, ideal);
    auto cz = oracle::cz(2, 0, 1);
    EXPECT_LT(dm.to_matrix().max_abs_diff(cz * rho * cz.dagger()), 1e-12);
}

TEST(DensityMatrix, PauliMatchesDenseOracle) {
    Rng rng(4);
    std::normal_distribution<double> g;
    Matrix a(8);
    for (auto &v : a.a) v = cplx(g(rng), g(rng));
    Matrix rho = a * a.dagger();
    for (int t = 0; t < 10; ++t) {
        auto p = sample_random_pauli(3, rng);
        auto dm = DensityMatrix::from_matrix(rho);
        dm.apply_pauli(p);
        Matrix pm = pauli_matrix(p);
        EXPECT_LT(dm.to_matrix().max_abs_diff(pm * rho * pm.dagger()), 1e-12);
    }
}

TEST(DensityMatrix, LimitsAndRejections) {
    auto d = testdev::line(7);
    CircuitSequence seq{14, {}};
    EXPECT_THROW(dm_run(seq, d), ResourceError);
    auto small = testdev::line(1);
    CircuitSequence wrong{3, {}};
    EXPECT_THROW(dm_run(wrong, small), DimensionError);
    EXPECT_THROW(check_dense_size(7, "x"), ResourceError);
}

TEST(DensityMatrix, ReadoutConfusionOnZeroState) {
    auto d = testdev::line(1, 1.0, 1.0, Readout{0.1, 0.2});
    CircuitSequence seq{2, {}};
    auto p = dm_run(seq, d);
    EXPECT_NEAR(p[0], 0.81, 1e-14);
    EXPECT_NEAR(p[1], 0.09, 1e-14);
    EXPECT_NEAR(p[2], 0.09, 1e-14);
    EXPECT_NEAR(p[3], 0.01, 1e-14);
}

TEST(Stabilizer, IdealShotsAreZero) {
    auto d = testdev::line(2);
    for (auto &q : d.single_qubit_depol) q = 1.0;
    auto u = TargetGate::parallel_cz(4, {0, 1});
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        auto seq = build_cab_sequence(u, d, 2, rng);
        EXPECT_FALSE(stab_run_shot(seq, d, rng).any());
    }
}

TEST(Stabilizer, RejectsOpenSequencesAndRotations) {
    auto d = testdev::line(1);
    CircuitSequence open{2, {GateLayer{{0}}, PauliLayer{PauliString::from_string("XI"), false}}};
    Rng rng(1);
    EXPECT_THROW(stab_run_shot(open, d, rng), ContractViolation);
    CircuitSequence rot{2, {RotationLayer{0, {1, 0, 0, 1}}}};
    CompiledNoise noise(d);
    PauliFrameSimulator sim(noise);
    EXPECT_THROW(sim.run_shot(rot, rng), UnsupportedError);
}

// Per-observable survival of the stabilizer backend equals the exact
// distribution of the twirled-noise density matrix, sequence by sequence.
TEST(Stabilizer, AgreesWithTwirledDensityMatrix) {
    auto d = noisy_pair_device();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    DmOptions tw;
    tw.coherent = false;
    Rng rng(11);
    CompiledNoise noise(d);
    const uint64_t shots = 40000;
    int checked = 0;
    for (int t = 0; t < 6; ++t) {
        auto seq = build_cab_sequence(u, d, size_t(1 + t % 3), rng);
        noise.prepare(seq);
        auto exact = OutcomeTable::from_probabilities(dm_run(seq, d, tw), 4);
        auto counts = OutcomeTable::from_counts(stab_run(seq, noise, shots, rng));
        auto se = subset_survivals(exact, {0, 1, 2, 3});
        auto ss = subset_survivals(counts, {0, 1, 2, 3});
        for (size_t y = 1; y < 16; ++y) {
            double sd = std::sqrt(std::max(1e-6, 1 - se[y] * se[y]) / double(shots));
            EXPECT_NEAR(ss[y], se[y], 5 * sd) << "seq " << t << " obs " << y;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 90);
}

TEST(Stabilizer, SameSeedSameCounts) {
    auto d = noisy_pair_device();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    Rng g(2);
    auto seq = build_cab_sequence(u, d, 2, g);
    CompiledNoise noise(d);
    noise.prepare(seq);
    Rng a = make_stream(7, {kTagShots}), b = make_stream(7, {kTagShots});
    auto ca = stab_run(seq, noise, 5000, a), cb = stab_run(seq, noise, 5000, b);
    EXPECT_EQ(ca.words, cb.words);
    EXPECT_EQ(ca.counts, cb.counts);
}

TEST(Shots, SampleCountsMatchesDistribution) {
    std::vector<double> p{0.5, 0.25, 0.125, 0.125};
    Rng rng(3);
    auto c = sample_counts(p, 2, 80000, rng);
    EXPECT_EQ(c.total, 80000u);
    auto t = OutcomeTable::from_counts(c);
    auto m = t.marginal({0, 1});
    for (size_t x = 0; x < 4; ++x) EXPECT_NEAR(m[x], p[x], 5 * std::sqrt(p[x] * (1 - p[x]) / 80000));
    std::vector<double> big(2, 0.5);
    EXPECT_THROW(sample_counts(big, 64, 10, rng), ResourceError);
}

TEST(Shots, SubsetSurvivalsMatchDirectSums) {
    std::vector<double> p(16);
    Rng rng(8);
    double s = 0;
    for (auto &v : p) s += (v = uniform01(rng));
    for (auto &v : p) v /= s;
    auto t = OutcomeTable::from_probabilities(p, 4);
    std::vector<int> qs{3, 1};
    auto surv = subset_survivals(t, qs);
    for (size_t y = 0; y < 4; ++y) {
        BitVector w(4);
        w.set(3, y & 1);
        w.set(1, y & 2);
        EXPECT_NEAR(surv[y], survival_probability(t, w), 1e-14);
        double direct = 0;
        for (size_t x = 0; x < 16; ++x) {
            int par = ((y & 1) && (x >> 3 & 1)) ^ ((y & 2) && (x >> 1 & 1));
            direct += (par ? -1 : 1) * p[x];
        }
        EXPECT_NEAR(surv[y], direct, 1e-14);
    }
}

TEST(ProcessFidelity, ChoiMatchesPauliForm) {
    auto d = noisy_pair_device();
    auto ch = gate_layer_noise_channel(d, {0, 1});
    EXPECT_NEAR(choi_process_fidelity(ch, 4), pauli_process_fidelity(ch, 4), 1e-12);
}

TEST(Oracle, ZeroNoiseIsOne) {
    auto d = testdev::line(2);
    for (auto &q : d.single_qubit_depol) q = 1.0;
    CabOracle o(TargetGate::parallel_cz(4, {0, 1}), d);
    EXPECT_NEAR(o.dressed(), 1.0, 1e-12);
    EXPECT_NEAR(o.twirl(), 1.0, 1e-12);
    EXPECT_NEAR(o.pure(), 1.0, 1e-12);
}

TEST(Oracle, PureDepolarizingGateFidelity) {
    // Only gate depolarizing noise: the pure fidelity per gate pair is
    // p + (1 - p)/16 and the global value is the product.
    const double p = 0.95;
    auto d = testdev::line(2, p);
    for (auto &q : d.single_qubit_depol) q = 1.0;
    CabOracle o(TargetGate::parallel_cz(4, {0, 1}), d);
    double f1 = p + (1 - p) / 16;
    EXPECT_NEAR(o.pure(), f1 * f1, 1e-12);
    EXPECT_NEAR(o.pure({0, 1}), f1, 1e-12);
    EXPECT_NEAR(o.twirl(), 1.0, 1e-12);
}

TEST(Stabilizer, ReadoutTwirlSymmetrizesConfusion) {
    auto d = testdev::line(1, 1.0, 1.0, Readout{0.02, 0.10});
    CircuitSequence seq{2, {LocalCliffordLayer(2)}};
    CompiledNoise noise(d, CompiledNoise::Options{true, true});
    noise.prepare(seq);
    Rng rng(12);
    const uint64_t shots = 200000;
    auto t = OutcomeTable::from_counts(stab_run(seq, noise, shots, rng));
    DmOptions opt;
    opt.readout_twirl = true;
    auto exact = OutcomeTable::from_probabilities(dm_run(seq, d, opt), 2);
    auto m = t.marginal({0, 1}), e = exact.marginal({0, 1});
    EXPECT_NEAR(e[1], 0.06 * 0.94, 1e-14);
    for (size_t x = 0; x < 4; ++x) EXPECT_NEAR(m[x], e[x], 5 * std::sqrt(e[x] * (1 - e[x]) / shots));
}
