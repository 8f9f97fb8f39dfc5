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
#include "cabench/oracle.hpp"
#include "test_support.hpp"

using namespace cabench;

namespace {

CabConfig dm_exact(size_t K_r, uint64_t seed = 1) {
    CabConfig c;
    c.backend = Backend::dm;
    c.K_s = 0;
    c.K_r = K_r;
    c.seed = seed;
    return c;
}

DeviceModel clean(size_t g, double p = 1.0) {
    auto d = testdev::line(g, p);
    d.single_qubit_noise = false;
    return d;
}

}  // namespace

TEST(CabSequence, DepthZeroIsFrameOnly) {
    auto d = clean(2);
    auto u = TargetGate::parallel_cz(4, {0, 1});
    Rng rng(1);
    auto seq = build_cab_sequence(u, d, 0, rng);
    ASSERT_EQ(seq.layers.size(), 3u);
    EXPECT_TRUE(std::holds_alternative<LocalCliffordLayer>(seq.layers[0]));
    auto &closing = std::get<PauliLayer>(seq.layers[1]);
    EXPECT_TRUE(closing.closing);
    EXPECT_TRUE(closing.pauli.is_identity_up_to_phase());
    EXPECT_TRUE(seq.closes(d));
}

TEST(CabSequence, IdentityPaulisGiveUThenInverse) {
    auto d = clean(2);
    auto u = TargetGate::parallel_cz(4, {0, 1});
    Rng rng(3);
    auto c = sample_local_clifford(4, rng);
    std::vector<PauliString> ps(2, PauliString(4));
    auto seq = assemble_cab_sequence(u, u.tableau(d), c, ps, 1);
    ASSERT_EQ(seq.layers.size(), 7u);
    EXPECT_TRUE(std::holds_alternative<GateLayer>(seq.layers[2]));
    EXPECT_TRUE(std::holds_alternative<GateLayer>(seq.layers[4]));
    EXPECT_TRUE(std::get<PauliLayer>(seq.layers[5]).pauli.is_identity_up_to_phase());
    EXPECT_TRUE(seq.closes(d));
}

TEST(CabSequence, RandomSequencesClose) {
    auto d = clean(2);
    TargetGate u{"dressed", 4, {LocalCliffordLayer(std::vector<uint8_t>{1, 5, 9, 13}), GateLayer{{0, 1}}, LocalCliffordLayer(std::vector<uint8_t>{2, 0, 7, 3})}};
    Rng rng(7);
    for (int t = 0; t < 50; ++t) EXPECT_TRUE(build_cab_sequence(u, d, 2, rng).closes(d));
}

TEST(Observables, MarginalFrequencies) {
    Rng rng(2);
    auto one = sample_observables(1, 40000, rng);
    double f = 0;
    for (auto &w : one) f += w.get(0);
    EXPECT_NEAR(f / 40000, 0.75, 0.01);
    auto two = sample_observables(2, 40000, rng);
    double both = 0, wsum = 0;
    for (auto &w : two) {
        both += w.get(0) && w.get(1);
        wsum += double(w.popcount());
    }
    EXPECT_NEAR(both / 40000, 9.0 / 16, 0.01);
    EXPECT_NEAR(wsum / 40000, 1.5, 0.02);
    EXPECT_THROW(sample_observables(2, 0, rng), DomainError);
}

TEST(Survival, HandArithmetic) {
    ShotAccumulator acc(2);
    acc.add(BitVector::from_string("00"), 60);
    acc.add(BitVector::from_string("11"), 40);
    auto c = acc.finish();
    EXPECT_NEAR(survival_probability(c, BitVector::from_string("01")), 0.2, 1e-15);
    EXPECT_NEAR(survival_probability(c, BitVector::from_string("11")), 1.0, 1e-15);
    ShotAccumulator zero(3);
    zero.add(BitVector(3), 500);
    EXPECT_EQ(survival_probability(zero.finish(), BitVector::from_string("101")), 1.0);
}

TEST(Fit, TwoPointExact) {
    auto r = fit_quality_parameter({{0, 0.8, 0}, {2, 0.52488, 0}});
    EXPECT_NEAR(r.lambda, 0.9, 1e-12);
    EXPECT_FALSE(r.flagged);
    EXPECT_NEAR(fit_quality_parameter({{0, 0.7, 0}, {1, 0.7, 0}}).lambda, 1.0, 1e-15);
}

TEST(Fit, ThreeDepthSynthetic) {
    Rng rng(5);
    std::normal_distribution<double> noise(0.0, 1e-4);
    const double A = 0.95, lam = 0.97;
    std::vector<DecayPoint> pts;
    for (int m : {0, 1, 2}) pts.push_back({double(m), A * std::pow(lam, 2 * m) + noise(rng), 1e-4});
    auto r = fit_quality_parameter(pts);
    EXPECT_NEAR(r.lambda, lam, 3 * r.se);
    EXPECT_GT(r.se, 0);
}

TEST(Fit, NonPositiveRatioIsFlagged) {
    auto r = fit_quality_parameter({{0, 0.5, 0.01}, {2, -0.1, 0.01}});
    EXPECT_TRUE(r.flagged);
    EXPECT_THROW(fit_quality_parameter({{0, 0.0, 0}, {2, 0.1, 0}}), FitError);
    EXPECT_THROW(fit_quality_parameter({{1, 0.5, 0}, {1, 0.4, 0}}), FitError);
    EXPECT_THROW(fit_quality_parameter({{0, std::nan(""), 0}, {1, 0.4, 0}}), FitError);
}

TEST(Fit, FlaggedObservablesAreExcludedAndCounted) {
    std::vector<BitVector> obs{BitVector::from_string("10"), BitVector::from_string("01"), BitVector::from_string("11")};
    // Two sequences, two depths; observable 2 has a sign-flipped decay.
    detail::SurvivalTensor s{{{0.9, 0.8, 0.5}, {0.9, 0.8, 0.5}}, {{0.729, 0.648, -0.2}, {0.729, 0.648, -0.2}}};
    auto est = detail::estimate_from_survivals(s, obs, {1, 1, 1}, {0, 1}, ObservableMode::sample,
                                               FidelityKind::dressed, 3);
    EXPECT_EQ(est.meta.excluded_flagged, 1u);
    EXPECT_TRUE(est.quality_params[2].flagged);
    EXPECT_NEAR(est.value, 0.9, 1e-12);
    EXPECT_EQ(est.meta.flag_policy, "exclude");
}

TEST(KqForAccuracy, Examples) {
    EXPECT_EQ(kq_for_accuracy(0.1, 0.05), 738u);
    EXPECT_EQ(kq_for_accuracy(1.0, 2.0 / std::exp(2.0)), 4u);
    EXPECT_THROW(kq_for_accuracy(0.0, 0.5), DomainError);
    EXPECT_THROW(kq_for_accuracy(1.5, 0.5), DomainError);
    EXPECT_THROW(kq_for_accuracy(0.5, 1.0), DomainError);
}

TEST(Interleaved, Examples) {
    FidelityEstimate d, t;
    d.value = 0.9548;
    t.value = 0.9897;
    auto r = interleaved_pure_fidelity(d, t, 4);
    EXPECT_NEAR(r.value, 0.9647, 3e-4);
    EXPECT_EQ(r.se, 0.0);
    t.value = 1.0;
    EXPECT_NEAR(interleaved_pure_fidelity(d, t, 4).value, 0.9548, 1e-14);
    t.value = 1.0 / 256;
    EXPECT_THROW(interleaved_pure_fidelity(d, t, 4), DomainError);
    // Error propagation against the closed form.
    d.value = 0.95;
    d.se = 0.002;
    t.value = 0.99;
    t.se = 0.001;
    r = interleaved_pure_fidelity(d, t, 2);
    double inv = 1.0 / 16;
    double expect = (r.value - inv) * std::hypot(0.002 / (0.95 - inv), 0.001 / (0.99 - inv));
    EXPECT_NEAR(r.se, expect, 1e-15);
}

TEST(Config, Validation) {
    CabConfig c;
    c.depths = {1, 1};
    EXPECT_THROW(c.validate(), ConfigError);
    c = CabConfig{};
    c.K_s = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = CabConfig{};
    c.mode = ObservableMode::sample;
    EXPECT_THROW(c.validate(), ConfigError);
    c = CabConfig{};
    c.K_r = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CabEstimate, PerfectDeviceGivesOne) {
    auto d = clean(2);
    auto cfg = dm_exact(5);
    auto rep = run_cab_experiment(TargetGate::parallel_cz(4, {0, 1}), d, cfg);
    EXPECT_NEAR(rep.dressed.value, 1.0, 1e-12);
    EXPECT_NEAR(rep.twirl.value, 1.0, 1e-12);
    EXPECT_NEAR(rep.pure.value, 1.0, 1e-12);
    EXPECT_NEAR(rep.dressed.se, 0.0, 1e-12);
    ASSERT_EQ(rep.subsets.size(), 2u);
    EXPECT_NEAR(rep.subset({1})->dressed.value, 1.0, 1e-12);
}

TEST(CabEstimate, TwoQubitDepolarizing) {
    auto d = clean(1, 0.9);
    CabConfig cfg;
    cfg.K_r = 20;
    cfg.K_s = 20000;
    cfg.run_twirl = false;
    auto rep = run_cab_experiment(TargetGate::parallel_cz(2, {0}), d, cfg);
    EXPECT_NEAR(rep.dressed.value, 0.90625, 3 * rep.dressed.se);
    for (const auto &qp : rep.dressed.quality_params)
        if (qp.w.any()) {
            EXPECT_NEAR(qp.lambda, 0.9, 0.01);
        }
}

TEST(CabEstimate, CoupledMarginalIsCosSquared) {
    auto d = clean(2);
    d.couplings.set(0, 1, 0.1);
    auto cfg = dm_exact(30);
    cfg.run_twirl = false;
    auto rep = run_cab_experiment(TargetGate::parallel_cz(4, {0, 1}), d, cfg);
    auto s = rep.subset({0});
    ASSERT_NE(s, nullptr);
    double se = std::max(s->dressed.se, 1e-9);
    EXPECT_NEAR(s->dressed.value, std::pow(std::cos(0.1), 2), 3 * se);
}

TEST(CabEstimate, ProductLawWithoutCoupling) {
    auto d = testdev::line(2, 0.96, 0.995);
    d.gates[1].depol_p = 0.93;
    CabConfig cfg;
    cfg.K_r = 30;
    cfg.K_s = 5000;
    cfg.run_twirl = false;
    cfg.subset_list = {{0}, {1}, {0, 1}};
    auto rep = run_cab_experiment(TargetGate::parallel_cz(4, {0, 1}), d, cfg);
    const auto &a = rep.subset({0})->dressed, &b = rep.subset({1})->dressed, &ab = rep.subset({0, 1})->dressed;
    double se = std::sqrt(ab.se * ab.se + std::pow(b.value * a.se, 2) + std::pow(a.value * b.se, 2));
    EXPECT_NEAR(ab.value, a.value * b.value, 3 * se);
    EXPECT_NEAR(ab.value, rep.dressed.value, 1e-12);
}

TEST(CabEstimate, MatchesOracleOnExampleDevice) {
    auto d = example_device_4q();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    auto cfg = dm_exact(40, 4);
    auto rep = run_cab_experiment(u, d, cfg);
    CabOracle o(u, d);
    EXPECT_NEAR(rep.dressed.value, o.dressed(), 3 * rep.dressed.se);
    EXPECT_NEAR(rep.twirl.value, o.twirl(), 3 * rep.twirl.se);
    EXPECT_NEAR(rep.pure.value, o.pure(), 3 * rep.pure.se);
    EXPECT_NEAR(rep.subset({0})->pure.value, o.pure({0, 1}), 3 * rep.subset({0})->pure.se);
}

TEST(CabEstimate, TraverseAndSampleAgree) {
    auto d = example_device_4q();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    auto cfg = dm_exact(20, 6);
    auto data = run_cab_sequences(u, d, cfg, kTagSequences);
    auto trav = estimate_fidelity(data, cfg);
    cfg.mode = ObservableMode::sample;
    cfg.K_q = 1000;
    auto samp = estimate_fidelity(data, cfg);
    EXPECT_EQ(samp.quality_params.size(), 1000u);
    EXPECT_EQ(samp.meta.mode, "sample");
    EXPECT_GT(samp.meta.se_observable_sampling, 0.0);
    EXPECT_LT(std::abs(trav.value - samp.value), 3 * samp.se);
}

TEST(CabEstimate, ReadoutErrorIsAbsorbed) {
    auto d = testdev::line(2, 0.97, 0.997);
    d.couplings.set(0, 1, 0.08);
    auto u = TargetGate::parallel_cz(4, {0, 1});
    CabConfig cfg;
    cfg.K_r = 30;
    cfg.K_s = 5000;
    cfg.run_twirl = false;
    auto base = run_cab_experiment(u, d, cfg).dressed;
    d.readout.assign(4, Readout{0.05, 0.05});
    auto spam = run_cab_experiment(u, d, cfg).dressed;
    EXPECT_LT(std::abs(base.value - spam.value), 3 * std::hypot(base.se, spam.se));
}

// Local depolarizing noise alone gives identical decays for every sequence,
// so the exact twirl-run estimate equals the oracle up to rounding once the
// readout is symmetrized; without it the asymmetric confusion leaks
// lower-weight decays into each observable.
TEST(CabEstimate, ReadoutTwirlRemovesAsymmetricBias) {
    auto d = example_device_4q();
    auto cfg = dm_exact(4, 5);
    auto id = TargetGate::identity(4);
    CabOracle o(id, d);
    auto twirled = estimate_fidelity(run_cab_sequences(id, d, cfg, kTagTwirlRun), cfg);
    EXPECT_NEAR(twirled.value, o.twirl(), 1e-10);
    cfg.readout_twirl = false;
    auto raw = estimate_fidelity(run_cab_sequences(id, d, cfg, kTagTwirlRun), cfg);
    EXPECT_GT(raw.value - o.twirl(), 1e-4);
}

TEST(CabEstimate, AsymmetricReadoutIsAbsorbed) {
    auto d = testdev::line(2, 0.97, 0.997);
    d.couplings.set(0, 1, 0.08);
    auto u = TargetGate::parallel_cz(4, {0, 1});
    CabConfig cfg;
    cfg.K_r = 30;
    cfg.K_s = 5000;
    cfg.run_twirl = false;
    auto base = run_cab_experiment(u, d, cfg).dressed;
    d.readout.assign(4, Readout{0.01, 0.05});
    auto spam = run_cab_experiment(u, d, cfg).dressed;
    EXPECT_LT(std::abs(base.value - spam.value), 3 * std::hypot(base.se, spam.se));
}

// With fixed sequences, finite-shot estimates approach the exact-distribution
// estimate of the same sequences as K_s grows.
TEST(CabEstimate, ConsistentInShots) {
    auto d = example_device_4q();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    auto cfg = dm_exact(10, 2);
    cfg.run_twirl = false;
    double exact = run_cab_experiment(u, d, cfg).dressed.value;
    std::vector<double> err;
    for (uint64_t ks : {1000u, 10000u, 100000u}) {
        double acc = 0;
        for (uint64_t s = 0; s < 4; ++s) {
            auto c = cfg;
            c.K_s = ks;
            // Same sequences (seed) each time; shot noise depends on K_s.
            auto data = run_cab_sequences(u, d, c, kTagSequences);
            acc += std::abs(estimate_fidelity(data, c).value - exact);
            c.seed = cfg.seed;
        }
        err.push_back(acc / 4);
    }
    EXPECT_GT(err[0], err[1]);
    EXPECT_GT(err[1], err[2]);
    EXPECT_LT(err[2], 1e-3);
}

TEST(CabEstimate, IndependentOfThreadCount) {
    auto d = example_device_4q();
    auto u = TargetGate::parallel_cz(4, {0, 1});
    CabConfig cfg;
    cfg.K_r = 8;
    cfg.K_s = 2000;
    cfg.run_twirl = false;
    cfg.threads = 1;
    auto a = run_cab_experiment(u, d, cfg).dressed;
    cfg.threads = 4;
    auto b = run_cab_experiment(u, d, cfg).dressed;
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.se, b.se);
}

TEST(CabEstimate, RejectsBadInputs) {
    auto d = testdev::line(2);
    CabConfig cfg;
    EXPECT_THROW(run_cab_sequences(TargetGate::parallel_cz(6, {0}), d, cfg, kTagSequences), DimensionError);
    TargetGate bad{"bad", 4, {RotationLayer{}}};
    EXPECT_THROW(run_cab_sequences(bad, d, cfg, kTagSequences), UnsupportedError);
    auto data = run_cab_sequences(TargetGate::parallel_cz(4, {0}), d, dm_exact(2), kTagSequences);
    EXPECT_THROW(subset_fidelity(data, {0, 1, 2, 3, 4, 5, 6, 7, 8}), ResourceError);
}
