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

#include "cabench/cycle_benchmarking.hpp"
#include "cabench/oracle.hpp"
#include "test_support.hpp"

using namespace cabench;

TEST(CbSequence, ClosesForCzAndDressedTargets) {
    auto d = testdev::line(2);
    Rng rng(3);
    auto cz = TargetGate::parallel_cz(4, {0, 1});
    auto tab = cz.tableau(d);
    for (int t = 0; t < 20; ++t) {
        auto q = sample_random_pauli(4, rng);
        auto seq = build_cb_sequence(cz, tab, 2, q, size_t(t % 4), rng);
        EXPECT_TRUE(seq.closes(d));
    }
    TargetGate dressed{"h_cz", 2, {LocalCliffordLayer(std::vector<uint8_t>{uint8_t(Clifford1QTable::get().hadamard()), 0}),
                                   GateLayer{{0}}}};
    auto d1 = testdev::line(1);
    auto dt = dressed.tableau(d1);
    auto ord = gate_order(dt);
    ASSERT_TRUE(ord.has_value());
    auto seq = build_cb_sequence(dressed, dt, *ord, PauliString::from_string("XZ"), 2, rng);
    EXPECT_TRUE(seq.closes(d1));
}

TEST(CbSequence, PreparesCharacterEigenstate) {
    // Ideal execution: the parity over supp(Q) survives with certainty.
    auto d = testdev::line(1);
    d.single_qubit_noise = false;
    auto cz = TargetGate::parallel_cz(2, {0});
    Rng rng(4);
    DmOptions ideal;
    ideal.noisy = false;
    for (const char *c : {"XY", "ZI", "YZ"}) {
        auto q = PauliString::from_string(c);
        auto seq = build_cb_sequence(cz, cz.tableau(d), 2, q, 3, rng);
        auto p = dm_run(seq, d, ideal);
        EXPECT_NEAR(p[0], 1.0, 1e-12);
    }
}

TEST(Cb, PerfectDeviceGivesOne) {
    auto d = testdev::line(1);
    d.single_qubit_noise = false;
    CbConfig cfg;
    cfg.K_r = 10;
    cfg.K_s = 200;
    auto est = run_cb_experiment(TargetGate::parallel_cz(2, {0}), d, cfg);
    EXPECT_EQ(est.value, 1.0);
    EXPECT_EQ(est.quality_params.size(), 5u);
}

TEST(Cb, DepolarizingCharactersDecayAtP) {
    auto d = testdev::line(1, 0.95);
    d.single_qubit_noise = false;
    CbConfig cfg;
    cfg.K_r = 10;
    cfg.K_s = 0;
    cfg.backend = Backend::dm;
    cfg.depths = {1, 3};
    auto est = run_cb_experiment(TargetGate::parallel_cz(2, {0}), d, cfg);
    for (const auto &qp : est.quality_params)
        if (qp.w.any()) {
            EXPECT_NEAR(qp.lambda, 0.95, 1e-10);
        }
}

TEST(Cb, RejectsHighOrderTargets) {
    auto d = testdev::line(1);
    TargetGate s{"s", 2, {LocalCliffordLayer(std::vector<uint8_t>{uint8_t(Clifford1QTable::get().phase_s()), 0})}};
    CbConfig cfg;
    cfg.order_cap = 2;
    EXPECT_THROW(run_cb_experiment(s, d, cfg), UnsupportedError);
    cfg = CbConfig{};
    cfg.K_r = 3;
    EXPECT_THROW(run_cb_experiment(TargetGate::parallel_cz(2, {0}), d, cfg), ConfigError);
}

TEST(Cb, AgreesWithCabOnSingleCz) {
    auto d = testdev::line(1, 0.975, 0.997);
    d.couplings = CouplingMap{};
    d.gates[0].control = {0.03, 0.02, -0.02, 0.0};
    auto u = TargetGate::parallel_cz(2, {0});
    CabConfig cab;
    cab.depths = {5, 10};
    cab.K_r = 25;
    cab.K_s = 20000;
    cab.run_twirl = false;
    CbConfig cb;
    cb.characters = 16;
    cb.K_r = 48;
    cb.K_s = 10000;
    auto a = run_cab_experiment(u, d, cab).dressed;
    auto b = run_cb_experiment(u, d, cb);
    EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.se, b.se));
    CabOracle o(u, d);
    EXPECT_NEAR(a.value, o.dressed(), 3 * a.se);
}
