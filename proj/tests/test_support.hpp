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

// Small device builders shared by the test binaries.

#ifndef CABENCH_TESTS_TEST_SUPPORT_HPP
#define CABENCH_TESTS_TEST_SUPPORT_HPP

#include <vector>

#include "cabench/device.hpp"

namespace testdev {

/// `g` gates on pairs (0,1), (2,3), ... in a line; coupled qubit = first of pair.
inline cabench::DeviceModel line(size_t g, double p = 1.0, double local = 1.0, cabench::Readout ro = {}) {
    cabench::DeviceModel d;
    d.name = "line";
    d.n_qubits = 2 * g;
    for (size_t q = 0; q + 1 < 2 * g; ++q) d.layout.emplace_back(int(q), int(q + 1));
    for (size_t k = 0; k < g; ++k) {
        cabench::GateSpec s;
        s.pair = {int(2 * k), int(2 * k + 1)};
        s.depol_p = p;
        s.coupled_qubit = int(2 * k);
        d.gates.push_back(s);
    }
    d.readout.assign(2 * g, ro);
    d.single_qubit_depol.assign(2 * g, local);
    return d;
}

inline std::vector<int> all_gates(const cabench::DeviceModel &d) {
    std::vector<int> r;
    for (size_t k = 0; k < d.gates.size(); ++k) r.push_back(int(k));
    return r;
}

}  // namespace testdev

#endif
