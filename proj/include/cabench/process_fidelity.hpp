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


#ifndef CABENCH_PROCESS_FIDELITY_HPP
#define CABENCH_PROCESS_FIDELITY_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cabench/dense.hpp"
#include "cabench/density_matrix.hpp"
#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"

namespace cabench {

/// Linear map on n-qubit operators.
using ChannelFn = std::function<Matrix(const Matrix &)>;

inline void check_dense_size(size_t n, const char *who) {
    if (n > 6) throw ResourceError(std::string(who) + ": dense evaluation limited to 6 qubits");
}

/// (1/d^2) sum_ij <i| L(|i><j|) |j>, the overlap of the Choi state with the
/// maximally entangled state.
inline double choi_process_fidelity(const ChannelFn &channel, size_t n) {
    check_dense_size(n, "choi_process_fidelity");
    size_t d = size_t{1} << n;
    cplx acc = 0;
    Matrix e(d);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            e(i, j) = 1.0;
            Matrix out = channel(e);
            acc += out(i, j);
            e(i, j) = 0.0;
        }
    return acc.real() / double(d * d);
}

/// 2^-n tr(P L(P)) for a Hermitian Pauli P.
inline double pauli_eigenvalue(const ChannelFn &channel, const PauliString &p) {
    Matrix pm = pauli_matrix(p);
    Matrix out = channel(pm);
    cplx tr = 0;
    for (size_t i = 0; i < pm.dim; ++i)
        for (size_t k = 0; k < pm.dim; ++k) tr += pm(i, k) * out(k, i);
    return tr.real() / double(pm.dim);
}

/// 4^-n sum_P 2^-n tr(P L(P)).
inline double pauli_process_fidelity(const ChannelFn &channel, size_t n) {
    check_dense_size(n, "pauli_process_fidelity");
    size_t count = size_t{1} << (2 * n);
    double acc = 0;
    for (size_t k = 0; k < count; ++k) acc += pauli_eigenvalue(channel, pauli_from_index(n, k));
    return acc / double(count);
}

/// Channel that pushes an operator through a list of layers on `dev`.
inline ChannelFn layers_channel(const DeviceModel &dev, std::vector<Layer> layers, DmOptions opt = {}) {
    return [&dev, layers = std::move(layers), opt](const Matrix &m) {
        auto rho = DensityMatrix::from_matrix(m);
        for (const auto &l : layers) apply_layer(rho, l, dev, opt);
        return rho.to_matrix();
    };
}

/// Noise channel of a parallel gate layer on its own: the noisy layer
/// followed by the ideal inverse.
inline ChannelFn gate_layer_noise_channel(const DeviceModel &dev, std::vector<int> gates, DmOptions opt = {}) {
    return [&dev, gates = std::move(gates), opt](const Matrix &m) {
        auto rho = DensityMatrix::from_matrix(m);
        apply_gate_layer_noise(rho, dev, gates, opt);
        return rho.to_matrix();
    };
}

}  // namespace cabench

#endif
