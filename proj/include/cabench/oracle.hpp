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


#ifndef CABENCH_ORACLE_HPP
#define CABENCH_ORACLE_HPP

#include <cmath>
#include <vector>

#include "cabench/circuit.hpp"
#include "cabench/density_matrix.hpp"
#include "cabench/process_fidelity.hpp"

namespace cabench {

/// Exact Pauli eigenvalues of the noise in one CAB half-cycle pair on a
/// small device. For Pauli P and Q = U P U^dagger the survival of P decays
/// per (P, U, P, U^-1) block by mu(P) = pl(P) u(P) pl(Q) v(Q), where pl is
/// the twirling-layer noise, u the noise of U and v the noise of U^-1.
class CabOracle {
   public:
    CabOracle(const TargetGate &target, const DeviceModel &dev, DmOptions opt = {}) : n_(dev.n_qubits) {
        check_dense_size(n_, "CabOracle");
        DmOptions ideal = opt;
        ideal.noisy = false;
        auto tab = target.tableau(dev);
        auto inv = target.inverse_layers();
        std::vector<Layer> pl{PauliLayer{PauliString::identity(n_), false}};
        auto pl_ch = layers_channel(dev, pl, opt);
        // Noise of U: noisy U followed by the ideal U^-1, and conversely.
        auto u_ch = [&](const Matrix &m) {
            auto rho = DensityMatrix::from_matrix(m);
            for (const auto &l : target.layers) apply_layer(rho, l, dev, opt);
            for (const auto &l : inv) apply_layer(rho, l, dev, ideal);
            return rho.to_matrix();
        };
        auto v_ch = [&](const Matrix &m) {
            auto rho = DensityMatrix::from_matrix(m);
            for (const auto &l : inv) apply_layer(rho, l, dev, opt);
            for (const auto &l : target.layers) apply_layer(rho, l, dev, ideal);
            return rho.to_matrix();
        };
        size_t count = size_t{1} << (2 * n_);
        pl_.resize(count);
        u_.resize(count);
        v_.resize(count);
        image_.resize(count);
        for (size_t k = 0; k < count; ++k) {
            auto p = pauli_from_index(n_, k);
            pl_[k] = pauli_eigenvalue(pl_ch, p);
            u_[k] = pauli_eigenvalue(u_ch, p);
            v_[k] = pauli_eigenvalue(v_ch, p);
            auto q = tab.conjugate(p);
            size_t idx = 0;
            for (size_t t = 0; t < n_; ++t) idx |= (size_t(q.x.get(t)) << (2 * t)) | (size_t(q.z.get(t)) << (2 * t + 1));
            image_[k] = idx;
        }
    }

    size_t n() const { return n_; }

    /// Dressed fidelity restricted to Paulis supported on `qubits`.
    double dressed(const std::vector<int> &qubits) const {
        return average(qubits, [&](size_t k) {
            size_t q = image_[k];
            return signed_sqrt(pl_[k] * u_[k] * pl_[q] * v_[q]);
        });
    }
    double twirl(const std::vector<int> &qubits) const {
        return average(qubits, [&](size_t k) { return pl_[k]; });
    }
    /// Geometric mean of the U and U^-1 noise fidelities per Pauli.
    double pure(const std::vector<int> &qubits) const {
        return average(qubits, [&](size_t k) { return signed_sqrt(u_[k] * v_[image_[k]]); });
    }
    /// Process fidelity of the noise of U alone.
    double pure_forward(const std::vector<int> &qubits) const {
        return average(qubits, [&](size_t k) { return u_[k]; });
    }
    std::vector<int> all() const {
        std::vector<int> r(n_);
        for (size_t q = 0; q < n_; ++q) r[q] = int(q);
        return r;
    }
    double dressed() const { return dressed(all()); }
    double twirl() const { return twirl(all()); }
    double pure() const { return pure(all()); }

   private:
    static double signed_sqrt(double v) { return v >= 0 ? std::sqrt(v) : -std::sqrt(-v); }

    template <typename F>
    double average(const std::vector<int> &qubits, F f) const {
        size_t mask = 0;
        for (int q : qubits) mask |= size_t{3} << (2 * q);
        double acc = 0;
        size_t cnt = 0;
        for (size_t k = 0; k < pl_.size(); ++k) {
            if (k & ~mask) continue;
            acc += f(k);
            ++cnt;
        }
        return acc / double(cnt);
    }

    size_t n_;
    std::vector<double> pl_, u_, v_;
    std::vector<size_t> image_;
};

}  // namespace cabench

#endif
