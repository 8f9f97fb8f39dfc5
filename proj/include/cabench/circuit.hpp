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


#ifndef CABENCH_CIRCUIT_HPP
#define CABENCH_CIRCUIT_HPP

#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cabench/clifford1q.hpp"
#include "cabench/device.hpp"
#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"
#include "cabench/tableau.hpp"

namespace cabench {

/// Random twirling Pauli, or (closing = true) the compiled inverse Pauli U_inv.
struct PauliLayer {
    PauliString pauli;
    bool closing = false;
};

/// Parallel physical CZ gates, by device gate index.
struct GateLayer {
    std::vector<int> gates;
};

/// Arbitrary single-qubit unitary; density-matrix backend only.
struct RotationLayer {
    int qubit = 0;
    Mat2 unitary{1, 0, 0, 1};
};

using Layer = std::variant<LocalCliffordLayer, PauliLayer, GateLayer, RotationLayer>;

inline bool is_single_qubit_layer(const Layer &l) {
    return std::holds_alternative<LocalCliffordLayer>(l) || std::holds_alternative<PauliLayer>(l) ||
           std::holds_alternative<RotationLayer>(l);
}

/// Ideal Clifford action of one layer; rotation layers are rejected.
inline CliffordTableau layer_tableau(const Layer &layer, const DeviceModel &dev, size_t n) {
    return std::visit(
        [&](const auto &l) -> CliffordTableau {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, LocalCliffordLayer>) {
                return CliffordTableau::local(l);
            } else if constexpr (std::is_same_v<T, PauliLayer>) {
                return CliffordTableau::pauli(l.pauli);
            } else if constexpr (std::is_same_v<T, GateLayer>) {
                std::vector<std::pair<size_t, size_t>> pairs;
                for (int g : l.gates) pairs.emplace_back(dev.gates[g].pair.first, dev.gates[g].pair.second);
                return CliffordTableau::cz_layer(n, pairs);
            } else {
                throw UnsupportedError("rotation layers are not Clifford");
            }
        },
        layer);
}

/// Target gate U as a list of Clifford layers (local and parallel CZ).
struct TargetGate {
    std::string name;
    size_t n = 0;
    std::vector<Layer> layers;

    /// Identity target, used for the twirl-only reference run.
    static TargetGate identity(size_t n) { return TargetGate{"identity", n, {}}; }
    static TargetGate parallel_cz(size_t n, std::vector<int> gates) {
        return TargetGate{"parallel_cz", n, {GateLayer{std::move(gates)}}};
    }

    /// Layers implementing U^-1 (reverse order, inverse local layers).
    std::vector<Layer> inverse_layers() const {
        std::vector<Layer> r;
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
            if (auto *loc = std::get_if<LocalCliffordLayer>(&*it))
                r.emplace_back(loc->inverse());
            else if (std::holds_alternative<GateLayer>(*it))
                r.push_back(*it);  // CZ layers are self-inverse
            else
                throw UnsupportedError("target gate must consist of local Clifford and CZ layers");
        }
        return r;
    }

    CliffordTableau tableau(const DeviceModel &dev) const {
        CliffordTableau t(n);
        for (const auto &l : layers) {
            if (!std::holds_alternative<LocalCliffordLayer>(l) && !std::holds_alternative<GateLayer>(l))
                throw UnsupportedError("target gate must consist of local Clifford and CZ layers");
            t = t.then(layer_tableau(l, dev, n));
        }
        return t;
    }

    /// All physical gates used, in layer order.
    std::vector<int> gates_used() const {
        std::vector<int> r;
        for (const auto &l : layers)
            if (auto *g = std::get_if<GateLayer>(&l)) r.insert(r.end(), g->gates.begin(), g->gates.end());
        return r;
    }
};

struct CircuitSequence {
    size_t n = 0;
    std::vector<Layer> layers;
    /// Ideal measurement outcome; empty means all zeros.
    BitVector expected{};

    BitVector ideal_outcome() const { return expected.size() == n ? expected : BitVector(n); }

    CliffordTableau tableau(const DeviceModel &dev) const {
        CliffordTableau t(n);
        for (const auto &l : layers) t = t.then(layer_tableau(l, dev, n));
        return t;
    }
    /// Noiseless composition is the identity, up to the X flips that
    /// produce `expected` from |0...0>.
    bool closes(const DeviceModel &dev) const {
        auto t = tableau(dev);
        auto e = ideal_outcome();
        if (e.any()) {
            PauliString x(n);
            x.x = e;
            t = t.then(CliffordTableau::pauli(x));
        }
        return t.is_identity();
    }
};

}  // namespace cabench

#endif
