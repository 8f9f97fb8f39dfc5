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

#ifndef CABENCH_TABLEAU_HPP
#define CABENCH_TABLEAU_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cabench/clifford1q.hpp"
#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"

namespace cabench {

/// Heisenberg action of a Clifford U: images U X_q U^dagger and U Z_q U^dagger.
struct CliffordTableau {
    std::vector<PauliString> xs;
    std::vector<PauliString> zs;

    CliffordTableau() = default;
    explicit CliffordTableau(size_t n) {
        xs.reserve(n);
        zs.reserve(n);
        for (size_t q = 0; q < n; ++q) {
            xs.push_back(PauliString::single(n, q, 'X'));
            zs.push_back(PauliString::single(n, q, 'Z'));
        }
    }
    static CliffordTableau identity(size_t n) { return CliffordTableau(n); }

    size_t n() const { return xs.size(); }

    static CliffordTableau cz(size_t n, size_t a, size_t b) {
        if (a == b || a >= n || b >= n) throw DomainError("cz: bad qubit pair");
        CliffordTableau t(n);
        t.xs[a].z.set(b, true);
        t.xs[b].z.set(a, true);
        return t;
    }
    static CliffordTableau single(size_t n, size_t q, int clifford_index) {
        const auto &e = Clifford1QTable::get()[clifford_index];
        CliffordTableau t(n);
        t.xs[q] = PauliString(n);
        t.xs[q].set(q, e.x_image.get(0));
        t.xs[q].phase_exp = e.x_image.phase_exp;
        t.zs[q] = PauliString(n);
        t.zs[q].set(q, e.z_image.get(0));
        t.zs[q].phase_exp = e.z_image.phase_exp;
        return t;
    }
    static CliffordTableau hadamard(size_t n, size_t q) { return single(n, q, Clifford1QTable::get().hadamard()); }
    static CliffordTableau phase_s(size_t n, size_t q) { return single(n, q, Clifford1QTable::get().phase_s()); }
    static CliffordTableau local(const LocalCliffordLayer &layer) {
        size_t n = layer.n();
        const auto &tab = Clifford1QTable::get();
        CliffordTableau t(n);
        for (size_t q = 0; q < n; ++q) {
            const auto &e = tab[layer.per_qubit[q]];
            t.xs[q] = PauliString(n);
            t.xs[q].set(q, e.x_image.get(0));
            t.xs[q].phase_exp = e.x_image.phase_exp;
            t.zs[q] = PauliString(n);
            t.zs[q].set(q, e.z_image.get(0));
            t.zs[q].phase_exp = e.z_image.phase_exp;
        }
        return t;
    }
    /// Conjugation by the Pauli P: generators anticommuting with P flip sign.
    static CliffordTableau pauli(const PauliString &p) {
        size_t n = p.n();
        CliffordTableau t(n);
        for (size_t q = 0; q < n; ++q) {
            if (p.z.get(q)) t.xs[q].phase_exp = 2;
            if (p.x.get(q)) t.zs[q].phase_exp = 2;
        }
        return t;
    }
    /// Parallel CZs on disjoint pairs.
    static CliffordTableau cz_layer(size_t n, const std::vector<std::pair<size_t, size_t>> &pairs) {
        CliffordTableau t(n);
        for (auto [a, b] : pairs) {
            if (a == b || a >= n || b >= n) throw DomainError("cz_layer: bad qubit pair");
            t.xs[a].z.flip(b);
            t.xs[b].z.flip(a);
        }
        return t;
    }

    /// Returns T P T^dagger.
    PauliString conjugate(const PauliString &p) const {
        if (p.n() != n()) throw DimensionError("conjugate_pauli: size mismatch");
        PauliString r = PauliString::identity(n());
        int ph = p.phase_exp;
        for (size_t q = 0; q < n(); ++q) {
            bool xb = p.x.get(q), zb = p.z.get(q);
            if (xb && zb) ++ph;  // Y = i X Z
            if (xb) r = pauli_multiply(r, xs[q]);
            if (zb) r = pauli_multiply(r, zs[q]);
        }
        r.phase_exp = static_cast<uint8_t>((r.phase_exp + ph) & 3);
        return r;
    }

    /// The Clifford "apply this, then `next`".
    CliffordTableau then(const CliffordTableau &next) const {
        if (next.n() != n()) throw DimensionError("tableau compose: size mismatch");
        CliffordTableau r;
        r.xs.reserve(n());
        r.zs.reserve(n());
        for (size_t q = 0; q < n(); ++q) {
            r.xs.push_back(next.conjugate(xs[q]));
            r.zs.push_back(next.conjugate(zs[q]));
        }
        return r;
    }

    /// Images are Hermitian and obey the canonical commutation pattern.
    bool is_valid() const {
        size_t m = n();
        if (zs.size() != m) return false;
        for (size_t i = 0; i < m; ++i) {
            if (xs[i].n() != m || zs[i].n() != m) return false;
            if (!xs[i].hermitian() || !zs[i].hermitian()) return false;
            if (xs[i].commutes(zs[i])) return false;
            for (size_t j = i + 1; j < m; ++j) {
                if (!xs[i].commutes(xs[j]) || !zs[i].commutes(zs[j]) || !xs[i].commutes(zs[j]) ||
                    !zs[i].commutes(xs[j]))
                    return false;
            }
        }
        return true;
    }

    CliffordTableau inverse() const {
        size_t m = n();
        // Preimage of Q has X_j coefficient <image(Z_j), Q> and Z_j coefficient
        // <image(X_j), Q> in the symplectic form; signs are fixed afterwards.
        CliffordTableau r(m);
        for (size_t i = 0; i < m; ++i) {
            PauliString px(m), pz(m);
            for (size_t j = 0; j < m; ++j) {
                // Q = X_i anticommutes with P iff P has z bit at i.
                if (zs[j].z.get(i)) px.x.set(j, true);
                if (xs[j].z.get(i)) px.z.set(j, true);
                // Q = Z_i anticommutes with P iff P has x bit at i.
                if (zs[j].x.get(i)) pz.x.set(j, true);
                if (xs[j].x.get(i)) pz.z.set(j, true);
            }
            for (PauliString *p : {&px, &pz}) {
                // Y entries in the Hermitian convention need no extra phase here;
                // the sign fix below makes the image exact.
                PauliString img = conjugate(*p);
                if (img.phase_exp & 1) throw ContractViolation("inverse: tableau is not Clifford");
                if (img.phase_exp == 2) p->phase_exp = 2;
            }
            r.xs[i] = px;
            r.zs[i] = pz;
        }
        return r;
    }

    bool operator==(const CliffordTableau &o) const = default;
    bool is_identity() const { return *this == CliffordTableau(n()); }
};

inline PauliString conjugate_pauli(const CliffordTableau &t, const PauliString &p) { return t.conjugate(p); }

/// Smallest p <= cap with T^p equal to the identity tableau (signs included,
/// i.e. equality modulo global phase). std::nullopt when cap is exceeded.
inline std::optional<uint64_t> gate_order(const CliffordTableau &t, uint64_t cap = 1000000) {
    if (cap < 1) throw DomainError("gate_order: cap must be >= 1");
    CliffordTableau acc = t;
    for (uint64_t p = 1; p <= cap; ++p) {
        if (acc.is_identity()) return p;
        acc = acc.then(t);
    }
    return std::nullopt;
}

/// Product of a Clifford-conjugated Pauli sequence: the Pauli that closes
/// C, (P_1, U, P_2, U^-1) x m, U_inv so the whole circuit is the identity.
/// `pauli_layers` holds P_1..P_2m in time order.
inline PauliString compile_inverse_pauli(const CliffordTableau &u, const std::vector<PauliString> &pauli_layers,
                                         size_t m) {
    if (pauli_layers.size() != 2 * m) throw DomainError("compile_inverse_pauli: need 2m Pauli layers");
    if (!u.is_valid()) throw ContractViolation("compile_inverse_pauli: target is not a Clifford tableau");
    size_t n = u.n();
    CliffordTableau u_inv = u.inverse();
    // acc is the circuit so far with all Cliffords cancelled: a Pauli.
    PauliString acc = PauliString::identity(n);
    for (size_t i = 0; i < m; ++i) {
        acc = pauli_multiply(pauli_layers[2 * i], acc);
        acc = u.conjugate(acc);
        acc = pauli_multiply(pauli_layers[2 * i + 1], acc);
        acc = u_inv.conjugate(acc);
    }
    // (i^k s)^-1 = i^-k s for a Hermitian s.
    acc.phase_exp = static_cast<uint8_t>((4 - acc.phase_exp) & 3);
    return acc;
}

/// The Pauli R (sign dropped) whose conjugation action equals `t`; throws
/// ContractViolation when `t` is not a Pauli. Appending R after `t` gives the
/// identity tableau.
inline PauliString pauli_of_tableau(const CliffordTableau &t) {
    size_t n = t.n();
    PauliString r(n);
    for (size_t q = 0; q < n; ++q) {
        auto xq = t.conjugate(PauliString::single(n, q, 'X'));
        auto zq = t.conjugate(PauliString::single(n, q, 'Z'));
        if (!xq.equal_up_to_phase(PauliString::single(n, q, 'X')) ||
            !zq.equal_up_to_phase(PauliString::single(n, q, 'Z')))
            throw ContractViolation("pauli_of_tableau: tableau is not a Pauli");
        r.z.set(q, xq.phase_exp == 2);  // R anticommutes with X_q
        r.x.set(q, zq.phase_exp == 2);
    }
    return r;
}

}  // namespace cabench

#endif
