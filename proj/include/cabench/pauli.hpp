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

#ifndef CABENCH_PAULI_HPP
#define CABENCH_PAULI_HPP

#include <cstdint>
#include <string>

#include "cabench/bits.hpp"
#include "cabench/errors.hpp"
#include "cabench/random.hpp"

namespace cabench {

/// n-qubit Pauli operator i^phase_exp * (tensor of I, X, Y, Z).
///
/// Qubit q carries (x, z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z. Y is the
/// Hermitian Y, so Y = i X Z.
struct PauliString {
    BitVector x;
    BitVector z;
    uint8_t phase_exp = 0;

    PauliString() = default;
    explicit PauliString(size_t n) : x(n), z(n) {}

    static PauliString identity(size_t n) { return PauliString(n); }

    /// Single-qubit factor `p` in {'I','X','Y','Z'} on qubit q.
    static PauliString single(size_t n, size_t q, char p) {
        PauliString r(n);
        r.set(q, p);
        return r;
    }

    /// Parses strings like "XIZ", "+XY", "-iZZ", "iX". Qubit 0 is leftmost.
    static PauliString from_string(const std::string &s) {
        size_t pos = 0;
        uint8_t ph = 0;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') ph = 2;
            ++pos;
        }
        if (pos < s.size() && s[pos] == 'i') {
            ph = (ph + 1) & 3;
            ++pos;
        }
        PauliString r(s.size() - pos);
        for (size_t q = 0; pos < s.size(); ++pos, ++q) r.set(q, s[pos]);
        r.phase_exp = ph;
        return r;
    }

    size_t n() const { return x.size(); }

    char get(size_t q) const {
        static constexpr char kNames[4] = {'I', 'X', 'Z', 'Y'};
        return kNames[(x.get(q) ? 1 : 0) | (z.get(q) ? 2 : 0)];
    }
    void set(size_t q, char p) {
        switch (p) {
            case 'I': case '_': x.set(q, false); z.set(q, false); break;
            case 'X': x.set(q, true); z.set(q, false); break;
            case 'Y': x.set(q, true); z.set(q, true); break;
            case 'Z': x.set(q, false); z.set(q, true); break;
            default: throw DomainError(std::string("unknown Pauli character '") + p + "'");
        }
    }

    size_t weight() const { return (x | z).popcount(); }
    bool is_identity_up_to_phase() const { return !x.any() && !z.any(); }
    /// True when the operator is Hermitian, i.e. phase is +1 or -1.
    bool hermitian() const { return (phase_exp & 1) == 0; }

    bool commutes(const PauliString &o) const {
        if (o.n() != n()) throw DimensionError("Pauli size mismatch");
        return dot(x, o.z) == dot(z, o.x);
    }

    /// Support as a bit vector.
    BitVector support() const { return x | z; }

    bool equal_up_to_phase(const PauliString &o) const { return x == o.x && z == o.z; }
    bool operator==(const PauliString &o) const = default;
    bool operator<(const PauliString &o) const {
        if (!(x == o.x)) return x < o.x;
        if (!(z == o.z)) return z < o.z;
        return phase_exp < o.phase_exp;
    }

    std::string str() const {
        static const char *kPhase[4] = {"+", "+i", "-", "-i"};
        std::string s = kPhase[phase_exp & 3];
        for (size_t q = 0; q < n(); ++q) s += get(q);
        return s;
    }
};

/// Returns PQ with the phase tracked exactly.
inline PauliString pauli_multiply(const PauliString &P, const PauliString &Q) {
    if (P.n() != Q.n()) throw DimensionError("pauli_multiply: size mismatch");
    PauliString r(P.n());
    int ph = P.phase_exp + Q.phase_exp;
    const auto &px = P.x.words(), &pz = P.z.words(), &qx = Q.x.words(), &qz = Q.z.words();
    auto &rx = r.x.words(), &rz = r.z.words();
    // Per-qubit exponent g(P_q, Q_q) of sigma_a sigma_b = i^g sigma_{a^b}, summed
    // with bit-sliced counting: +1 for the cyclic orders XY, YZ, ZX and -1 for
    // the anti-cyclic ones.
    for (size_t w = 0; w < px.size(); ++w) {
        uint64_t x1 = px[w], z1 = pz[w], x2 = qx[w], z2 = qz[w];
        uint64_t nontriv1 = x1 | z1, nontriv2 = x2 | z2;
        uint64_t differ = nontriv1 & nontriv2 & ((x1 ^ x2) | (z1 ^ z2));
        // Cyclic (+i): X*Y, Y*Z, Z*X.
        uint64_t plus = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
        plus &= differ;
        uint64_t minus = differ & ~plus;
        ph += std::popcount(plus) - std::popcount(minus);
        rx[w] = x1 ^ x2;
        rz[w] = z1 ^ z2;
    }
    r.phase_exp = static_cast<uint8_t>(((ph % 4) + 4) % 4);
    return r;
}

inline PauliString operator*(const PauliString &P, const PauliString &Q) { return pauli_multiply(P, Q); }

/// Uniform over the 4^n phaseless Paulis.
inline PauliString sample_random_pauli(size_t n, Rng &rng) {
    if (n < 1) throw DomainError("sample_random_pauli: n must be >= 1");
    PauliString r(n);
    for (size_t w = 0; w < r.x.words().size(); ++w) {
        r.x.words()[w] = rng();
        r.z.words()[w] = rng();
    }
    if (n % 64) {
        uint64_t mask = (uint64_t{1} << (n % 64)) - 1;
        r.x.words().back() &= mask;
        r.z.words().back() &= mask;
    }
    return r;
}

/// Pauli with index `k` in [0, 4^n): two bits per qubit, (x, z) = (k>>2q & 1, k>>(2q+1) & 1).
inline PauliString pauli_from_index(size_t n, uint64_t k) {
    PauliString r(n);
    for (size_t q = 0; q < n; ++q) {
        r.x.set(q, (k >> (2 * q)) & 1);
        r.z.set(q, (k >> (2 * q + 1)) & 1);
    }
    return r;
}

}  // namespace cabench

#endif
