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

#ifndef CABENCH_CLIFFORD1Q_HPP
#define CABENCH_CLIFFORD1Q_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <vector>

#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"
#include "cabench/random.hpp"

namespace cabench {

using cplx = std::complex<double>;
/// Row-major 2x2 matrix.
using Mat2 = std::array<cplx, 4>;

inline Mat2 mat2_mul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline Mat2 mat2_dagger(const Mat2 &a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}
inline Mat2 pauli_mat2(char p) {
    const cplx i(0, 1);
    switch (p) {
        case 'X': return {0, 1, 1, 0};
        case 'Y': return {0, -i, i, 0};
        case 'Z': return {1, 0, 0, -1};
        default: return {1, 0, 0, 1};
    }
}

/// One element of the single-qubit Clifford group.
struct Clifford1Q {
    PauliString x_image;  // U X U^dagger, 1 qubit, phase 0 or 2
    PauliString z_image;  // U Z U^dagger
    Mat2 unitary;
};

/// The 24 single-qubit Cliffords in a fixed canonical order.
///
/// Index = 4 * xi + zi. xi in [0,6) picks the X image from
/// (+X, -X, +Y, -Y, +Z, -Z); zi in [0,4) picks the Z image among the
/// two remaining axes (ordered as below) with sign +, -. Index 0 is the identity.
class Clifford1QTable {
   public:
    static constexpr int kSize = 24;

    static const Clifford1QTable &get() {
        static const Clifford1QTable table;
        return table;
    }

    const Clifford1Q &operator[](int k) const { return elems_[k]; }
    /// Element equal to "apply a, then b".
    int compose(int a, int b) const { return compose_[a][b]; }
    int inverse(int a) const { return inverse_[a]; }
    /// Unsigned action on the 2-bit Pauli code (x | z << 1).
    uint8_t frame_map(int k, uint8_t code) const { return frame_[k][code]; }
    /// Sign bit (0 => +, 1 => -) of the image of the Pauli code.
    uint8_t sign_map(int k, uint8_t code) const { return sign_[k][code]; }

    int identity() const { return 0; }
    int hadamard() const { return find('Z', 0, 'X', 0); }
    int phase_s() const { return find('Y', 0, 'Z', 0); }
    /// Index of the element mapping X -> sx*px and Z -> sz*pz (signs 0 => +, 1 => -).
    int find(char px, int sx, char pz, int sz) const {
        for (int k = 0; k < kSize; ++k) {
            const auto &e = elems_[k];
            if (e.x_image.get(0) == px && (e.x_image.phase_exp == 2) == (sx != 0) && e.z_image.get(0) == pz &&
                (e.z_image.phase_exp == 2) == (sz != 0))
                return k;
        }
        throw ContractViolation("Clifford1QTable::find: no such element");
    }
    /// First element whose Z image is +P (used to prepare +1 eigenstates of P).
    int preparing(char p) const {
        for (int k = 0; k < kSize; ++k)
            if (elems_[k].z_image.get(0) == p && elems_[k].z_image.phase_exp == 0) return k;
        throw ContractViolation("Clifford1QTable::preparing: no element");
    }

   private:
    Clifford1QTable() {
        static constexpr char kAxes[3] = {'X', 'Y', 'Z'};
        static constexpr int kOthers[3][2] = {{2, 1}, {2, 0}, {0, 1}};
        for (int xi = 0; xi < 6; ++xi) {
            for (int zi = 0; zi < 4; ++zi) {
                int a = xi / 2;
                Clifford1Q e;
                e.x_image = PauliString::single(1, 0, kAxes[a]);
                e.x_image.phase_exp = (xi & 1) ? 2 : 0;
                e.z_image = PauliString::single(1, 0, kAxes[kOthers[a][zi / 2]]);
                e.z_image.phase_exp = (zi & 1) ? 2 : 0;
                elems_[4 * xi + zi] = e;
            }
        }
        synthesize_unitaries();
        build_tables();
    }

    PauliString image(int k, const PauliString &p) const {
        // p is a single-qubit Pauli with phase; Y = i X Z.
        const auto &e = elems_[k];
        PauliString r = PauliString::identity(1);
        r.phase_exp = p.phase_exp;
        bool xb = p.x.get(0), zb = p.z.get(0);
        if (xb && zb) r.phase_exp = (r.phase_exp + 1) & 3;
        if (xb) r = pauli_multiply(r, e.x_image);
        if (zb) r = pauli_multiply(r, e.z_image);
        return r;
    }

    int index_of(const PauliString &xi, const PauliString &zi) const {
        for (int k = 0; k < kSize; ++k)
            if (elems_[k].x_image == xi && elems_[k].z_image == zi) return k;
        throw ContractViolation("Clifford1QTable: image pair outside the group");
    }

    static bool identify(const Mat2 &m, PauliString &out) {
        for (char p : {'X', 'Y', 'Z'}) {
            Mat2 q = pauli_mat2(p);
            for (int s : {0, 2}) {
                double sign = s ? -1.0 : 1.0;
                double err = 0;
                for (int i = 0; i < 4; ++i) err += std::abs(m[i] - sign * q[i]);
                if (err < 1e-9) {
                    out = PauliString::single(1, 0, p);
                    out.phase_exp = static_cast<uint8_t>(s);
                    return true;
                }
            }
        }
        return false;
    }

    void synthesize_unitaries() {
        const double r = 1.0 / std::sqrt(2.0);
        const Mat2 h{r, r, r, -r};
        const Mat2 s{1, 0, 0, cplx(0, 1)};
        std::array<bool, kSize> seen{};
        std::deque<Mat2> queue{Mat2{1, 0, 0, 1}};
        int found = 0;
        while (!queue.empty() && found < kSize) {
            Mat2 u = queue.front();
            queue.pop_front();
            PauliString xi, zi;
            if (!identify(mat2_mul(mat2_mul(u, pauli_mat2('X')), mat2_dagger(u)), xi) ||
                !identify(mat2_mul(mat2_mul(u, pauli_mat2('Z')), mat2_dagger(u)), zi))
                throw ContractViolation("Clifford1QTable: synthesized matrix is not Clifford");
            int k = index_of(xi, zi);
            if (seen[k]) continue;
            seen[k] = true;
            elems_[k].unitary = u;
            ++found;
            queue.push_back(mat2_mul(h, u));
            queue.push_back(mat2_mul(s, u));
        }
        if (found != kSize) throw ContractViolation("Clifford1QTable: {H,S} words did not reach 24 elements");
    }

    void build_tables() {
        for (int a = 0; a < kSize; ++a) {
            for (int b = 0; b < kSize; ++b) {
                PauliString xi = image(b, elems_[a].x_image);
                PauliString zi = image(b, elems_[a].z_image);
                compose_[a][b] = index_of(xi, zi);  // throws if not closed
            }
        }
        for (int a = 0; a < kSize; ++a) {
            int inv = -1;
            for (int b = 0; b < kSize; ++b)
                if (compose_[a][b] == 0) inv = b;
            if (inv < 0 || compose_[inv][a] != 0) throw ContractViolation("Clifford1QTable: missing inverse");
            inverse_[a] = inv;
        }
        for (int k = 0; k < kSize; ++k) {
            for (uint8_t code = 0; code < 4; ++code) {
                PauliString p(1);
                p.x.set(0, code & 1);
                p.z.set(0, code & 2);
                PauliString im = image(k, p);
                frame_[k][code] = static_cast<uint8_t>((im.x.get(0) ? 1 : 0) | (im.z.get(0) ? 2 : 0));
                sign_[k][code] = im.phase_exp == 2 ? 1 : 0;
            }
        }
    }

    std::array<Clifford1Q, kSize> elems_;
    std::array<std::array<int, kSize>, kSize> compose_{};
    std::array<int, kSize> inverse_{};
    std::array<std::array<uint8_t, 4>, kSize> frame_{};
    std::array<std::array<uint8_t, 4>, kSize> sign_{};
};

/// Tensor product of single-qubit Cliffords, one table index per qubit.
struct LocalCliffordLayer {
    std::vector<uint8_t> per_qubit;

    LocalCliffordLayer() = default;
    explicit LocalCliffordLayer(size_t n) : per_qubit(n, 0) {}
    explicit LocalCliffordLayer(std::vector<uint8_t> v) : per_qubit(std::move(v)) {}

    size_t n() const { return per_qubit.size(); }
    LocalCliffordLayer inverse() const {
        const auto &t = Clifford1QTable::get();
        LocalCliffordLayer r(n());
        for (size_t q = 0; q < n(); ++q) r.per_qubit[q] = static_cast<uint8_t>(t.inverse(per_qubit[q]));
        return r;
    }
    bool operator==(const LocalCliffordLayer &) const = default;
};

/// Each qubit independently uniform over the 24 elements.
inline LocalCliffordLayer sample_local_clifford(size_t n, Rng &rng) {
    if (n < 1) throw DomainError("sample_local_clifford: n must be >= 1");
    std::uniform_int_distribution<int> d(0, Clifford1QTable::kSize - 1);
    LocalCliffordLayer r(n);
    for (auto &c : r.per_qubit) c = static_cast<uint8_t>(d(rng));
    return r;
}

}  // namespace cabench

#endif
