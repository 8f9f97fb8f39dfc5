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

#ifndef CABENCH_DENSE_HPP
#define CABENCH_DENSE_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "cabench/clifford1q.hpp"
#include "cabench/errors.hpp"
#include "cabench/pauli.hpp"

namespace cabench {

/// Dense square complex matrix, row-major. Basis index bit q is qubit q.
struct Matrix {
    size_t dim = 0;
    std::vector<cplx> a;

    Matrix() = default;
    explicit Matrix(size_t d) : dim(d), a(d * d, 0.0) {}
    static Matrix identity(size_t d) {
        Matrix m(d);
        for (size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx &operator()(size_t i, size_t j) { return a[i * dim + j]; }
    const cplx &operator()(size_t i, size_t j) const { return a[i * dim + j]; }

    Matrix dagger() const {
        Matrix r(dim);
        for (size_t i = 0; i < dim; ++i)
            for (size_t j = 0; j < dim; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }
    cplx trace() const {
        cplx t = 0;
        for (size_t i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }
    Matrix &operator+=(const Matrix &o) {
        if (o.dim != dim) throw DimensionError("matrix size mismatch");
        for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
        return *this;
    }
    Matrix &operator*=(cplx s) {
        for (auto &v : a) v *= s;
        return *this;
    }
    double max_abs_diff(const Matrix &o) const {
        if (o.dim != dim) throw DimensionError("matrix size mismatch");
        double m = 0;
        for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - o.a[k]));
        return m;
    }
};

inline Matrix operator*(const Matrix &x, const Matrix &y) {
    if (x.dim != y.dim) throw DimensionError("matrix size mismatch");
    size_t d = x.dim;
    Matrix r(d);
    for (size_t i = 0; i < d; ++i)
        for (size_t k = 0; k < d; ++k) {
            cplx v = x(i, k);
            if (v == 0.0) continue;
            for (size_t j = 0; j < d; ++j) r(i, j) += v * y(k, j);
        }
    return r;
}

/// Kronecker product hi (x) lo: lo acts on the low-order index bits.
inline Matrix kron(const Matrix &hi, const Matrix &lo) {
    Matrix r(hi.dim * lo.dim);
    for (size_t i1 = 0; i1 < hi.dim; ++i1)
        for (size_t j1 = 0; j1 < hi.dim; ++j1)
            for (size_t i2 = 0; i2 < lo.dim; ++i2)
                for (size_t j2 = 0; j2 < lo.dim; ++j2)
                    r(i1 * lo.dim + i2, j1 * lo.dim + j2) = hi(i1, j1) * lo(i2, j2);
    return r;
}

inline Matrix from_mat2(const Mat2 &m) {
    Matrix r(2);
    r.a.assign(m.begin(), m.end());
    return r;
}

/// Dense matrix of a Pauli string including its phase.
inline Matrix pauli_matrix(const PauliString &p) {
    size_t n = p.n();
    size_t d = size_t{1} << n;
    Matrix r(d);
    const cplx i(0, 1);
    static const cplx kPow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    for (size_t col = 0; col < d; ++col) {
        size_t row = col;
        cplx ph = kPow[p.phase_exp & 3];
        for (size_t q = 0; q < n; ++q) {
            bool xb = p.x.get(q), zb = p.z.get(q);
            bool bit = (col >> q) & 1;
            if (xb) row ^= size_t{1} << q;
            if (zb && bit) ph = -ph;
            if (xb && zb) ph *= i;  // Y = i X Z
        }
        r(row, col) = ph;
    }
    return r;
}

}  // namespace cabench

#endif
