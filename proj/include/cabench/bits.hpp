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

#ifndef CABENCH_BITS_HPP
#define CABENCH_BITS_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cabench/errors.hpp"

namespace cabench {

/// Fixed-length bit vector packed into 64-bit words. Bit q is qubit q.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static size_t word_count(size_t n) { return (n + 63) / 64; }

    size_t size() const { return n_; }
    const std::vector<uint64_t> &words() const { return words_; }
    std::vector<uint64_t> &words() { return words_; }

    bool get(size_t q) const { return (words_[q >> 6] >> (q & 63)) & 1; }
    void set(size_t q, bool v) {
        uint64_t m = uint64_t{1} << (q & 63);
        if (v)
            words_[q >> 6] |= m;
        else
            words_[q >> 6] &= ~m;
    }
    void flip(size_t q) { words_[q >> 6] ^= uint64_t{1} << (q & 63); }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    size_t popcount() const {
        size_t c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    BitVector &operator^=(const BitVector &o) {
        check(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }
    BitVector &operator|=(const BitVector &o) {
        check(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    BitVector &operator&=(const BitVector &o) {
        check(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector &b) { return a ^= b; }
    friend BitVector operator|(BitVector a, const BitVector &b) { return a |= b; }
    friend BitVector operator&(BitVector a, const BitVector &b) { return a &= b; }

    /// Parity of popcount(a & b).
    friend bool dot(const BitVector &a, const BitVector &b) {
        a.check(b);
        uint64_t acc = 0;
        for (size_t i = 0; i < a.words_.size(); ++i) acc ^= a.words_[i] & b.words_[i];
        return std::popcount(acc) & 1;
    }

    bool operator==(const BitVector &o) const = default;
    bool operator<(const BitVector &o) const {
        if (n_ != o.n_) return n_ < o.n_;
        for (size_t i = words_.size(); i-- > 0;)
            if (words_[i] != o.words_[i]) return words_[i] < o.words_[i];
        return false;
    }

    /// Characters '0'/'1', qubit 0 first.
    std::string str() const {
        std::string s(n_, '0');
        for (size_t q = 0; q < n_; ++q)
            if (get(q)) s[q] = '1';
        return s;
    }
    static BitVector from_string(const std::string &s) {
        BitVector b(s.size());
        for (size_t q = 0; q < s.size(); ++q) {
            if (s[q] == '1')
                b.set(q, true);
            else if (s[q] != '0')
                throw DomainError("bitstring contains characters other than 0/1");
        }
        return b;
    }

   private:
    void check(const BitVector &o) const {
        if (o.n_ != n_) throw DimensionError("bit vector length mismatch");
    }
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace cabench

#endif
