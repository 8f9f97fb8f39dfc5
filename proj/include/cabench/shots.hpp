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


#ifndef CABENCH_SHOTS_HPP
#define CABENCH_SHOTS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

#include "cabench/bits.hpp"
#include "cabench/errors.hpp"
#include "cabench/random.hpp"

namespace cabench {

namespace detail {
struct WordsHash {
    size_t operator()(const std::vector<uint64_t> &v) const {
        uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto w : v) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return size_t(h);
    }
};
}  // namespace detail

/// Measured bitstrings with counts, sorted by outcome. Outcome k occupies
/// words[k*stride, (k+1)*stride).
struct ShotCounts {
    size_t n_qubits = 0;
    uint64_t total = 0;
    std::vector<uint64_t> words;
    std::vector<uint64_t> counts;

    size_t stride() const { return BitVector::word_count(n_qubits); }
    size_t size() const { return counts.size(); }
    BitVector outcome(size_t k) const {
        BitVector b(n_qubits);
        std::copy_n(words.begin() + k * stride(), stride(), b.words().begin());
        return b;
    }
    uint64_t count_of(const BitVector &b) const {
        for (size_t k = 0; k < size(); ++k)
            if (std::equal(b.words().begin(), b.words().end(), words.begin() + k * stride())) return counts[k];
        return 0;
    }
};

/// Collects outcomes; `finish` sorts them so the result is schedule-independent.
class ShotAccumulator {
   public:
    explicit ShotAccumulator(size_t n) : n_(n) {}
    void add(const BitVector &b, uint64_t c = 1) {
        map_[b.words()] += c;
        total_ += c;
    }
    ShotCounts finish() const {
        std::vector<std::pair<std::vector<uint64_t>, uint64_t>> items(map_.begin(), map_.end());
        std::sort(items.begin(), items.end(), [](const auto &a, const auto &b) {
            return std::lexicographical_compare(a.first.rbegin(), a.first.rend(), b.first.rbegin(), b.first.rend());
        });
        ShotCounts r;
        r.n_qubits = n_;
        r.total = total_;
        for (auto &[w, c] : items) {
            r.words.insert(r.words.end(), w.begin(), w.end());
            r.counts.push_back(c);
        }
        return r;
    }

   private:
    size_t n_;
    uint64_t total_ = 0;
    std::unordered_map<std::vector<uint64_t>, uint64_t, detail::WordsHash> map_;
};

/// Weighted outcome table consumed by the estimators: either shot
/// frequencies (shots > 0) or an exact distribution (shots == 0).
struct OutcomeTable {
    size_t n_qubits = 0;
    uint64_t shots = 0;
    std::vector<uint64_t> words;
    std::vector<double> weights;

    size_t stride() const { return BitVector::word_count(n_qubits); }
    size_t size() const { return weights.size(); }

    static OutcomeTable from_counts(const ShotCounts &c) {
        if (c.total == 0) throw DomainError("OutcomeTable: empty shot counts");
        OutcomeTable t;
        t.n_qubits = c.n_qubits;
        t.shots = c.total;
        t.words = c.words;
        t.weights.reserve(c.size());
        for (auto k : c.counts) t.weights.push_back(double(k) / double(c.total));
        return t;
    }
    /// Exact distribution indexed by bitstring integer (qubit q = bit q).
    static OutcomeTable from_probabilities(const std::vector<double> &probs, size_t n) {
        if (n > 63) throw ResourceError("OutcomeTable: probability vectors limited to 63 qubits");
        OutcomeTable t;
        t.n_qubits = n;
        for (size_t x = 0; x < probs.size(); ++x) {
            if (probs[x] == 0.0) continue;
            t.words.push_back(x);
            t.weights.push_back(probs[x]);
        }
        return t;
    }

    /// XORs every outcome with `r`.
    void relabel(const BitVector &r) {
        if (!r.any()) return;
        size_t s = stride();
        for (size_t k = 0; k < size(); ++k)
            for (size_t i = 0; i < s; ++i) words[k * s + i] ^= r.words()[i];
    }

    /// Distribution of the bits at `qubits` (bit t of the index is qubits[t]).
    std::vector<double> marginal(const std::vector<int> &qubits) const {
        std::vector<double> m(size_t{1} << qubits.size(), 0.0);
        size_t s = stride();
        for (size_t k = 0; k < size(); ++k) {
            const uint64_t *w = &words[k * s];
            size_t y = 0;
            for (size_t t = 0; t < qubits.size(); ++t) y |= size_t((w[qubits[t] >> 6] >> (qubits[t] & 63)) & 1) << t;
            m[y] += weights[k];
        }
        return m;
    }
};

/// sum_x freq(x) (-1)^{w.x}.
inline double survival_probability(const OutcomeTable &t, const BitVector &w) {
    if (w.size() != t.n_qubits) throw DimensionError("survival_probability: observable length mismatch");
    size_t s = t.stride();
    double acc = 0;
    for (size_t k = 0; k < t.size(); ++k) {
        uint64_t par = 0;
        for (size_t i = 0; i < s; ++i) par ^= t.words[k * s + i] & w.words()[i];
        acc += (std::popcount(par) & 1) ? -t.weights[k] : t.weights[k];
    }
    return acc;
}

inline double survival_probability(const ShotCounts &c, const BitVector &w) {
    if (c.total == 0) throw DomainError("survival_probability: empty counts");
    return survival_probability(OutcomeTable::from_counts(c), w);
}

/// Survival of every observable supported on `qubits`, from the marginal;
/// entry y is the observable with bit t set iff y has bit t.
inline std::vector<double> subset_survivals(const OutcomeTable &t, const std::vector<int> &qubits) {
    auto m = t.marginal(qubits);
    size_t dim = m.size();
    for (size_t h = 1; h < dim; h <<= 1)
        for (size_t i = 0; i < dim; i += 2 * h)
            for (size_t j = i; j < i + h; ++j) {
                double a = m[j], b = m[j + h];
                m[j] = a + b;
                m[j + h] = a - b;
            }
    return m;
}

/// Multinomial draw of `shots` outcomes from an exact distribution.
inline ShotCounts sample_counts(const std::vector<double> &probs, size_t n, uint64_t shots, Rng &rng) {
    if (n > 63) throw ResourceError("sample_counts: limited to 63 qubits");
    ShotCounts r;
    r.n_qubits = n;
    r.total = shots;
    uint64_t left = shots;
    double mass = 1.0;
    for (size_t x = 0; x < probs.size() && left > 0; ++x) {
        double p = probs[x];
        if (p <= 0) continue;
        uint64_t k;
        if (p >= mass)
            k = left;
        else
            k = std::binomial_distribution<uint64_t>(left, std::clamp(p / mass, 0.0, 1.0))(rng);
        mass -= p;
        if (k == 0) continue;
        BitVector b(n);
        b.words()[0] = x;
        r.words.insert(r.words.end(), b.words().begin(), b.words().end());
        r.counts.push_back(k);
        left -= k;
    }
    if (left > 0) {
        // Rounding residue: assign to the last supported outcome.
        r.counts.back() += left;
    }
    return r;
}

}  // namespace cabench

#endif
