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


#ifndef CABENCH_CLIFFORD2Q_HPP
#define CABENCH_CLIFFORD2Q_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "cabench/clifford1q.hpp"
#include "cabench/errors.hpp"
#include "cabench/random.hpp"
#include "cabench/tableau.hpp"

namespace cabench {

/// A two-qubit Clifford written as L_0 CZ L_1 CZ ... L_k with the fewest CZs
/// (k <= 3). Each L is a pair of single-qubit table indices.
struct Clifford2QWord {
    std::vector<std::array<uint8_t, 2>> locals;  // size n_cz() + 1, time order
    size_t n_cz() const { return locals.size() - 1; }
};

/// The 11520 signed two-qubit Clifford tableaus, with CZ-minimal words.
class Clifford2QGroup {
   public:
    static constexpr size_t kSize = 11520;

    static const Clifford2QGroup &get() {
        static const Clifford2QGroup group;
        return group;
    }

    size_t size() const { return tabs_.size(); }
    const CliffordTableau &tableau(size_t i) const { return tabs_[i]; }
    const Clifford2QWord &word(size_t i) const { return words_[i]; }
    size_t index_of(const CliffordTableau &t) const {
        auto it = index_.find(key(t));
        if (it == index_.end()) throw ContractViolation("Clifford2QGroup: tableau is not a two-qubit Clifford");
        return it->second;
    }
    size_t sample(Rng &rng) const {
        std::uniform_int_distribution<size_t> d(0, size() - 1);
        return d(rng);
    }
    /// Number of elements whose word uses k CZ gates, k = 0..3.
    std::array<size_t, 4> cz_histogram() const {
        std::array<size_t, 4> h{};
        for (const auto &w : words_) ++h[w.n_cz()];
        return h;
    }

    static uint32_t key(const CliffordTableau &t) {
        if (t.n() != 2) throw DimensionError("Clifford2QGroup: expected a two-qubit tableau");
        uint32_t k = 0;
        auto put = [&](const PauliString &p) {
            k = (k << 6) | uint32_t(p.x.get(0)) | uint32_t(p.x.get(1)) << 1 | uint32_t(p.z.get(0)) << 2 |
                uint32_t(p.z.get(1)) << 3 | uint32_t(p.phase_exp & 3) << 4;
        };
        for (size_t q = 0; q < 2; ++q) put(t.xs[q]);
        for (size_t q = 0; q < 2; ++q) put(t.zs[q]);
        return k;
    }

   private:
    // 0-1 breadth-first search: single-qubit generators are free, CZ costs
    // one, so the first visit of an element has the fewest CZs.
    Clifford2QGroup() {
        const auto &t1 = Clifford1QTable::get();
        struct Node {
            CliffordTableau tab;
            Clifford2QWord word;
        };
        std::vector<std::pair<size_t, int>> gens;  // (qubit, 1q index); qubit 2 = CZ
        for (int c : {t1.hadamard(), t1.phase_s()})
            for (size_t q : {size_t{0}, size_t{1}}) gens.emplace_back(q, c);
        gens.emplace_back(2, 0);

        std::deque<Node> queue;
        queue.push_back({CliffordTableau(2), Clifford2QWord{{{0, 0}}}});
        while (!queue.empty()) {
            Node cur = std::move(queue.front());
            queue.pop_front();
            uint32_t k = key(cur.tab);
            if (index_.count(k)) continue;
            index_.emplace(k, tabs_.size());
            tabs_.push_back(cur.tab);
            words_.push_back(cur.word);
            for (auto [q, c] : gens) {
                Node nxt = cur;
                if (q == 2) {
                    nxt.tab = cur.tab.then(CliffordTableau::cz(2, 0, 1));
                    nxt.word.locals.push_back({0, 0});
                } else {
                    nxt.tab = cur.tab.then(CliffordTableau::single(2, q, c));
                    auto &l = nxt.word.locals.back()[q];
                    l = uint8_t(t1.compose(l, c));
                }
                uint32_t nk = key(nxt.tab);
                if (index_.count(nk)) continue;
                if (q == 2)
                    queue.push_back(std::move(nxt));
                else
                    queue.push_front(std::move(nxt));
            }
        }
        if (tabs_.size() != kSize) throw ContractViolation("Clifford2QGroup: enumeration did not reach 11520 elements");
    }

    std::vector<CliffordTableau> tabs_;
    std::vector<Clifford2QWord> words_;
    std::unordered_map<uint32_t, size_t> index_;
};

}  // namespace cabench

#endif
