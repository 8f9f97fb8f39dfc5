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

#ifndef CABENCH_RANDOM_HPP
#define CABENCH_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cabench {

using Rng = std::mt19937_64;

/// Independent stream for a task identified by (seed, tags...). The stream
/// depends only on its arguments, never on scheduling.
inline Rng make_stream(uint64_t seed, std::initializer_list<uint64_t> tags) {
    std::vector<uint32_t> material;
    material.reserve(2 + 2 * tags.size());
    auto push = [&](uint64_t v) {
        material.push_back(static_cast<uint32_t>(v));
        material.push_back(static_cast<uint32_t>(v >> 32));
    };
    push(seed);
    for (auto t : tags) push(t);
    std::seed_seq seq(material.begin(), material.end());
    return Rng(seq);
}

/// Stream tags used across modules, kept distinct so streams never collide.
enum StreamTag : uint64_t {
    kTagSequences = 0x5e9,
    kTagShots = 0x5407,
    kTagObservables = 0x0b5,
    kTagTwirlRun = 0x7a1,
    kTagCharacters = 0xc4a,
    kTagCalibration = 0xca1,
    kTagOptimizer = 0x0b7,
    kTagRepeat = 0x4e9,
    kTagFullyConnected = 0xfc,
};

inline double uniform01(Rng &rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace cabench

#endif
