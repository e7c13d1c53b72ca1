// Copyright 2026 The vmbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace vmbqc {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// SplitMix64 finalizer; used to derive independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Inverse-CDF sampler over a fixed nonnegative weight vector.
class CumulativeDistribution {
   public:
    CumulativeDistribution() = default;
    explicit CumulativeDistribution(std::span<const double> weights) : cdf_(weights.size()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k] < 0.0) {
                throw std::invalid_argument("negative weight in sampling distribution");
            }
            acc += weights[k];
            cdf_[k] = acc;
        }
        if (weights.empty() || !(acc > 0.0)) {
            throw std::invalid_argument("sampling distribution has no mass");
        }
    }

    std::uint32_t draw(Rng &rng) const {
        const double u = uniform01(rng) * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            --it;
        }
        return static_cast<std::uint32_t>(it - cdf_.begin());
    }

    std::size_t size() const { return cdf_.size(); }

   private:
    std::vector<double> cdf_;
};

}  // namespace vmbqc
