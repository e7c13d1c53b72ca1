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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmbqc/random.hpp"
#include "vmbqc/state_vector.hpp"

namespace vmbqc {

/// Probability vector over n-bit outcomes, indexed by the integer value of the bitstring.
struct DiscreteDistribution {
    std::size_t n_bits = 0;
    std::vector<double> probs;

    static constexpr double kNormTolerance = 1e-9;

    DiscreteDistribution() = default;
    DiscreteDistribution(std::size_t n, std::vector<double> p) : n_bits(n), probs(std::move(p)) { validate(); }

    void validate() const {
        if (n_bits < 1 || n_bits > 30 || probs.size() != (std::size_t{1} << n_bits)) {
            throw std::invalid_argument("distribution needs exactly 2^n entries");
        }
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) {
                throw std::invalid_argument("distribution has a negative or NaN entry");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > kNormTolerance) {
            throw std::invalid_argument("distribution sums to " + std::to_string(total));
        }
    }

    /// Shannon entropy in nats.
    double entropy() const {
        double h = 0.0;
        for (double p : probs) {
            if (p > 0.0) {
                h -= p * std::log(p);
            }
        }
        return h;
    }
};

/// A dataset of n-bit samples stored as integers (bit q = qubit q).
struct SampleSet {
    std::size_t n_bits = 0;
    std::vector<std::uint32_t> samples;

    SampleSet() = default;
    SampleSet(std::size_t n, std::vector<std::uint32_t> s) : n_bits(n), samples(std::move(s)) {
        if (n_bits < 1 || n_bits > 30) {
            throw std::invalid_argument("sample width must be in 1..30 bits");
        }
        for (auto x : samples) {
            if (x >> n_bits) {
                throw std::invalid_argument("sample " + std::to_string(x) + " does not fit in " +
                                            std::to_string(n_bits) + " bits");
            }
        }
    }

    std::size_t size() const { return samples.size(); }
};

inline DiscreteDistribution uniform(std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    return DiscreteDistribution(n, std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

/// Two equal-weight discretised Gaussians on x = 0 .. 2^n - 1, normalised.
inline DiscreteDistribution double_gaussian(std::size_t n, double mu1, double mu2, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("double_gaussian needs sigma > 0");
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> p(dim);
    double total = 0.0;
    for (std::size_t x = 0; x < dim; ++x) {
        const double xd = static_cast<double>(x);
        p[x] = std::exp(-(xd - mu1) * (xd - mu1) / (2.0 * sigma * sigma)) +
               std::exp(-(xd - mu2) * (xd - mu2) / (2.0 * sigma * sigma));
        total += p[x];
    }
    for (auto &v : p) {
        v /= total;
    }
    return DiscreteDistribution(n, std::move(p));
}

/// Peaks at a quarter and three quarters of the range, sigma an eighth of it.
inline DiscreteDistribution default_double_gaussian(std::size_t n) {
    const double range = static_cast<double>(std::size_t{1} << n);
    return double_gaussian(n, range / 4.0, 3.0 * range / 4.0, range / 8.0);
}

inline DiscreteDistribution empirical(const SampleSet &set) {
    if (set.samples.empty()) {
        throw std::invalid_argument("empirical distribution of an empty sample set");
    }
    std::vector<double> p(std::size_t{1} << set.n_bits, 0.0);
    for (auto x : set.samples) {
        p[x] += 1.0;
    }
    for (auto &v : p) {
        v /= static_cast<double>(set.samples.size());
    }
    return DiscreteDistribution(set.n_bits, std::move(p));
}

inline SampleSet draw(const DiscreteDistribution &dist, std::size_t count, Rng &rng) {
    if (count == 0) {
        throw std::invalid_argument("draw needs at least one sample");
    }
    CumulativeDistribution cdf(dist.probs);
    std::vector<std::uint32_t> out(count);
    for (auto &s : out) {
        s = cdf.draw(rng);
    }
    return SampleSet(dist.n_bits, std::move(out));
}

/// KL(p || q) in nats with 0 ln 0 = 0. Returns +inf when q(x) = 0 < p(x).
inline double kl_divergence(const DiscreteDistribution &p, const DiscreteDistribution &q) {
    if (p.n_bits != q.n_bits) {
        throw std::invalid_argument("KL divergence between distributions of different widths");
    }
    double acc = 0.0;
    for (std::size_t x = 0; x < p.probs.size(); ++x) {
        if (p.probs[x] == 0.0) {
            continue;
        }
        if (q.probs[x] == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        acc += p.probs[x] * std::log(p.probs[x] / q.probs[x]);
    }
    return acc;
}

inline double total_variation(const DiscreteDistribution &p, const DiscreteDistribution &q) {
    if (p.n_bits != q.n_bits) {
        throw std::invalid_argument("total variation between distributions of different widths");
    }
    double acc = 0.0;
    for (std::size_t x = 0; x < p.probs.size(); ++x) {
        acc += std::abs(p.probs[x] - q.probs[x]);
    }
    return 0.5 * acc;
}

/// Dataset text format: "#n_bits=N" then one 0/1 string per line, qubit 0 leftmost.
inline void write_dataset(std::ostream &out, const SampleSet &set) {
    out << "#n_bits=" << set.n_bits << "\n";
    for (auto x : set.samples) {
        out << bitstring(x, set.n_bits) << "\n";
    }
}

inline SampleSet read_dataset(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#n_bits=", 0) != 0) {
        throw std::invalid_argument("dataset must start with a '#n_bits=N' header");
    }
    std::size_t n = 0;
    try {
        n = static_cast<std::size_t>(std::stoul(line.substr(8)));
    } catch (const std::exception &) {
        throw std::invalid_argument("bad dataset header '" + line + "'");
    }
    std::vector<std::uint32_t> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.size() != n) {
            throw std::invalid_argument("dataset line " + std::to_string(lineno) + " has " +
                                        std::to_string(line.size()) + " bits, expected " + std::to_string(n));
        }
        std::uint32_t v = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if (line[q] == '1') {
                v |= std::uint32_t{1} << q;
            } else if (line[q] != '0') {
                throw std::invalid_argument("dataset line " + std::to_string(lineno) + " is not a 0/1 string");
            }
        }
        samples.push_back(v);
    }
    return SampleSet(n, std::move(samples));
}

}  // namespace vmbqc
