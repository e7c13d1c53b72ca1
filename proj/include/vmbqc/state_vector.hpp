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

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmbqc/pauli.hpp"
#include "vmbqc/random.hpp"

namespace vmbqc {

/// Dense 2^n amplitude vector. Qubit q is bit q of the basis index (little-endian);
/// Z has eigenvalue +1 on |0>.
class StateVector {
   public:
    using Complex = std::complex<double>;
    static constexpr std::size_t kMaxQubits = 16;

    /// |0...0>.
    explicit StateVector(std::size_t n) : n_(checked(n)), amps_(std::size_t{1} << n) { amps_[0] = 1.0; }

    static StateVector plus_state(std::size_t n) {
        StateVector s(n);
        const double a = std::pow(2.0, -0.5 * static_cast<double>(n));
        std::fill(s.amps_.begin(), s.amps_.end(), Complex{a, 0.0});
        return s;
    }

    static StateVector basis_state(std::size_t n, std::uint64_t index) {
        StateVector s(n);
        if (index >= s.amps_.size()) {
            throw std::out_of_range("basis index out of range");
        }
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::size_t n, std::vector<Complex> amps) {
        StateVector s(n);
        if (amps.size() != s.amps_.size()) {
            throw std::invalid_argument("amplitude count does not match 2^n");
        }
        s.amps_ = std::move(amps);
        return s;
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }

    /// exp(i * angle * Z_site).
    StateVector &apply_rz(std::size_t site, double angle) {
        check_site(site);
        const Complex up = std::polar(1.0, angle);
        const Complex down = std::conj(up);
        const std::size_t bit = std::size_t{1} << site;
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            amps_[b] *= (b & bit) ? down : up;
        }
        return *this;
    }

    /// exp(i * sum_q angles[q] Z_q) as a single diagonal pass, followed by Z on every
    /// qubit set in `z_mask`.
    StateVector &apply_rz_layer(std::span<const double> angles, std::uint64_t z_mask = 0) {
        if (angles.size() != n_) {
            throw std::invalid_argument("rotation layer needs one angle per qubit");
        }
        // Phase table built by doubling: entry b holds exp(i sum_q +-angle_q).
        phases_.assign(1, Complex{1.0, 0.0});
        phases_.reserve(amps_.size());
        for (std::size_t q = 0; q < n_; ++q) {
            const Complex up = std::polar(1.0, angles[q]);
            const Complex down = ((z_mask >> q) & 1) ? -std::conj(up) : std::conj(up);
            const std::size_t half = phases_.size();
            phases_.resize(2 * half);
            for (std::size_t b = 0; b < half; ++b) {
                phases_[b + half] = phases_[b] * down;
                phases_[b] *= up;
            }
        }
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            amps_[b] *= phases_[b];
        }
        return *this;
    }

    StateVector &apply_hadamard(std::size_t site) {
        check_site(site);
        butterfly(std::size_t{1} << site);
        scale(M_SQRT1_2);
        return *this;
    }

    /// H on every qubit (an in-place Walsh-Hadamard transform).
    StateVector &apply_hadamard_all() {
        for (std::size_t q = 0; q < n_; ++q) {
            butterfly(std::size_t{1} << q);
        }
        scale(std::pow(2.0, -0.5 * static_cast<double>(n_)));
        return *this;
    }

    StateVector &apply_cz(std::size_t a, std::size_t b) {
        check_site(a);
        check_site(b);
        if (a == b) {
            throw std::invalid_argument("CZ needs two distinct qubits");
        }
        const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
        for (std::size_t k = 0; k < amps_.size(); ++k) {
            if ((k & mask) == mask) {
                amps_[k] = -amps_[k];
            }
        }
        return *this;
    }

    /// CZ on every ring edge (q, q+1 mod n), each edge once.
    StateVector &apply_cz_ring() {
        if (n_ < 3) {
            throw std::invalid_argument("CZ ring needs at least 3 qubits");
        }
        const std::uint64_t full = (std::uint64_t{1} << n_) - 1;
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            const std::uint64_t rot = ((b >> 1) | (b << (n_ - 1))) & full;
            if (std::popcount(b & rot) & 1) {
                amps_[b] = -amps_[b];
            }
        }
        return *this;
    }

    /// One C-QCA step: the CZ ring followed by Hadamards on all qubits.
    StateVector &apply_cqca_layer() { return apply_cz_ring().apply_hadamard_all(); }

    /// Exact action of p, including its scalar.
    StateVector &apply_pauli(const PauliOperator &p) {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("Pauli on " + std::to_string(p.num_qubits()) + " qubits applied to " +
                                        std::to_string(n_) + "-qubit state");
        }
        const std::uint64_t xm = p.x_words()[0];
        const std::uint64_t zm = p.z_words()[0];
        static constexpr Complex kIPow[] = {Complex{1, 0}, Complex{0, 1}, Complex{-1, 0}, Complex{0, -1}};
        const Complex s = kIPow[(p.phase() + std::popcount(xm & zm)) & 3];
        auto factor = [&](std::uint64_t b) { return (std::popcount(b & zm) & 1) ? -s : s; };
        if (xm == 0) {
            for (std::size_t b = 0; b < amps_.size(); ++b) {
                amps_[b] *= factor(b);
            }
            return *this;
        }
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            const std::size_t c = b ^ xm;
            if (b < c) {
                const Complex ab = amps_[b];
                amps_[b] = factor(c) * amps_[c];
                amps_[c] = factor(b) * ab;
            }
        }
        return *this;
    }

    /// exp(i * angle * P) = cos(angle) + i sin(angle) P for a Hermitian Pauli P.
    StateVector &apply_pauli_exponential(const PauliOperator &p, double angle) {
        if (p.phase() & 1) {
            throw std::invalid_argument("Pauli exponential needs a Hermitian Pauli");
        }
        StateVector moved = *this;
        moved.apply_pauli(p);
        const double c = std::cos(angle);
        const Complex is{0.0, std::sin(angle)};
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            amps_[b] = c * amps_[b] + is * moved.amps_[b];
        }
        return *this;
    }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    Complex inner(const StateVector &other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("inner product of states with different sizes");
        }
        Complex acc = 0.0;
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            acc += std::conj(amps_[b]) * other.amps_[b];
        }
        return acc;
    }

    /// <psi|P|psi>.
    Complex expectation(const PauliOperator &p) const {
        StateVector moved = *this;
        moved.apply_pauli(p);
        return inner(moved);
    }

    void normalize() {
        const double nrm = std::sqrt(norm_squared());
        if (!(nrm > 0.0)) {
            throw std::domain_error("cannot normalize a zero state");
        }
        scale(1.0 / nrm);
    }

    /// Born-rule distribution |amps|^2.
    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            p[b] = std::norm(amps_[b]);
        }
        return p;
    }

    /// i.i.d. Z-basis samples, returned as basis indices.
    std::vector<std::uint32_t> sample(Rng &rng, std::size_t shots) const {
        if (shots == 0) {
            throw std::invalid_argument("sample needs at least one shot");
        }
        const auto probs = probabilities();
        CumulativeDistribution cdf(probs);
        std::vector<std::uint32_t> out(shots);
        for (auto &s : out) {
            s = cdf.draw(rng);
        }
        return out;
    }

   private:
    static std::size_t checked(std::size_t n) {
        if (n < 1 || n > kMaxQubits) {
            throw std::out_of_range("state vector supports 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                                    std::to_string(n));
        }
        return n;
    }

    void check_site(std::size_t site) const {
        if (site >= n_) {
            throw std::out_of_range("qubit " + std::to_string(site) + " out of range for " + std::to_string(n_) +
                                    " qubits");
        }
    }

    void butterfly(std::size_t stride) {
        for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
            for (std::size_t k = base; k < base + stride; ++k) {
                const Complex a = amps_[k];
                const Complex b = amps_[k + stride];
                amps_[k] = a + b;
                amps_[k + stride] = a - b;
            }
        }
    }

    void scale(double f) {
        for (auto &a : amps_) {
            a *= f;
        }
    }

    std::size_t n_;
    std::vector<Complex> amps_;
    std::vector<Complex> phases_;  // scratch for apply_rz_layer
};

/// Renders basis index `value` as a 0/1 string with qubit 0 leftmost.
inline std::string bitstring(std::uint64_t value, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t q = 0; q < n; ++q) {
        if ((value >> q) & 1) {
            s[q] = '1';
        }
    }
    return s;
}

}  // namespace vmbqc
