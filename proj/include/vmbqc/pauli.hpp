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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vmbqc {

enum class PauliKind : std::uint8_t { X, Y, Z };

/// An N-qubit Pauli operator in symplectic form.
///
/// The represented operator is i^phase * (P_0 (x) P_1 (x) ... ) where each
/// letter P_q is the Hermitian Pauli selected by (x_q, z_q):
///   (0,0) = I, (1,0) = X, (0,1) = Z, (1,1) = Y.
/// Under this convention Y = iXZ, so Z*X = +iY and X*Z = -iY.
///
/// Qubit q is stored in bit (q % 64) of word (q / 64).
class PauliOperator {
   public:
    PauliOperator() = default;

    static PauliOperator identity(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("PauliOperator needs at least one qubit");
        }
        PauliOperator p;
        p.num_qubits_ = n;
        p.xs_.assign(word_count(n), 0);
        p.zs_.assign(word_count(n), 0);
        return p;
    }

    static PauliOperator single(std::size_t n, std::size_t site, PauliKind kind) {
        if (site >= n) {
            throw std::out_of_range("Pauli site " + std::to_string(site) + " out of range for " +
                                    std::to_string(n) + " qubits");
        }
        auto p = identity(n);
        if (kind != PauliKind::Z) {
            p.xs_[site >> 6] |= std::uint64_t{1} << (site & 63);
        }
        if (kind != PauliKind::X) {
            p.zs_[site >> 6] |= std::uint64_t{1} << (site & 63);
        }
        return p;
    }

    /// Parses "+XIZ", "-iY", "ZZ" (sign optional). '_' is accepted for I.
    static PauliOperator from_string(std::string_view text) {
        std::uint8_t phase = 0;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            phase = text[pos] == '-' ? 2 : 0;
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i') {
            phase = static_cast<std::uint8_t>((phase + 1) & 3);
            ++pos;
        }
        if (pos == text.size()) {
            throw std::invalid_argument("empty Pauli string");
        }
        auto p = identity(text.size() - pos);
        p.phase_ = phase;
        for (std::size_t q = 0; pos < text.size(); ++pos, ++q) {
            const std::uint64_t bit = std::uint64_t{1} << (q & 63);
            switch (text[pos]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.xs_[q >> 6] |= bit;
                    break;
                case 'Y':
                    p.xs_[q >> 6] |= bit;
                    p.zs_[q >> 6] |= bit;
                    break;
                case 'Z':
                    p.zs_[q >> 6] |= bit;
                    break;
                default:
                    throw std::invalid_argument("bad Pauli character '" + std::string(1, text[pos]) +
                                                "' in \"" + std::string(text) + "\"");
            }
        }
        return p;
    }

    std::size_t num_qubits() const { return num_qubits_; }
    /// Exponent k of the scalar i^k, in {0,1,2,3}.
    std::uint8_t phase() const { return phase_; }
    bool x(std::size_t q) const { return (xs_[q >> 6] >> (q & 63)) & 1; }
    bool z(std::size_t q) const { return (zs_[q >> 6] >> (q & 63)) & 1; }
    std::span<const std::uint64_t> x_words() const { return xs_; }
    std::span<const std::uint64_t> z_words() const { return zs_; }

    bool is_identity_up_to_phase() const {
        for (std::size_t w = 0; w < xs_.size(); ++w) {
            if (xs_[w] | zs_[w]) {
                return false;
            }
        }
        return true;
    }

    /// Same bits, scalar replaced by i^k.
    PauliOperator with_phase(std::uint8_t k) const {
        auto p = *this;
        p.phase_ = static_cast<std::uint8_t>(k & 3);
        return p;
    }

    PauliOperator &operator*=(const PauliOperator &rhs) {
        check_same_size(rhs);
        // Work in the raw basis X^x Z^z where moving Z^z1 past X^x2 costs (-1)^(z1.x2).
        int raw = phase_ + count_y() + rhs.phase_ + rhs.count_y();
        int swaps = 0;
        for (std::size_t w = 0; w < xs_.size(); ++w) {
            swaps += std::popcount(zs_[w] & rhs.xs_[w]);
            xs_[w] ^= rhs.xs_[w];
            zs_[w] ^= rhs.zs_[w];
        }
        raw += 2 * swaps - count_y();
        phase_ = static_cast<std::uint8_t>(raw & 3);
        return *this;
    }

    friend PauliOperator operator*(PauliOperator lhs, const PauliOperator &rhs) {
        lhs *= rhs;
        return lhs;
    }

    /// True iff the symplectic inner product vanishes mod 2.
    bool commutes(const PauliOperator &other) const {
        check_same_size(other);
        int parity = 0;
        for (std::size_t w = 0; w < xs_.size(); ++w) {
            parity ^= std::popcount((xs_[w] & other.zs_[w]) ^ (zs_[w] & other.xs_[w])) & 1;
        }
        return parity == 0;
    }

    bool operator==(const PauliOperator &) const = default;

    std::string str() const {
        static constexpr const char *kPrefix[] = {"+", "+i", "-", "-i"};
        std::string out = kPrefix[phase_];
        for (std::size_t q = 0; q < num_qubits_; ++q) {
            out.push_back("IXZY"[x(q) | (z(q) << 1)]);
        }
        return out;
    }

    /// Dense 2^n x 2^n matrix; basis index bit q is qubit q.
    Eigen::MatrixXcd to_dense() const {
        if (num_qubits_ > 12) {
            throw std::invalid_argument("to_dense is limited to 12 qubits");
        }
        using C = std::complex<double>;
        const std::size_t dim = std::size_t{1} << num_qubits_;
        std::uint64_t xmask = num_qubits_ ? xs_[0] : 0;
        std::uint64_t zmask = num_qubits_ ? zs_[0] : 0;
        static constexpr C kIPow[] = {C{1, 0}, C{0, 1}, C{-1, 0}, C{0, -1}};
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        // P|b> = i^(phase + #Y) (-1)^(popcount(b & z)) |b ^ x> using Y = iXZ.
        const C scalar = kIPow[(phase_ + count_y()) & 3];
        for (std::size_t col = 0; col < dim; ++col) {
            const std::size_t row = col ^ xmask;
            const bool odd = std::popcount(col & zmask) & 1;
            m(row, col) = odd ? -scalar : scalar;
        }
        return m;
    }

   private:
    static std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

    int count_y() const {
        int c = 0;
        for (std::size_t w = 0; w < xs_.size(); ++w) {
            c += std::popcount(xs_[w] & zs_[w]);
        }
        return c;
    }

    void check_same_size(const PauliOperator &other) const {
        if (other.num_qubits_ != num_qubits_) {
            throw std::invalid_argument("Pauli size mismatch: " + std::to_string(num_qubits_) + " vs " +
                                        std::to_string(other.num_qubits_));
        }
    }

    std::size_t num_qubits_ = 0;
    std::vector<std::uint64_t> xs_;
    std::vector<std::uint64_t> zs_;
    std::uint8_t phase_ = 0;
};

inline PauliOperator multiply(const PauliOperator &a, const PauliOperator &b) { return a * b; }

inline bool commutes(const PauliOperator &a, const PauliOperator &b) { return a.commutes(b); }

}  // namespace vmbqc
