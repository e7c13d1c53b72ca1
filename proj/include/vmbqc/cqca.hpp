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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmbqc/byproduct_mask.hpp"
#include "vmbqc/pauli.hpp"

namespace vmbqc {

/// The cluster-state Clifford cellular automaton on a ring of n qubits,
/// tabulated as T^k(Z_i) and T^k(X_i) for every power k in one period.
///
/// One step is a CZ on every ring edge followed by a Hadamard on every qubit:
///   T Z_i T^dag = X_i,   T X_i T^dag = X_{i-1} Z_i X_{i+1}   (indices mod n).
/// Up to signs the action repeats after n steps (n even) or 2n steps (n odd).
/// For odd n the 2n-th power maps every generator to minus itself, so the
/// table keeps the full signed period: n for even n, 4n for odd n.
class CqcaTable {
   public:
    static constexpr std::size_t kMinQubits = 3;

    explicit CqcaTable(std::size_t n)
        : n_(n), period_(n % 2 == 0 ? n : 4 * n), symplectic_period_(n % 2 == 0 ? n : 2 * n) {
        if (n < kMinQubits) {
            throw std::invalid_argument("C-QCA ring needs at least 3 qubits, got " + std::to_string(n));
        }
        z_images_.reserve(period_ * n_);
        x_images_.reserve(period_ * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            z_images_.push_back(PauliOperator::single(n_, i, PauliKind::Z));
        }
        for (std::size_t i = 0; i < n_; ++i) {
            x_images_.push_back(PauliOperator::single(n_, i, PauliKind::X));
        }
        // k = 1 straight from the transition rules.
        for (std::size_t i = 0; i < n_; ++i) {
            z_images_.push_back(PauliOperator::single(n_, i, PauliKind::X));
        }
        for (std::size_t i = 0; i < n_; ++i) {
            x_images_.push_back(PauliOperator::single(n_, (i + n_ - 1) % n_, PauliKind::X) *
                                PauliOperator::single(n_, i, PauliKind::Z) *
                                PauliOperator::single(n_, (i + 1) % n_, PauliKind::X));
        }
        for (std::size_t k = 2; k <= period_; ++k) {
            for (std::size_t i = 0; i < n_; ++i) {
                auto z = step(z_images_[(k - 1) * n_ + i]);
                auto x = step(x_images_[(k - 1) * n_ + i]);
                if (k == period_) {
                    if (z != z_images_[i] || x != x_images_[i]) {
                        throw std::logic_error("C-QCA failed to return to identity after " +
                                               std::to_string(period_) + " steps");
                    }
                    continue;
                }
                z_images_.push_back(std::move(z));
                x_images_.push_back(std::move(x));
            }
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (z_image(symplectic_period_, i).with_phase(0) != z_images_[i] ||
                x_image(symplectic_period_, i).with_phase(0) != x_images_[i]) {
                throw std::logic_error("C-QCA images do not repeat up to sign after " +
                                       std::to_string(symplectic_period_) + " steps");
            }
        }
    }

    std::size_t num_qubits() const { return n_; }
    /// Smallest L with T^L p T^-L = p exactly, signs included.
    std::size_t period() const { return period_; }
    /// Smallest L with T^L p T^-L = +-p for every Pauli p.
    std::size_t symplectic_period() const { return symplectic_period_; }

    /// [k]_L, valid for negative k too.
    std::size_t reduce(std::int64_t k) const {
        const auto L = static_cast<std::int64_t>(period_);
        return static_cast<std::size_t>(((k % L) + L) % L);
    }

    const PauliOperator &z_image(std::int64_t k, std::size_t i) const { return z_images_.at(reduce(k) * n_ + i); }
    const PauliOperator &x_image(std::int64_t k, std::size_t i) const { return x_images_.at(reduce(k) * n_ + i); }

    /// T^k p T^-k, assembled from the generator images (Y_q = i X_q Z_q).
    PauliOperator conjugate(std::int64_t k, const PauliOperator &p) const {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("Pauli on " + std::to_string(p.num_qubits()) +
                                        " qubits conjugated by a " + std::to_string(n_) + "-qubit C-QCA");
        }
        const std::size_t r = reduce(k);
        return assemble(p, &z_images_[r * n_], &x_images_[r * n_]);
    }

   private:
    PauliOperator step(const PauliOperator &p) const { return assemble(p, &z_images_[n_], &x_images_[n_]); }

    PauliOperator assemble(const PauliOperator &p, const PauliOperator *zs, const PauliOperator *xs) const {
        auto out = PauliOperator::identity(n_).with_phase(p.phase());
        for (std::size_t q = 0; q < n_; ++q) {
            const bool x = p.x(q);
            const bool z = p.z(q);
            if (x && z) {
                out = out.with_phase(static_cast<std::uint8_t>(out.phase() + 1));
            }
            if (x) {
                out *= xs[q];
            }
            if (z) {
                out *= zs[q];
            }
        }
        return out;
    }

    std::size_t n_;
    std::size_t period_;
    std::size_t symplectic_period_;
    std::vector<PauliOperator> z_images_;  // [k * n + i]
    std::vector<PauliOperator> x_images_;
};

/// Byproducts of every layer before `layer` pushed to a common point, as the ordered
/// product over j' = layer-1..0 and i' = N-1..0 of T^(depth - j')(Z_i')^s(i',j').
///
/// Layers are 0-based: layer 0 yields the identity, layer == depth yields the
/// end-of-circuit correction operator.
inline PauliOperator propagated_byproduct(const CqcaTable &table, std::size_t depth, std::size_t layer,
                                          const ByproductMask &mask) {
    const std::size_t n = table.num_qubits();
    if (mask.qubits() != n || mask.depth() != depth) {
        throw std::invalid_argument("byproduct mask is " + std::to_string(mask.qubits()) + "x" +
                                    std::to_string(mask.depth()) + ", expected " + std::to_string(n) + "x" +
                                    std::to_string(depth));
    }
    if (layer > depth) {
        throw std::out_of_range("layer " + std::to_string(layer) + " beyond depth " + std::to_string(depth));
    }
    auto out = PauliOperator::identity(n);
    for (std::size_t jj = layer; jj-- > 0;) {
        for (std::size_t ii = n; ii-- > 0;) {
            if (mask.get(ii, jj)) {
                out *= table.z_image(static_cast<std::int64_t>(depth - jj), ii);
            }
        }
    }
    return out;
}

/// End-of-circuit correction P_{D+1}(s).
inline PauliOperator end_correction(const CqcaTable &table, const ByproductMask &mask) {
    return propagated_byproduct(table, mask.depth(), mask.depth(), mask);
}

/// Rotation generator of slot (i, j) pushed to the end of the circuit: T^(D - j)(Z_i).
inline const PauliOperator &propagated_generator(const CqcaTable &table, std::size_t depth, std::size_t i,
                                                 std::size_t j) {
    return table.z_image(static_cast<std::int64_t>(depth - j), i);
}

/// Angle-flip bit of slot (i, j): P_j(s) G = (-1)^kappa G P_j(s) with G the propagated generator.
inline bool kappa(const CqcaTable &table, std::size_t depth, std::size_t i, std::size_t j,
                  const ByproductMask &mask) {
    if (i >= table.num_qubits() || j >= depth) {
        throw std::out_of_range("kappa slot (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    }
    return !propagated_byproduct(table, depth, j, mask).commutes(propagated_generator(table, depth, i, j));
}

/// All angle-flip bits for a mask in one sweep over layers.
inline ByproductMask angle_flips(const CqcaTable &table, const ByproductMask &mask) {
    const std::size_t n = table.num_qubits();
    const std::size_t depth = mask.depth();
    if (mask.qubits() != n) {
        throw std::invalid_argument("byproduct mask width does not match the C-QCA ring");
    }
    ByproductMask flips(n, depth);
    auto frame = PauliOperator::identity(n);
    for (std::size_t j = 0; j < depth; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            flips.set(i, j, !frame.commutes(propagated_generator(table, depth, i, j)));
        }
        // Phases are irrelevant for commutation, so the layer can be folded in any order.
        for (std::size_t i = 0; i < n; ++i) {
            if (mask.get(i, j)) {
                frame *= propagated_generator(table, depth, i, j);
            }
        }
    }
    return flips;
}

}  // namespace vmbqc
