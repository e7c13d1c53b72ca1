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
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmbqc {

/// Binary N x D matrix of effective byproducts, one bit per (qubit, layer) slot.
///
/// Bits are stored layer-major: slot (i, j) lives at flat index j * N + i.
class ByproductMask {
   public:
    ByproductMask() = default;
    ByproductMask(std::size_t qubits, std::size_t depth)
        : qubits_(qubits), depth_(depth), words_((qubits * depth + 63) / 64, 0) {}

    std::size_t qubits() const { return qubits_; }
    std::size_t depth() const { return depth_; }
    std::size_t size() const { return qubits_ * depth_; }

    bool get(std::size_t i, std::size_t j) const {
        const std::size_t k = index(i, j);
        return (words_[k >> 6] >> (k & 63)) & 1;
    }

    void set(std::size_t i, std::size_t j, bool value) {
        const std::size_t k = index(i, j);
        const std::uint64_t bit = std::uint64_t{1} << (k & 63);
        if (value) {
            words_[k >> 6] |= bit;
        } else {
            words_[k >> 6] &= ~bit;
        }
    }

    /// Flat-index access in layer-major order.
    bool get_flat(std::size_t k) const { return (words_[k >> 6] >> (k & 63)) & 1; }
    void set_flat(std::size_t k, bool value) { set(k % qubits_, k / qubits_, value); }

    bool any() const {
        for (auto w : words_) {
            if (w) {
                return true;
            }
        }
        return false;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) {
            c += static_cast<std::size_t>(std::popcount(w));
        }
        return c;
    }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    /// Mask whose flat bits are the low bits of `code` (for enumerating masks with N*D <= 64).
    static ByproductMask from_code(std::size_t qubits, std::size_t depth, std::uint64_t code) {
        ByproductMask m(qubits, depth);
        if (!m.words_.empty()) {
            const std::size_t n = m.size();
            m.words_[0] = n >= 64 ? code : code & ((std::uint64_t{1} << n) - 1);
        }
        return m;
    }

    bool operator==(const ByproductMask &) const = default;

   private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i >= qubits_ || j >= depth_) {
            throw std::out_of_range("mask slot (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") outside " + std::to_string(qubits_) + "x" + std::to_string(depth_));
        }
        return j * qubits_ + i;
    }

    std::size_t qubits_ = 0;
    std::size_t depth_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace vmbqc
