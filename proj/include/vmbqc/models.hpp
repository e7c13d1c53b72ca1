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
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "vmbqc/byproduct_mask.hpp"
#include "vmbqc/cqca.hpp"
#include "vmbqc/random.hpp"
#include "vmbqc/state_vector.hpp"

namespace vmbqc {

/// Which generative model a parameter set drives.
///   Unitary     - the byproduct-free circuit U_c(theta).
///   Uncorrected - mixture over effective byproducts, no end correction (E_c).
///   Corrected   - mixture with the byproduct-conditioned end Pauli (E~_c).
enum class ModelKind { Unitary, Uncorrected, Corrected };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Unitary:
            return "unitary";
        case ModelKind::Uncorrected:
            return "uncorrected";
        case ModelKind::Corrected:
            return "corrected";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
    if (name == "unitary" || name == "U") {
        return ModelKind::Unitary;
    }
    if (name == "uncorrected" || name == "E") {
        return ModelKind::Uncorrected;
    }
    if (name == "corrected" || name == "Et") {
        return ModelKind::Corrected;
    }
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

/// Register state the circuit starts from. Plus is the default everywhere; Zero is
/// kept as a switchable alternative for comparison runs.
enum class InputState { Plus, Zero };

inline std::string_view to_string(InputState input) { return input == InputState::Zero ? "zero" : "plus"; }

inline InputState parse_input_state(std::string_view name) {
    if (name == "plus") {
        return InputState::Plus;
    }
    if (name == "zero") {
        return InputState::Zero;
    }
    throw std::invalid_argument("unknown input state '" + std::string(name) + "'");
}

inline bool is_mixture(ModelKind kind) { return kind != ModelKind::Unitary; }

inline double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// Variational parameters: rotation angles theta(i, j) in radians and correction
/// logits zeta(i, j), with correction probability p = sigmoid(zeta). Rows are
/// qubits, columns are layers. zeta = +inf pins p to exactly 1, -inf to 0.
struct ModelParams {
    Eigen::MatrixXd theta;
    Eigen::MatrixXd zeta;

    ModelParams() = default;
    ModelParams(std::size_t qubits, std::size_t depth)
        : theta(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(qubits), static_cast<Eigen::Index>(depth))),
          zeta(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(qubits), static_cast<Eigen::Index>(depth),
                                         std::numeric_limits<double>::infinity())) {}

    std::size_t qubits() const { return static_cast<std::size_t>(theta.rows()); }
    std::size_t depth() const { return static_cast<std::size_t>(theta.cols()); }

    double correction_probability(std::size_t i, std::size_t j) const {
        return sigmoid(zeta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }

    /// P(effective byproduct at (i, j)) = (1 - p) / 2.
    double byproduct_probability(std::size_t i, std::size_t j) const {
        return 0.5 * sigmoid(-zeta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }

    /// Copy with p(i, j) forced to exactly 0 or 1.
    ModelParams with_pinned_correction(std::size_t i, std::size_t j, bool corrected) const {
        ModelParams out = *this;
        out.zeta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            corrected ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        return out;
    }

    ModelParams with_shifted_angle(std::size_t i, std::size_t j, double delta) const {
        ModelParams out = *this;
        out.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += delta;
        return out;
    }

    void validate() const {
        if (theta.rows() != zeta.rows() || theta.cols() != zeta.cols()) {
            throw std::invalid_argument("theta and zeta shapes differ");
        }
        if (theta.rows() < 1 || theta.cols() < 1) {
            throw std::invalid_argument("model needs at least one qubit and one layer");
        }
        if (!theta.allFinite() || zeta.hasNaN()) {
            throw std::invalid_argument("non-finite model parameter");
        }
    }
};

/// The fixed part of the model at a given (N, D): the C-QCA table plus per-slot
/// precomputation. Immutable once built; share freely across threads.
class Ansatz {
   public:
    /// Largest N*D for which exact_distribution enumerates every mask.
    static constexpr std::size_t kMaxEnumeratedSlots = 12;

    Ansatz(std::size_t qubits, std::size_t depth, InputState input = InputState::Plus)
        : table_(qubits), depth_(depth), input_(input) {
        if (depth < 1) {
            throw std::invalid_argument("circuit depth must be at least 1");
        }
        if (qubits > StateVector::kMaxQubits) {
            throw std::invalid_argument("at most " + std::to_string(StateVector::kMaxQubits) + " qubits supported");
        }
        slot_flip_bits_.resize(qubits * depth);
        for (std::size_t j = 0; j < depth; ++j) {
            for (std::size_t i = 0; i < qubits; ++i) {
                slot_flip_bits_[j * qubits + i] = propagated_generator(table_, depth, i, j).x_words()[0];
            }
        }
    }

    std::size_t qubits() const { return table_.num_qubits(); }
    std::size_t depth() const { return depth_; }
    std::size_t slots() const { return qubits() * depth_; }
    std::size_t dimension() const { return std::size_t{1} << qubits(); }
    const CqcaTable &table() const { return table_; }
    InputState input() const { return input_; }

    /// Independent Bernoulli((1 - p) / 2) draw per slot, layer-major order.
    ByproductMask sample_mask(const ModelParams &params, Rng &rng) const {
        check(params);
        ByproductMask mask(qubits(), depth_);
        for (std::size_t k = 0; k < slots(); ++k) {
            if (uniform01(rng) < params.byproduct_probability(k % qubits(), k / qubits())) {
                mask.set_flat(k, true);
            }
        }
        return mask;
    }

    /// U_c(theta) applied to the input register: per layer the rotations, then one C-QCA step.
    StateVector run_unitary(const ModelParams &params) const {
        check(params);
        return run(params.theta, nullptr, nullptr);
    }

    /// Uncorrected: Z byproducts right after the rotations of their layer.
    /// Corrected: the same circuit followed by the end correction P_{D+1}(mask).
    StateVector run_with_mask(const ModelParams &params, const ByproductMask &mask, ModelKind kind) const {
        check(params);
        check(mask);
        if (kind == ModelKind::Unitary) {
            throw std::invalid_argument("run_with_mask needs a mixture model kind");
        }
        auto state = run(params.theta, &mask, nullptr);
        if (kind == ModelKind::Corrected) {
            state.apply_pauli(end_correction(table_, mask));
        }
        return state;
    }

    /// Corrected model in angle-flip form: theta(i, j) -> (-1)^kappa(i, j) theta(i, j), no byproducts.
    StateVector run_with_angle_flips(const ModelParams &params, const ByproductMask &mask) const {
        check(params);
        check(mask);
        const auto flips = angle_flips(table_, mask);
        return run(params.theta, nullptr, &flips);
    }

    /// X-support of P_{D+1}(mask): the measured bits the end correction flips.
    std::uint64_t end_flip_bits(const ByproductMask &mask) const {
        std::uint64_t flip = 0;
        for (std::size_t k = 0; k < slots(); ++k) {
            if (mask.get_flat(k)) {
                flip ^= slot_flip_bits_[k];
            }
        }
        return flip;
    }

    /// Born distribution of one branch. The Corrected end Pauli is applied classically
    /// by relabelling outcomes; its Z part does not change Z-basis statistics.
    std::vector<double> branch_probabilities(ModelKind kind, const ModelParams &params,
                                             const ByproductMask &mask) const {
        if (kind == ModelKind::Unitary) {
            return run_unitary(params).probabilities();
        }
        check(params);
        check(mask);
        auto probs = run(params.theta, &mask, nullptr).probabilities();
        if (kind == ModelKind::Corrected) {
            const std::uint64_t flip = end_flip_bits(mask);
            if (flip) {
                std::vector<double> moved(probs.size());
                for (std::size_t b = 0; b < probs.size(); ++b) {
                    moved[b ^ flip] = probs[b];
                }
                probs = std::move(moved);
            }
        }
        return probs;
    }

    /// One Z-basis sample per shot; mixture kinds draw a fresh mask every shot.
    std::vector<std::uint32_t> sample(ModelKind kind, const ModelParams &params, std::size_t shots,
                                      Rng &rng) const {
        check(params);
        if (shots == 0) {
            throw std::invalid_argument("sample_model needs at least one shot");
        }
        std::vector<std::uint32_t> out(shots);
        if (kind == ModelKind::Unitary) {
            const auto probs = run_unitary(params).probabilities();
            CumulativeDistribution cdf(probs);
            for (auto &s : out) {
                s = cdf.draw(rng);
            }
            return out;
        }
        const std::vector<double> rates = byproduct_rates(params);
        // Per-call memo of branch samplers. Outputs are identical to recomputing every
        // shot: the mask and outcome consume the same random draws either way.
        std::unordered_map<std::uint64_t, CumulativeDistribution> memo;
        const bool memoize = slots() <= 64;
        ByproductMask mask(qubits(), depth_);
        for (auto &s : out) {
            draw_mask(rates, rng, mask);
            if (memoize) {
                const std::uint64_t key = mask.words().empty() ? 0 : mask.words()[0];
                auto it = memo.find(key);
                if (it == memo.end()) {
                    const auto probs = run(params.theta, &mask, nullptr).probabilities();
                    it = memo.emplace(key, CumulativeDistribution(probs)).first;
                }
                s = it->second.draw(rng);
            } else {
                const auto probs = run(params.theta, &mask, nullptr).probabilities();
                s = CumulativeDistribution(probs).draw(rng);
            }
            if (kind == ModelKind::Corrected) {
                s ^= static_cast<std::uint32_t>(end_flip_bits(mask));
            }
        }
        return out;
    }

    /// Exact output distribution: sum over all 2^(N*D) masks of p(mask) * branch distribution.
    /// Throws std::length_error when N*D exceeds kMaxEnumeratedSlots.
    std::vector<double> exact_distribution(ModelKind kind, const ModelParams &params) const {
        check(params);
        if (kind == ModelKind::Unitary) {
            return run_unitary(params).probabilities();
        }
        if (slots() > kMaxEnumeratedSlots) {
            throw std::length_error("exact enumeration limited to N*D <= " + std::to_string(kMaxEnumeratedSlots) +
                                    "; supply a branch budget");
        }
        const std::vector<double> rates = byproduct_rates(params);
        std::vector<double> total(dimension(), 0.0);
        const std::uint64_t masks = std::uint64_t{1} << slots();
        for (std::uint64_t code = 0; code < masks; ++code) {
            double w = 1.0;
            for (std::size_t k = 0; k < slots() && w > 0.0; ++k) {
                w *= ((code >> k) & 1) ? rates[k] : 1.0 - rates[k];
            }
            if (w == 0.0) {
                continue;
            }
            const auto probs = branch_probabilities(kind, params, ByproductMask::from_code(qubits(), depth_, code));
            for (std::size_t b = 0; b < total.size(); ++b) {
                total[b] += w * probs[b];
            }
        }
        return total;
    }

    /// Monte-Carlo over masks: mean of `branches` exact branch distributions.
    std::vector<double> estimate_distribution(ModelKind kind, const ModelParams &params, std::size_t branches,
                                              Rng &rng) const {
        check(params);
        if (kind == ModelKind::Unitary) {
            return run_unitary(params).probabilities();
        }
        if (branches == 0) {
            throw std::invalid_argument("branch budget must be positive");
        }
        const std::vector<double> rates = byproduct_rates(params);
        std::vector<double> total(dimension(), 0.0);
        ByproductMask mask(qubits(), depth_);
        for (std::size_t r = 0; r < branches; ++r) {
            draw_mask(rates, rng, mask);
            const auto probs = branch_probabilities(kind, params, mask);
            for (std::size_t b = 0; b < total.size(); ++b) {
                total[b] += probs[b];
            }
        }
        for (auto &t : total) {
            t /= static_cast<double>(branches);
        }
        return total;
    }

   private:
    void check(const ModelParams &params) const {
        params.validate();
        if (params.qubits() != qubits() || params.depth() != depth_) {
            throw std::invalid_argument("parameters are " + std::to_string(params.qubits()) + "x" +
                                        std::to_string(params.depth()) + ", ansatz is " + std::to_string(qubits()) +
                                        "x" + std::to_string(depth_));
        }
    }

    void check(const ByproductMask &mask) const {
        if (mask.qubits() != qubits() || mask.depth() != depth_) {
            throw std::invalid_argument("byproduct mask dimensions do not match the ansatz");
        }
    }

    std::vector<double> byproduct_rates(const ModelParams &params) const {
        std::vector<double> rates(slots());
        for (std::size_t k = 0; k < slots(); ++k) {
            rates[k] = params.byproduct_probability(k % qubits(), k / qubits());
        }
        return rates;
    }

    void draw_mask(const std::vector<double> &rates, Rng &rng, ByproductMask &mask) const {
        auto words = mask.words();
        std::fill(words.begin(), words.end(), 0);
        for (std::size_t k = 0; k < rates.size(); ++k) {
            if (uniform01(rng) < rates[k]) {
                words[k >> 6] |= std::uint64_t{1} << (k & 63);
            }
        }
    }

    StateVector run(const Eigen::MatrixXd &theta, const ByproductMask *byproducts, const ByproductMask *flips) const {
        const std::size_t n = qubits();
        auto state = input_ == InputState::Zero ? StateVector(n) : StateVector::plus_state(n);
        std::vector<double> angles(n);
        for (std::size_t j = 0; j < depth_; ++j) {
            std::uint64_t zmask = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double a = theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (flips && flips->get(i, j)) {
                    a = -a;
                }
                angles[i] = a;
                if (byproducts && byproducts->get(i, j)) {
                    zmask |= std::uint64_t{1} << i;
                }
            }
            state.apply_rz_layer(angles, zmask);
            state.apply_cqca_layer();
        }
        return state;
    }

    CqcaTable table_;
    std::size_t depth_;
    InputState input_;
    std::vector<std::uint64_t> slot_flip_bits_;
};

/// Target parameters drawn as in the mixed-channel learning experiment:
/// theta and p i.i.d. uniform on [0.8, 1]. Unitary targets keep a p ~ 1 sentinel.
inline ModelParams random_target(ModelKind kind, std::size_t qubits, std::size_t depth, Rng &rng) {
    ModelParams params(qubits, depth);
    for (Eigen::Index j = 0; j < params.theta.cols(); ++j) {
        for (Eigen::Index i = 0; i < params.theta.rows(); ++i) {
            params.theta(i, j) = 0.8 + 0.2 * uniform01(rng);
        }
    }
    for (Eigen::Index j = 0; j < params.zeta.cols(); ++j) {
        for (Eigen::Index i = 0; i < params.zeta.rows(); ++i) {
            params.zeta(i, j) = kind == ModelKind::Unitary ? logit(1.0 - 1e-6) : logit(0.8 + 0.2 * uniform01(rng));
        }
    }
    return params;
}

// Convenience wrappers that build the ansatz on the fly.

inline ByproductMask sample_mask(const ModelParams &params, Rng &rng) {
    return Ansatz(params.qubits(), params.depth()).sample_mask(params, rng);
}

inline StateVector run_unitary(const ModelParams &params) {
    return Ansatz(params.qubits(), params.depth()).run_unitary(params);
}

inline StateVector run_with_mask(const ModelParams &params, const ByproductMask &mask, ModelKind kind) {
    return Ansatz(params.qubits(), params.depth()).run_with_mask(params, mask, kind);
}

inline std::vector<std::uint32_t> sample_model(ModelKind kind, const ModelParams &params, std::size_t shots,
                                               Rng &rng) {
    return Ansatz(params.qubits(), params.depth()).sample(kind, params, shots, rng);
}

inline std::vector<double> exact_distribution(ModelKind kind, const ModelParams &params) {
    return Ansatz(params.qubits(), params.depth()).exact_distribution(kind, params);
}

}  // namespace vmbqc
