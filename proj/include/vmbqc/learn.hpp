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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vmbqc/models.hpp"
#include "vmbqc/random.hpp"
#include "vmbqc/targets.hpp"

namespace vmbqc {

/// Bandwidths of the Gaussian-mixture kernel.
struct KernelSpec {
    std::vector<double> bandwidths{0.5, 4.0};

    void validate() const {
        if (bandwidths.empty()) {
            throw std::invalid_argument("kernel needs at least one bandwidth");
        }
        for (double s : bandwidths) {
            if (!(s > 0.0)) {
                throw std::invalid_argument("kernel bandwidths must be positive");
            }
        }
    }
};

/// K(x, y) = (1/d) sum_k exp(-(x - y)^2 / (2 sigma_k)) on integer samples.
/// Note the bandwidth enters linearly, not squared.
inline double kernel(const KernelSpec &spec, std::int64_t x, std::int64_t y) {
    const double d2 = static_cast<double>(x - y) * static_cast<double>(x - y);
    double acc = 0.0;
    for (double s : spec.bandwidths) {
        acc += std::exp(-d2 / (2.0 * s));
    }
    return acc / static_cast<double>(spec.bandwidths.size());
}

/// The kernel tabulated by |x - y| for n-bit outcomes, with expectations over
/// outcome weight vectors. Plug-in (V-statistic) sample averages are exactly
/// expectations under the empirical histograms.
class MixtureKernel {
   public:
    MixtureKernel(const KernelSpec &spec, std::size_t n_bits) : by_distance_(std::size_t{1} << n_bits) {
        spec.validate();
        for (std::size_t d = 0; d < by_distance_.size(); ++d) {
            by_distance_[d] = kernel(spec, static_cast<std::int64_t>(d), 0);
        }
    }

    std::size_t dimension() const { return by_distance_.size(); }

    double operator()(std::uint32_t x, std::uint32_t y) const { return by_distance_[x > y ? x - y : y - x]; }

    /// sum_x sum_y a[x] b[y] K(x, y).
    double expectation(std::span<const double> a, std::span<const double> b) const {
        if (a.size() != dimension() || b.size() != dimension()) {
            throw std::invalid_argument("kernel expectation over vectors of the wrong size");
        }
        support_a_.clear();
        support_b_.clear();
        for (std::uint32_t x = 0; x < a.size(); ++x) {
            if (a[x] != 0.0) {
                support_a_.push_back(x);
            }
            if (b[x] != 0.0) {
                support_b_.push_back(x);
            }
        }
        double acc = 0.0;
        for (auto x : support_a_) {
            double row = 0.0;
            for (auto y : support_b_) {
                row += b[y] * (*this)(x, y);
            }
            acc += a[x] * row;
        }
        return acc;
    }

    /// E_qq K - 2 E_qp K + E_pp K.
    double mmd(std::span<const double> q, std::span<const double> p) const {
        return expectation(q, q) - 2.0 * expectation(q, p) + expectation(p, p);
    }

   private:
    std::vector<double> by_distance_;
    mutable std::vector<std::uint32_t> support_a_;
    mutable std::vector<std::uint32_t> support_b_;
};

/// Normalised outcome histogram of a sample list over 2^n outcomes.
inline std::vector<double> histogram(std::span<const std::uint32_t> samples, std::size_t dimension) {
    if (samples.empty()) {
        throw std::invalid_argument("histogram of an empty sample list");
    }
    std::vector<double> h(dimension, 0.0);
    for (auto x : samples) {
        h.at(x) += 1.0;
    }
    for (auto &v : h) {
        v /= static_cast<double>(samples.size());
    }
    return h;
}

/// Plug-in MMD between two sample sets (all ordered pairs, self-pairs included).
inline double mmd_loss(const KernelSpec &spec, const SampleSet &model, const SampleSet &target) {
    if (model.samples.empty() || target.samples.empty()) {
        throw std::invalid_argument("mmd_loss needs two nonempty sample sets");
    }
    if (model.n_bits != target.n_bits) {
        throw std::invalid_argument("mmd_loss over sample sets of different widths");
    }
    MixtureKernel k(spec, model.n_bits);
    const auto q = histogram(model.samples, k.dimension());
    const auto p = histogram(target.samples, k.dimension());
    return k.mmd(q, p);
}

/// Parameter-shift offset for a gate exp(i theta Z): the Born probabilities are
/// trigonometric in 2 theta, so d/dtheta q = q(theta + pi/4) - q(theta - pi/4).
inline constexpr double kAngleShift = std::numbers::pi / 4.0;

/// dL/dtheta from the shifted, baseline and target outcome weights.
inline double angle_gradient(const MixtureKernel &k, std::span<const double> plus, std::span<const double> minus,
                             std::span<const double> baseline, std::span<const double> target) {
    return 2.0 * (k.expectation(plus, baseline) - k.expectation(minus, baseline) - k.expectation(plus, target) +
                  k.expectation(minus, target));
}

/// dL/dp from the p=1 and p=0 pinned, baseline and target outcome weights.
inline double probability_gradient(const MixtureKernel &k, std::span<const double> pinned_one,
                                   std::span<const double> pinned_zero, std::span<const double> baseline,
                                   std::span<const double> target) {
    return 2.0 * (k.expectation(pinned_one, baseline) - k.expectation(pinned_zero, baseline)) -
           2.0 * (k.expectation(pinned_one, target) - k.expectation(pinned_zero, target));
}

/// Sigmoid chain rule: dL/dzeta = dL/dp * sigma(zeta) (1 - sigma(zeta)).
inline double grad_zeta(double zeta, double grad_p) {
    const double s = sigmoid(zeta);
    return grad_p * s * (1.0 - s);
}

/// Sample-based dL/dtheta(i, j): fresh `batch`-shot sets at theta +- pi/4 e_ij.
inline double grad_theta(const Ansatz &ansatz, const MixtureKernel &k, ModelKind kind, const ModelParams &params,
                         std::size_t i, std::size_t j, std::span<const double> baseline,
                         std::span<const double> target, std::size_t batch, Rng &rng) {
    const auto plus = histogram(ansatz.sample(kind, params.with_shifted_angle(i, j, kAngleShift), batch, rng),
                                k.dimension());
    const auto minus = histogram(ansatz.sample(kind, params.with_shifted_angle(i, j, -kAngleShift), batch, rng),
                                 k.dimension());
    return angle_gradient(k, plus, minus, baseline, target);
}

/// Sample-based dL/dp(i, j): fresh `batch`-shot sets with p(i, j) pinned to 1 and to 0.
inline double grad_p(const Ansatz &ansatz, const MixtureKernel &k, ModelKind kind, const ModelParams &params,
                     std::size_t i, std::size_t j, std::span<const double> baseline, std::span<const double> target,
                     std::size_t batch, Rng &rng) {
    if (!is_mixture(kind)) {
        throw std::invalid_argument("correction-probability gradient is undefined for the unitary model");
    }
    const auto one = histogram(ansatz.sample(kind, params.with_pinned_correction(i, j, true), batch, rng),
                               k.dimension());
    const auto zero = histogram(ansatz.sample(kind, params.with_pinned_correction(i, j, false), batch, rng),
                                k.dimension());
    return probability_gradient(k, one, zero, baseline, target);
}

/// MMD between the exact model distribution and a target distribution.
inline double exact_mmd(const Ansatz &ansatz, const MixtureKernel &k, ModelKind kind, const ModelParams &params,
                        std::span<const double> target) {
    return k.mmd(ansatz.exact_distribution(kind, params), target);
}

/// dL/dtheta(i, j) with every expectation taken under exact distributions.
inline double exact_grad_theta(const Ansatz &ansatz, const MixtureKernel &k, ModelKind kind,
                               const ModelParams &params, std::size_t i, std::size_t j,
                               std::span<const double> target) {
    const auto base = ansatz.exact_distribution(kind, params);
    const auto plus = ansatz.exact_distribution(kind, params.with_shifted_angle(i, j, kAngleShift));
    const auto minus = ansatz.exact_distribution(kind, params.with_shifted_angle(i, j, -kAngleShift));
    return angle_gradient(k, plus, minus, base, target);
}

/// dL/dp(i, j) with every expectation taken under exact distributions.
inline double exact_grad_p(const Ansatz &ansatz, const MixtureKernel &k, ModelKind kind, const ModelParams &params,
                           std::size_t i, std::size_t j, std::span<const double> target) {
    if (!is_mixture(kind)) {
        throw std::invalid_argument("correction-probability gradient is undefined for the unitary model");
    }
    const auto base = ansatz.exact_distribution(kind, params);
    const auto one = ansatz.exact_distribution(kind, params.with_pinned_correction(i, j, true));
    const auto zero = ansatz.exact_distribution(kind, params.with_pinned_correction(i, j, false));
    return probability_gradient(k, one, zero, base, target);
}

/// Per-parameter running sums of squared gradients.
struct AdagradState {
    Eigen::MatrixXd theta_acc;
    Eigen::MatrixXd zeta_acc;

    AdagradState() = default;
    AdagradState(std::size_t qubits, std::size_t depth)
        : theta_acc(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(qubits), static_cast<Eigen::Index>(depth))),
          zeta_acc(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(qubits), static_cast<Eigen::Index>(depth))) {}
};

/// acc += g^2; x -= lr * g / (sqrt(acc) + eps), for theta and zeta alike.
inline void adagrad_step(AdagradState &state, ModelParams &params, const Eigen::MatrixXd &g_theta,
                         const Eigen::MatrixXd &g_zeta, double learning_rate, double epsilon) {
    auto same_shape = [&](const Eigen::MatrixXd &m) {
        return m.rows() == params.theta.rows() && m.cols() == params.theta.cols();
    };
    if (!same_shape(g_theta) || !same_shape(g_zeta) || !same_shape(state.theta_acc) ||
        !same_shape(state.zeta_acc)) {
        throw std::invalid_argument("adagrad_step shape mismatch");
    }
    state.theta_acc.array() += g_theta.array().square();
    state.zeta_acc.array() += g_zeta.array().square();
    params.theta.array() -= learning_rate * g_theta.array() / (state.theta_acc.array().sqrt() + epsilon);
    params.zeta.array() -= learning_rate * g_zeta.array() / (state.zeta_acc.array().sqrt() + epsilon);
}

/// Learner initialisation: theta ~ U[0, 1), p ~ U[r, 1] with r = 1 - 3 / (N D),
/// p clamped to 1 - 1e-6 so zeta stays finite.
inline ModelParams initial_learner_params(std::size_t qubits, std::size_t depth, Rng &rng) {
    ModelParams params(qubits, depth);
    const double r = 1.0 - 3.0 / static_cast<double>(qubits * depth);
    for (Eigen::Index j = 0; j < params.theta.cols(); ++j) {
        for (Eigen::Index i = 0; i < params.theta.rows(); ++i) {
            params.theta(i, j) = uniform01(rng);
        }
    }
    for (Eigen::Index j = 0; j < params.zeta.cols(); ++j) {
        for (Eigen::Index i = 0; i < params.zeta.rows(); ++i) {
            const double p = std::min(r + (1.0 - r) * uniform01(rng), 1.0 - 1e-6);
            params.zeta(i, j) = logit(std::max(p, 1e-6));
        }
    }
    return params;
}

struct TrainConfig {
    ModelKind kind = ModelKind::Corrected;
    std::size_t epochs = 100;
    /// Shots per expectation term; 0 means the dataset size.
    std::size_t batch = 0;
    double learning_rate = 0.1;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    KernelSpec kernel;
    InputState input = InputState::Plus;
    /// Reuse one baseline sample set per epoch for every gradient.
    bool shared_baseline = true;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    double wall_seconds = 0.0;
};

struct TrainingTrace {
    TrainConfig config;
    ModelParams initial;
    ModelParams final_params;
    std::vector<EpochRecord> epochs;
};

/// Adagrad on the sampled MMD. Each epoch records the loss of a fresh model sample set
/// against the dataset, then updates every angle (and, for mixtures, every logit).
inline TrainingTrace train(const TrainConfig &config, const SampleSet &dataset, const ModelParams &init) {
    init.validate();
    if (dataset.samples.empty()) {
        throw std::invalid_argument("training dataset is empty");
    }
    if (dataset.n_bits != init.qubits()) {
        throw std::invalid_argument("dataset width does not match the model's qubit count");
    }
    if (!(config.learning_rate >= 0.0) || !(config.epsilon > 0.0)) {
        throw std::invalid_argument("learning rate must be >= 0 and epsilon > 0");
    }
    const std::size_t batch = config.batch ? config.batch : dataset.samples.size();
    const Ansatz ansatz(init.qubits(), init.depth(), config.input);
    const MixtureKernel k(config.kernel, init.qubits());
    const auto target = histogram(dataset.samples, k.dimension());

    TrainingTrace trace{config, init, init, {}};
    ModelParams &params = trace.final_params;
    AdagradState adagrad(init.qubits(), init.depth());
    Rng rng(config.seed);
    const auto start = std::chrono::steady_clock::now();
    Eigen::MatrixXd g_theta(params.theta.rows(), params.theta.cols());
    Eigen::MatrixXd g_zeta(params.theta.rows(), params.theta.cols());

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto baseline = histogram(ansatz.sample(config.kind, params, batch, rng), k.dimension());
        const double loss = k.mmd(baseline, target);
        g_theta.setZero();
        g_zeta.setZero();
        for (std::size_t j = 0; j < params.depth(); ++j) {
            for (std::size_t i = 0; i < params.qubits(); ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                const auto jj = static_cast<Eigen::Index>(j);
                std::vector<double> own;
                if (!config.shared_baseline) {
                    own = histogram(ansatz.sample(config.kind, params, batch, rng), k.dimension());
                }
                const std::span<const double> base = config.shared_baseline ? baseline : own;
                g_theta(ii, jj) = grad_theta(ansatz, k, config.kind, params, i, j, base, target, batch, rng);
                if (is_mixture(config.kind)) {
                    const double gp = grad_p(ansatz, k, config.kind, params, i, j, base, target, batch, rng);
                    g_zeta(ii, jj) = grad_zeta(params.zeta(ii, jj), gp);
                }
            }
        }
        adagrad_step(adagrad, params, g_theta, g_zeta, config.learning_rate, config.epsilon);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.epochs.push_back({epoch, loss, elapsed});
    }
    return trace;
}

}  // namespace vmbqc
