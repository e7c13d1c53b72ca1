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
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vmbqc/byproduct_mask.hpp"
#include "vmbqc/models.hpp"
#include "vmbqc/pauli.hpp"
#include "vmbqc/random.hpp"
#include "vmbqc/state_vector.hpp"

namespace vmbqc {

/// Literal cluster state on an N x (D+1) grid: |+> on every node, CZ on every
/// edge. Columns are time steps; within a column the N rows form a ring.
/// Node (i, col) is qubit col * N + i.
struct ClusterState {
    static constexpr std::size_t kMaxQubits = 12;

    std::size_t rows = 0;
    std::size_t depth = 0;
    StateVector state{1};

    std::size_t columns() const { return depth + 1; }
    std::size_t qubit(std::size_t i, std::size_t col) const { return col * rows + i; }
    std::size_t num_qubits() const { return rows * columns(); }

    /// Neighbours of node (i, col) on the grid.
    std::vector<std::size_t> neighbours(std::size_t i, std::size_t col) const {
        std::vector<std::size_t> out{qubit((i + rows - 1) % rows, col), qubit((i + 1) % rows, col)};
        if (col > 0) {
            out.push_back(qubit(i, col - 1));
        }
        if (col < depth) {
            out.push_back(qubit(i, col + 1));
        }
        return out;
    }

    /// X_v prod_{u in N(v)} Z_u.
    PauliOperator stabilizer(std::size_t i, std::size_t col) const {
        auto k = PauliOperator::single(num_qubits(), qubit(i, col), PauliKind::X);
        for (auto u : neighbours(i, col)) {
            k *= PauliOperator::single(num_qubits(), u, PauliKind::Z);
        }
        return k;
    }
};

inline ClusterState build_cluster(std::size_t rows, std::size_t depth) {
    if (rows < 3) {
        throw std::invalid_argument("cluster ring needs at least 3 rows");
    }
    if (depth < 1 || rows * (depth + 1) > ClusterState::kMaxQubits) {
        throw std::invalid_argument("cluster of " + std::to_string(rows) + "x" + std::to_string(depth + 1) +
                                    " exceeds the " + std::to_string(ClusterState::kMaxQubits) + "-qubit oracle limit");
    }
    ClusterState c;
    c.rows = rows;
    c.depth = depth;
    c.state = StateVector::plus_state(c.num_qubits());
    for (std::size_t col = 0; col <= depth; ++col) {
        for (std::size_t i = 0; i < rows; ++i) {
            c.state.apply_cz(c.qubit(i, col), c.qubit((i + 1) % rows, col));
            if (col < depth) {
                c.state.apply_cz(c.qubit(i, col), c.qubit(i, col + 1));
            }
        }
    }
    return c;
}

enum class CorrectionPolicy { FullAdaptive, None };

/// Map between the literal measurement pattern and the circuit picture.
///   angle_scale    - the bulk qubit (i, j) is measured in |0> +- e^{i a theta}|1>, a = angle_scale.
///   reverse_output - output row i is read as circuit qubit N-1-i.
///   output_flips   - residual X frame on the output, XORed into the read bits.
struct OracleConvention {
    int angle_scale = 2;
    bool reverse_output = false;
    std::uint32_t output_flips = 0;

    std::uint32_t map_output(std::uint32_t raw, std::size_t rows) const {
        std::uint32_t out = raw;
        if (reverse_output) {
            out = 0;
            for (std::size_t i = 0; i < rows; ++i) {
                if ((raw >> i) & 1) {
                    out |= std::uint32_t{1} << (rows - 1 - i);
                }
            }
        }
        return out ^ output_flips;
    }

    std::string str() const {
        return "angle_scale=" + std::to_string(angle_scale) + " reverse_output=" + (reverse_output ? "1" : "0") +
               " output_flips=" + std::to_string(output_flips);
    }

    bool operator==(const OracleConvention &) const = default;
};

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Projects qubit q onto (|0> + (-1)^s e^{i phi}|1>)/sqrt2 and renormalises.
/// Returns the outcome probability.
inline double project_xy(StateVector &state, std::size_t q, double phi, bool outcome) {
    using C = std::complex<double>;
    auto amps = state.amplitudes();
    const std::size_t bit = std::size_t{1} << q;
    const C e = std::polar(1.0, phi) * (outcome ? -1.0 : 1.0);
    double prob = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        if (b & bit) {
            continue;
        }
        const C c = (amps[b] + std::conj(e) * amps[b | bit]) * kInvSqrt2;
        prob += std::norm(c);
        amps[b] = c * kInvSqrt2;
        amps[b | bit] = c * e * kInvSqrt2;
    }
    if (prob > 0.0) {
        const double f = 1.0 / std::sqrt(prob);
        for (auto &a : amps) {
            a *= f;
        }
    }
    return prob;
}

/// Completes the stabilizer of (i, col + 1) after a -1 outcome at (i, col).
inline PauliOperator byproduct_correction(const ClusterState &c, std::size_t i, std::size_t col) {
    const std::size_t n = c.num_qubits();
    auto r = PauliOperator::single(n, c.qubit(i, col + 1), PauliKind::X);
    r *= PauliOperator::single(n, c.qubit((i + c.rows - 1) % c.rows, col + 1), PauliKind::Z);
    r *= PauliOperator::single(n, c.qubit((i + 1) % c.rows, col + 1), PauliKind::Z);
    if (col + 2 <= c.depth) {
        r *= PauliOperator::single(n, c.qubit(i, col + 2), PauliKind::Z);
    }
    return r;
}

/// Distribution of the Z-measured output column, mapped through the convention.
inline std::vector<double> output_distribution(const ClusterState &c, const OracleConvention &conv) {
    std::vector<double> out(std::size_t{1} << c.rows, 0.0);
    const auto amps = c.state.amplitudes();
    const std::size_t shift = c.depth * c.rows;
    const std::size_t row_mask = (std::size_t{1} << c.rows) - 1;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const auto raw = static_cast<std::uint32_t>((b >> shift) & row_mask);
        out[conv.map_output(raw, c.rows)] += std::norm(amps[b]);
    }
    return out;
}

inline void check_angles(const ClusterState &c, const Eigen::MatrixXd &theta) {
    if (static_cast<std::size_t>(theta.rows()) != c.rows || static_cast<std::size_t>(theta.cols()) != c.depth) {
        throw std::invalid_argument("measurement angles must be rows x depth");
    }
}

}  // namespace detail

struct MeasurementRecord {
    ByproductMask outcomes;  // s(i, j) = 1 for a -1 outcome
    std::uint32_t output = 0;
};

/// Measures the bulk column by column (rows in order) in the rotated XY basis,
/// correcting -1 outcomes by stabilizer completion under FullAdaptive, then reads
/// the output column in Z.
inline MeasurementRecord measure_pattern(ClusterState cluster, const Eigen::MatrixXd &theta,
                                         CorrectionPolicy policy, const OracleConvention &conv, Rng &rng) {
    detail::check_angles(cluster, theta);
    MeasurementRecord rec{ByproductMask(cluster.rows, cluster.depth), 0};
    for (std::size_t col = 0; col < cluster.depth; ++col) {
        for (std::size_t i = 0; i < cluster.rows; ++i) {
            const double phi = conv.angle_scale * theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
            StateVector trial = cluster.state;
            const double p_plus = detail::project_xy(trial, cluster.qubit(i, col), phi, false);
            const bool minus = uniform01(rng) >= p_plus;
            if (minus) {
                detail::project_xy(cluster.state, cluster.qubit(i, col), phi, true);
            } else {
                cluster.state = std::move(trial);
            }
            rec.outcomes.set(i, col, minus);
            if (minus && policy == CorrectionPolicy::FullAdaptive) {
                cluster.state.apply_pauli(detail::byproduct_correction(cluster, i, col));
            }
        }
    }
    const auto dist = detail::output_distribution(cluster, conv);
    rec.output = CumulativeDistribution(dist).draw(rng);
    return rec;
}

/// One complete outcome branch of the measurement pattern.
struct Branch {
    ByproductMask outcomes;
    double probability = 0.0;
    /// Largest |P(outcome) - 1/2| over the branch's individual measurements.
    double max_step_bias = 0.0;
    std::vector<double> output_distribution;
};

/// Every outcome branch with its probability and conditional output distribution.
inline std::vector<Branch> enumerate_branches(const ClusterState &cluster, const Eigen::MatrixXd &theta,
                                              CorrectionPolicy policy, const OracleConvention &conv) {
    detail::check_angles(cluster, theta);
    const std::size_t steps = cluster.rows * cluster.depth;
    std::vector<Branch> out;
    out.reserve(std::size_t{1} << steps);
    Branch current{ByproductMask(cluster.rows, cluster.depth), 1.0, 0.0, {}};
    std::function<void(std::size_t, ClusterState &)> recurse = [&](std::size_t step, ClusterState &c) {
        if (step == steps) {
            current.output_distribution = detail::output_distribution(c, conv);
            out.push_back(current);
            return;
        }
        const std::size_t col = step / c.rows;
        const std::size_t i = step % c.rows;
        const double phi = conv.angle_scale * theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
        for (bool minus : {false, true}) {
            ClusterState next = c;
            const double p = detail::project_xy(next.state, c.qubit(i, col), phi, minus);
            if (minus && policy == CorrectionPolicy::FullAdaptive) {
                next.state.apply_pauli(detail::byproduct_correction(next, i, col));
            }
            const Branch saved = current;
            current.outcomes.set(i, col, minus);
            current.probability *= p;
            current.max_step_bias = std::max(current.max_step_bias, std::abs(p - 0.5));
            recurse(step + 1, next);
            current = saved;
        }
    };
    ClusterState root = cluster;
    recurse(0, root);
    return out;
}

/// Output distribution of the branch in which every bulk measurement gives +1.
inline std::vector<double> all_plus_branch(const ClusterState &cluster, const Eigen::MatrixXd &theta,
                                           const OracleConvention &conv) {
    detail::check_angles(cluster, theta);
    ClusterState c = cluster;
    for (std::size_t col = 0; col < c.depth; ++col) {
        for (std::size_t i = 0; i < c.rows; ++i) {
            detail::project_xy(c.state, c.qubit(i, col),
                               conv.angle_scale * theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)),
                               false);
        }
    }
    return detail::output_distribution(c, conv);
}

inline double max_abs_difference(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("comparing distributions of different sizes");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

inline Eigen::MatrixXd random_angles(std::size_t rows, std::size_t depth, Rng &rng) {
    Eigen::MatrixXd theta(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(depth));
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        for (Eigen::Index i = 0; i < theta.rows(); ++i) {
            theta(i, j) = 2.0 * std::numbers::pi * uniform01(rng);
        }
    }
    return theta;
}

struct CalibrationResult {
    OracleConvention convention;
    /// Every candidate that reproduced the circuit distributions.
    std::vector<OracleConvention> matches;
    double residual = 0.0;
};

/// Exhaustive search over {angle scale in +-1, +-2} x {bit order} x {output X frame}
/// at N = 3, D = 1 for the map under which the all-+1 branch of the literal pattern
/// reproduces U_c(theta) on several random angle sets. The first match in search
/// order is frozen; sign-mirrored scales are indistinguishable in Z statistics
/// because every fixed gate and the input are real.
inline CalibrationResult calibrate_convention(std::uint64_t seed, std::size_t trials = 4, double tol = 1e-9) {
    constexpr std::size_t kRows = 3;
    constexpr std::size_t kDepth = 1;
    Rng rng(seed);
    const auto cluster = build_cluster(kRows, kDepth);
    const Ansatz ansatz(kRows, kDepth);
    std::vector<Eigen::MatrixXd> angles;
    std::vector<std::vector<double>> expected;
    for (std::size_t t = 0; t < trials; ++t) {
        angles.push_back(random_angles(kRows, kDepth, rng));
        ModelParams params(kRows, kDepth);
        params.theta = angles.back();
        expected.push_back(ansatz.run_unitary(params).probabilities());
    }
    CalibrationResult result;
    result.residual = 1.0;
    for (int scale : {2, -2, 1, -1}) {
        for (bool reverse : {false, true}) {
            for (std::uint32_t flips = 0; flips < (1u << kRows); ++flips) {
                const OracleConvention conv{scale, reverse, flips};
                double worst = 0.0;
                for (std::size_t t = 0; t < trials; ++t) {
                    worst = std::max(worst, max_abs_difference(all_plus_branch(cluster, angles[t], conv), expected[t]));
                }
                if (worst <= tol) {
                    if (result.matches.empty()) {
                        result.convention = conv;
                        result.residual = worst;
                    }
                    result.matches.push_back(conv);
                }
            }
        }
    }
    if (result.matches.empty()) {
        throw std::runtime_error("no measurement convention reproduces the circuit picture");
    }
    return result;
}

struct OracleCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;
};

/// Cross-checks the literal MBQC against the circuit picture at N = 3, D = 1, 2 under
/// `conv`: full-adaptive branches reproduce U_c, uncorrected branches reproduce the
/// byproduct circuit of their outcome mask, and every bulk outcome has probability 1/2.
inline std::vector<OracleCheck> verify_correspondence(const OracleConvention &conv, std::uint64_t seed,
                                                      std::size_t trials = 10, double tol = 1e-9) {
    constexpr std::size_t kRows = 3;
    Rng rng(seed);
    std::vector<OracleCheck> checks;
    for (std::size_t depth : {std::size_t{1}, std::size_t{2}}) {
        const auto cluster = build_cluster(kRows, depth);
        const Ansatz ansatz(kRows, depth);
        OracleCheck adaptive{"full-adaptive == U_c, D=" + std::to_string(depth), true, 0.0};
        OracleCheck uncorrected{"uncorrected branch == byproduct circuit, D=" + std::to_string(depth), true, 0.0};
        OracleCheck fair{"bulk outcomes have probability 1/2, D=" + std::to_string(depth), true, 0.0};
        for (std::size_t t = 0; t < trials; ++t) {
            ModelParams params(kRows, depth);
            params.theta = random_angles(kRows, depth, rng);
            const auto target = ansatz.run_unitary(params).probabilities();
            for (const auto &b : enumerate_branches(cluster, params.theta, CorrectionPolicy::FullAdaptive, conv)) {
                adaptive.worst = std::max(adaptive.worst, max_abs_difference(b.output_distribution, target));
                fair.worst = std::max(fair.worst, b.max_step_bias);
            }
            for (const auto &b : enumerate_branches(cluster, params.theta, CorrectionPolicy::None, conv)) {
                const auto circuit =
                    ansatz.run_with_mask(params, b.outcomes, ModelKind::Uncorrected).probabilities();
                uncorrected.worst = std::max(uncorrected.worst, max_abs_difference(b.output_distribution, circuit));
                fair.worst = std::max(fair.worst, b.max_step_bias);
            }
        }
        for (auto *c : {&adaptive, &uncorrected, &fair}) {
            c->passed = c->worst <= tol;
            checks.push_back(*c);
        }
    }
    return checks;
}

}  // namespace vmbqc
