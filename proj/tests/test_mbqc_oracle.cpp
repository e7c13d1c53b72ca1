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

#include "vmbqc/mbqc_oracle.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace vmbqc;

TEST(mbqc_oracle, cluster_construction) {
    const auto c = build_cluster(3, 1);
    EXPECT_EQ(c.num_qubits(), 6u);
    EXPECT_NEAR(c.state.norm_squared(), 1.0, 1e-12);
    for (std::size_t col = 0; col <= c.depth; ++col) {
        for (std::size_t i = 0; i < c.rows; ++i) {
            const auto e = c.state.expectation(c.stabilizer(i, col));
            EXPECT_NEAR(e.real(), 1.0, 1e-9);
            EXPECT_NEAR(e.imag(), 0.0, 1e-9);
        }
    }
    // Edge count: a ring in each column plus one edge per row between columns.
    std::size_t degree_sum = 0;
    for (std::size_t col = 0; col <= c.depth; ++col) {
        for (std::size_t i = 0; i < c.rows; ++i) {
            degree_sum += c.neighbours(i, col).size();
        }
    }
    EXPECT_EQ(degree_sum / 2, 3u + 3u + 3u);
    const auto big = build_cluster(4, 2);
    for (std::size_t col = 0; col <= big.depth; ++col) {
        for (std::size_t i = 0; i < big.rows; ++i) {
            EXPECT_NEAR(big.state.expectation(big.stabilizer(i, col)).real(), 1.0, 1e-9);
        }
    }
    EXPECT_THROW(build_cluster(2, 1), std::invalid_argument);
    EXPECT_THROW(build_cluster(4, 3), std::invalid_argument);
}

TEST(mbqc_oracle, calibration_finds_the_angle_convention) {
    const auto cal = calibrate_convention(1);
    EXPECT_EQ(cal.convention.angle_scale, 2);
    EXPECT_FALSE(cal.convention.reverse_output);
    EXPECT_EQ(cal.convention.output_flips, 0u);
    EXPECT_LE(cal.residual, 1e-9);
    // The mirrored scale is the only other match: all fixed gates are real.
    ASSERT_EQ(cal.matches.size(), 2u);
    EXPECT_EQ(cal.matches[1].angle_scale, -2);
}

TEST(mbqc_oracle, zero_angles_reproduce_circuit) {
    const OracleConvention conv;
    for (std::size_t d : {1u, 2u}) {
        const auto c = build_cluster(3, d);
        ModelParams p(3, d);
        const auto want = run_unitary(p).probabilities();
        for (const auto &b : enumerate_branches(c, p.theta, CorrectionPolicy::FullAdaptive, conv)) {
            EXPECT_LE(max_abs_difference(b.output_distribution, want), 1e-9);
        }
    }
}

TEST(mbqc_oracle, adaptive_output_is_outcome_independent) {
    const OracleConvention conv;
    Rng rng(2);
    const auto c = build_cluster(3, 1);
    const auto theta = random_angles(3, 1, rng);
    const auto branches = enumerate_branches(c, theta, CorrectionPolicy::FullAdaptive, conv);
    ASSERT_EQ(branches.size(), 8u);
    double total = 0.0;
    for (const auto &b : branches) {
        EXPECT_LE(max_abs_difference(b.output_distribution, branches.front().output_distribution), 1e-9);
        EXPECT_NEAR(b.probability, 1.0 / 8.0, 1e-9);
        EXPECT_LE(b.max_step_bias, 1e-9);
        total += b.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(mbqc_oracle, correspondence_checks_pass) {
    const auto cal = calibrate_convention(3);
    for (const auto &c : verify_correspondence(cal.convention, 4)) {
        EXPECT_TRUE(c.passed) << c.name << " worst " << c.worst;
    }
}

TEST(mbqc_oracle, corrupted_convention_is_detected) {
    OracleConvention conv;
    conv.angle_scale = 1;
    bool any_failed = false;
    for (const auto &c : verify_correspondence(conv, 5, 3)) {
        any_failed = any_failed || !c.passed;
    }
    EXPECT_TRUE(any_failed);
}

TEST(mbqc_oracle, sampled_pattern_statistics) {
    const OracleConvention conv;
    Rng rng(6);
    const auto c = build_cluster(3, 1);
    ModelParams p(3, 1);
    p.theta << 0.4, 1.1, 2.0;
    const auto want = run_unitary(p).probabilities();
    const std::size_t shots = 4000;
    std::vector<double> freq(8, 0.0);
    double minus_outcomes = 0.0;
    for (std::size_t s = 0; s < shots; ++s) {
        const auto rec = measure_pattern(c, p.theta, CorrectionPolicy::FullAdaptive, conv, rng);
        freq[rec.output] += 1.0 / shots;
        minus_outcomes += static_cast<double>(rec.outcomes.count());
    }
    for (std::size_t b = 0; b < 8; ++b) {
        EXPECT_NEAR(freq[b], want[b], 4.0 * std::sqrt(want[b] * (1 - want[b]) / shots) + 1e-9);
    }
    const double n = 3.0 * shots;
    EXPECT_NEAR(minus_outcomes / n, 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(mbqc_oracle, convention_output_map) {
    OracleConvention conv{2, true, 0b001};
    EXPECT_EQ(conv.map_output(0b011, 3), 0b110u ^ 0b001u);
    EXPECT_EQ(OracleConvention{}.map_output(5, 3), 5u);
}
