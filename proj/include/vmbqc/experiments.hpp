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
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "vmbqc/learn.hpp"
#include "vmbqc/models.hpp"
#include "vmbqc/random.hpp"
#include "vmbqc/targets.hpp"

namespace vmbqc {

/// Thrown for bad experiment settings; the command line maps it to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Everything that determines an experiment's output. Zero counts mean "use the
/// preset for this experiment"; resolve() fills them in.
struct ExperimentSpec {
    std::string experiment;
    std::size_t n = 0;
    std::size_t d = 0;
    /// Largest N of the kl-uniform sweep (D = N - 1 there).
    std::size_t n_max = 0;
    std::size_t samples = 0;
    std::size_t epochs = 0;
    std::size_t reps = 0;
    std::size_t batch = 0;
    std::size_t branch_budget = 0;
    std::uint64_t seed = 1;
    double learning_rate = 0.1;
    double epsilon = 1e-8;
    std::vector<double> bandwidths{0.5, 4.0};
    InputState input = InputState::Plus;
    std::vector<ModelKind> learners;
    std::vector<ModelKind> targets;
    bool smoke = false;
    /// Worker threads for repetitions; 0 = hardware concurrency. Does not affect results.
    std::size_t threads = 0;
    std::string out;
    /// Also write per-repetition epoch,loss,wall_seconds traces (not byte-reproducible).
    bool traces = false;
};

inline const std::vector<std::string> &experiment_ids() {
    static const std::vector<std::string> ids{"learn-mixed", "learn-gauss", "cross-compare",
                                              "kl-uniform",  "sample",      "oracle-check"};
    return ids;
}

inline nlohmann::json to_json(const ExperimentSpec &s) {
    nlohmann::json j;
    j["experiment"] = s.experiment;
    j["n"] = s.n;
    j["d"] = s.d;
    j["n_max"] = s.n_max;
    j["samples"] = s.samples;
    j["epochs"] = s.epochs;
    j["reps"] = s.reps;
    j["batch"] = s.batch;
    j["branch_budget"] = s.branch_budget;
    j["seed"] = s.seed;
    j["learning_rate"] = s.learning_rate;
    j["epsilon"] = s.epsilon;
    j["bandwidths"] = s.bandwidths;
    j["input"] = to_string(s.input);
    auto names = [](const std::vector<ModelKind> &kinds) {
        std::vector<std::string> v;
        for (auto k : kinds) {
            v.emplace_back(to_string(k));
        }
        return v;
    };
    j["learners"] = names(s.learners);
    j["targets"] = names(s.targets);
    j["smoke"] = s.smoke;
    return j;
}

namespace detail {

inline void set_if_zero(std::size_t &field, std::size_t value) {
    if (field == 0) {
        field = value;
    }
}

}  // namespace detail

/// Fills unset fields from the experiment's presets and validates the result.
inline ExperimentSpec resolve(ExperimentSpec s) {
    using detail::set_if_zero;
    const auto &ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), s.experiment) == ids.end()) {
        throw ValidationError("unknown experiment '" + s.experiment + "'");
    }
    const bool big = s.n >= 8;
    if (s.experiment == "learn-mixed" || s.experiment == "learn-gauss" || s.experiment == "cross-compare") {
        const bool mixed = s.experiment == "learn-mixed";
        const bool gauss = s.experiment == "learn-gauss";
        set_if_zero(s.n, s.smoke ? 4 : 5);
        set_if_zero(s.d, s.n - 1);
        if (s.smoke) {
            set_if_zero(s.samples, 1000);
            set_if_zero(s.epochs, 20);
            set_if_zero(s.reps, gauss || mixed ? 4 : 3);
        } else if (mixed) {
            set_if_zero(s.samples, big ? 10000 : 5000);
            set_if_zero(s.epochs, 100);
            set_if_zero(s.reps, 12);
        } else if (gauss) {
            set_if_zero(s.samples, big ? 20000 : 8000);
            set_if_zero(s.epochs, 200);
            set_if_zero(s.reps, 8);
        } else {
            set_if_zero(s.samples, 6000);
            set_if_zero(s.epochs, 100);
            set_if_zero(s.reps, 10);
        }
        set_if_zero(s.batch, s.n >= 8 ? 2000 : s.samples);
        if (s.learners.empty()) {
            if (s.experiment == "cross-compare") {
                s.learners = {ModelKind::Corrected, ModelKind::Uncorrected, ModelKind::Unitary};
            } else {
                s.learners = {ModelKind::Unitary, ModelKind::Corrected};
            }
        }
        if (s.targets.empty()) {
            if (mixed) {
                s.targets = {ModelKind::Corrected};
            } else if (s.experiment == "cross-compare") {
                s.targets = {ModelKind::Corrected, ModelKind::Uncorrected, ModelKind::Unitary};
            }
        }
        if (gauss && !s.targets.empty()) {
            throw ValidationError("learn-gauss has a fixed double-Gaussian target");
        }
    } else if (s.experiment == "kl-uniform") {
        set_if_zero(s.n, 5);
        set_if_zero(s.n_max, s.smoke ? std::max<std::size_t>(s.n, 6) : 10);
        set_if_zero(s.reps, s.smoke ? 10 : 100);
        set_if_zero(s.branch_budget, s.smoke ? 200 : 2000);
        if (s.d != 0 && s.n != s.n_max) {
            throw ValidationError("kl-uniform sweeps D = N - 1; --d only applies to a single N");
        }
        if (s.learners.empty()) {
            s.learners = {ModelKind::Uncorrected, ModelKind::Corrected};
        }
    }
    if (s.experiment == "oracle-check" || s.experiment == "sample") {
        return s;
    }
    if (s.n < 3 || s.n > 16) {
        throw ValidationError("N must be in 3..16");
    }
    if (s.n_max != 0 && s.n_max < s.n) {
        throw ValidationError("--n-max must be at least --n");
    }
    if (s.experiment != "kl-uniform" && s.d < 1) {
        throw ValidationError("D must be at least 1");
    }
    if (s.reps < 1) {
        throw ValidationError("need at least one repetition");
    }
    if (!(s.learning_rate >= 0.0) || !(s.epsilon > 0.0)) {
        throw ValidationError("learning rate must be >= 0 and epsilon > 0");
    }
    for (double b : s.bandwidths) {
        if (!(b > 0.0)) {
            throw ValidationError("kernel bandwidths must be positive");
        }
    }
    return s;
}

/// Mean, sample standard deviation and standard error of the mean.
struct Summary {
    double mean = 0.0;
    double std = 0.0;
    double se = 0.0;
};

inline Summary summarize(const std::vector<double> &xs) {
    Summary s;
    if (xs.empty()) {
        return s;
    }
    for (double x : xs) {
        s.mean += x;
    }
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        s.se = s.std / std::sqrt(static_cast<double>(xs.size()));
    }
    return s;
}

/// Runs job(k) for k in [0, count) on up to `threads` workers. Results must be
/// written by index so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &job) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            job(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    job(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Loss curves of one learner kind over all repetitions.
struct LearnerRun {
    ModelKind kind = ModelKind::Corrected;
    std::vector<std::vector<EpochRecord>> reps;
    std::vector<ModelParams> initial;
    std::vector<ModelParams> final_params;
    std::vector<std::uint64_t> train_seeds;

    /// Mean and sample std of the loss at each epoch across repetitions.
    std::vector<Summary> per_epoch() const {
        std::vector<Summary> out;
        if (reps.empty()) {
            return out;
        }
        for (std::size_t e = 0; e < reps.front().size(); ++e) {
            std::vector<double> xs;
            for (const auto &r : reps) {
                xs.push_back(r[e].loss);
            }
            out.push_back(summarize(xs));
        }
        return out;
    }

    /// Per repetition, the mean loss over the last `window` epochs; summarized across repetitions.
    Summary final_loss(std::size_t window = 10) const {
        std::vector<double> xs;
        for (const auto &r : reps) {
            const std::size_t w = std::min(window, r.size());
            double acc = 0.0;
            for (std::size_t e = r.size() - w; e < r.size(); ++e) {
                acc += r[e].loss;
            }
            xs.push_back(w ? acc / static_cast<double>(w) : 0.0);
        }
        return summarize(xs);
    }
};

/// One target with every learner trained against it.
struct LearningPanel {
    std::string label;
    std::optional<ModelKind> target_kind;
    std::optional<ModelParams> target_params;
    std::optional<DiscreteDistribution> target_distribution;
    SampleSet dataset;
    std::vector<LearnerRun> learners;

    const LearnerRun &learner(ModelKind kind) const {
        for (const auto &l : learners) {
            if (l.kind == kind) {
                return l;
            }
        }
        throw std::out_of_range("no learner of kind " + std::string(to_string(kind)));
    }
};

struct LearningResult {
    ExperimentSpec spec;
    std::vector<LearningPanel> panels;
    std::vector<std::string> files;
};

/// Trains every learner in spec.learners for spec.reps repetitions against `panel.dataset`.
/// Repetition r starts every learner from the same initial point.
inline void train_panel(const ExperimentSpec &spec, std::uint64_t panel_seed, LearningPanel &panel) {
    const std::size_t n_learners = spec.learners.size();
    std::vector<ModelParams> inits(spec.reps);
    for (std::size_t r = 0; r < spec.reps; ++r) {
        Rng rng(derive_seed(panel_seed, 1000 + r));
        inits[r] = initial_learner_params(spec.n, spec.d, rng);
    }
    panel.learners.assign(n_learners, {});
    for (std::size_t l = 0; l < n_learners; ++l) {
        auto &run = panel.learners[l];
        run.kind = spec.learners[l];
        run.reps.resize(spec.reps);
        run.initial = inits;
        run.final_params.resize(spec.reps);
        run.train_seeds.resize(spec.reps);
        for (std::size_t r = 0; r < spec.reps; ++r) {
            run.train_seeds[r] = derive_seed(panel_seed, 2000 + r * 16 + l);
        }
    }
    parallel_for(spec.reps * n_learners, spec.threads, [&](std::size_t job) {
        const std::size_t r = job / n_learners;
        const std::size_t l = job % n_learners;
        auto &run = panel.learners[l];
        TrainConfig config;
        config.kind = run.kind;
        config.epochs = spec.epochs;
        config.batch = spec.batch;
        config.learning_rate = spec.learning_rate;
        config.epsilon = spec.epsilon;
        config.seed = run.train_seeds[r];
        config.kernel.bandwidths = spec.bandwidths;
        config.input = spec.input;
        auto trace = train(config, panel.dataset, inits[r]);
        run.reps[r] = std::move(trace.epochs);
        run.final_params[r] = std::move(trace.final_params);
    });
}

// ---------------------------------------------------------------------------
// Serialization.

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
inline std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd &m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (std::isfinite(v)) {
                row.push_back(v);
            } else {
                row.push_back(format_double(v));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json &j, const std::string &name) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ValidationError("'" + name + "' must be a nonempty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError("'" + name + "' rows have different lengths");
        }
        for (Eigen::Index jj = 0; jj < cols; ++jj) {
            const auto &v = row[static_cast<std::size_t>(jj)];
            if (v.is_number()) {
                m(i, jj) = v.get<double>();
            } else if (v.is_string() && (v == "inf" || v == "-inf")) {
                m(i, jj) = v == "inf" ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
            } else {
                throw ValidationError("'" + name + "' holds a non-numeric entry");
            }
        }
    }
    return m;
}

/// {"n", "d", "theta": rows of qubits, "zeta": same shape}. Infinite zeta is written as a string.
inline nlohmann::json params_to_json(const ModelParams &p) {
    return {{"n", p.qubits()}, {"d", p.depth()}, {"theta", matrix_to_json(p.theta)},
            {"zeta", matrix_to_json(p.zeta)}};
}

/// Reads params_to_json output. A missing "zeta" means every p = 1.
inline ModelParams params_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("theta")) {
        throw ValidationError("parameter file needs a 'theta' matrix");
    }
    ModelParams p;
    p.theta = matrix_from_json(j["theta"], "theta");
    if (j.contains("zeta")) {
        p.zeta = matrix_from_json(j["zeta"], "zeta");
    } else {
        p.zeta = Eigen::MatrixXd::Constant(p.theta.rows(), p.theta.cols(), std::numeric_limits<double>::infinity());
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    if (p.qubits() < CqcaTable::kMinQubits || p.qubits() > StateVector::kMaxQubits) {
        throw ValidationError("parameter file has an unsupported number of qubits");
    }
    return p;
}

inline void write_text(const std::filesystem::path &path, const std::string &body) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << body;
    if (!f) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

/// CSV text whose first line is "# spec: {...}".
inline std::string csv_with_spec(const ExperimentSpec &spec, const std::vector<std::string> &header,
                                 const std::vector<std::vector<std::string>> &rows) {
    std::string out = "# spec: " + to_json(spec).dump() + "\n";
    auto append_row = [&](const std::vector<std::string> &cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) {
                out.push_back(',');
            }
            out += cells[c];
        }
        out.push_back('\n');
    };
    append_row(header);
    for (const auto &r : rows) {
        append_row(r);
    }
    return out;
}

inline std::string stem(const ExperimentSpec &spec) {
    return spec.experiment + "_n" + std::to_string(spec.n) + "_d" + std::to_string(spec.d);
}

/// epoch, mean_<kind>, std_<kind>, ... for every learner of the panel.
inline std::string curves_csv(const ExperimentSpec &spec, const LearningPanel &panel) {
    std::vector<std::string> header{"epoch"};
    std::vector<std::vector<Summary>> stats;
    for (const auto &l : panel.learners) {
        header.push_back("mean_" + std::string(to_string(l.kind)));
        header.push_back("std_" + std::string(to_string(l.kind)));
        stats.push_back(l.per_epoch());
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < spec.epochs; ++e) {
        std::vector<std::string> row{std::to_string(e + 1)};
        for (const auto &s : stats) {
            row.push_back(format_double(s[e].mean));
            row.push_back(format_double(s[e].std));
        }
        rows.push_back(std::move(row));
    }
    return csv_with_spec(spec, header, rows);
}

inline nlohmann::json panel_json(const ExperimentSpec &spec, const LearningPanel &panel) {
    nlohmann::json j;
    j["spec"] = to_json(spec);
    j["target"] = panel.label;
    if (panel.target_params) {
        j["target_params"] = params_to_json(*panel.target_params);
    }
    for (const auto &l : panel.learners) {
        nlohmann::json runs = nlohmann::json::array();
        for (std::size_t r = 0; r < l.reps.size(); ++r) {
            runs.push_back({{"rep", r},
                            {"train_seed", l.train_seeds[r]},
                            {"initial", params_to_json(l.initial[r])},
                            {"final", params_to_json(l.final_params[r])}});
        }
        const auto fin = l.final_loss();
        j["learners"][std::string(to_string(l.kind))] = {
            {"final10_mean", fin.mean}, {"final10_std", fin.std}, {"final10_se", fin.se}, {"runs", runs}};
    }
    return j;
}

inline std::string traces_csv(const ExperimentSpec &spec, const LearnerRun &run) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < run.reps.size(); ++r) {
        for (const auto &e : run.reps[r]) {
            rows.push_back({std::to_string(r), std::to_string(e.epoch), format_double(e.loss),
                            format_double(e.wall_seconds)});
        }
    }
    return csv_with_spec(spec, {"rep", "epoch", "loss", "wall_seconds"}, rows);
}

/// Writes the curves CSV, the parameter JSON and optional traces of one panel.
inline void write_panel(const ExperimentSpec &spec, const LearningPanel &panel, const std::string &suffix,
                        std::vector<std::string> &files) {
    if (spec.out.empty()) {
        return;
    }
    const std::filesystem::path dir(spec.out);
    const std::string base = stem(spec) + suffix;
    auto emit = [&](const std::string &name, const std::string &body) {
        write_text(dir / name, body);
        files.push_back((dir / name).string());
    };
    emit(base + ".csv", curves_csv(spec, panel));
    emit(base + "_params.json", panel_json(spec, panel).dump(2) + "\n");
    if (spec.traces) {
        for (const auto &l : panel.learners) {
            emit("traces/" + base + "_" + std::string(to_string(l.kind)) + ".csv", traces_csv(spec, l));
        }
    }
}

// ---------------------------------------------------------------------------
// Experiments.

/// Learners against a dataset drawn from a random Corrected-model target.
inline LearningResult run_learn_mixed(ExperimentSpec spec) {
    spec.experiment = "learn-mixed";
    spec = resolve(std::move(spec));
    LearningResult result{spec, {}, {}};
    const ModelKind target_kind = spec.targets.front();
    Rng rng(derive_seed(spec.seed, 0));
    LearningPanel panel;
    panel.label = std::string(to_string(target_kind));
    panel.target_kind = target_kind;
    panel.target_params = random_target(target_kind, spec.n, spec.d, rng);
    const Ansatz ansatz(spec.n, spec.d, spec.input);
    panel.dataset = SampleSet(spec.n, ansatz.sample(target_kind, *panel.target_params, spec.samples, rng));
    train_panel(spec, derive_seed(spec.seed, 1), panel);
    write_panel(spec, panel, "", result.files);
    result.panels.push_back(std::move(panel));
    return result;
}

/// Learners against the two-peak discretised Gaussian.
inline LearningResult run_learn_gauss(ExperimentSpec spec) {
    spec.experiment = "learn-gauss";
    spec = resolve(std::move(spec));
    LearningResult result{spec, {}, {}};
    Rng rng(derive_seed(spec.seed, 0));
    LearningPanel panel;
    panel.label = "double-gaussian";
    panel.target_distribution = default_double_gaussian(spec.n);
    panel.dataset = draw(*panel.target_distribution, spec.samples, rng);
    train_panel(spec, derive_seed(spec.seed, 1), panel);
    write_panel(spec, panel, "", result.files);
    if (!spec.out.empty()) {
        const auto emp = empirical(panel.dataset);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t x = 0; x < panel.target_distribution->probs.size(); ++x) {
            rows.push_back({std::to_string(x), bitstring(x, spec.n), format_double(panel.target_distribution->probs[x]),
                            format_double(emp.probs[x])});
        }
        const auto path = std::filesystem::path(spec.out) / (stem(spec) + "_target.csv");
        write_text(path, csv_with_spec(spec, {"x", "bits", "probability", "empirical"}, rows));
        result.files.push_back(path.string());
    }
    result.panels.push_back(std::move(panel));
    return result;
}

/// Every learner kind against a random target of every kind; one panel per target.
inline LearningResult run_cross_compare(ExperimentSpec spec) {
    spec.experiment = "cross-compare";
    spec = resolve(std::move(spec));
    LearningResult result{spec, {}, {}};
    const Ansatz ansatz(spec.n, spec.d, spec.input);
    for (std::size_t t = 0; t < spec.targets.size(); ++t) {
        const ModelKind kind = spec.targets[t];
        const std::uint64_t panel_seed = derive_seed(spec.seed, 100 + t);
        Rng rng(derive_seed(panel_seed, 0));
        LearningPanel panel;
        panel.label = std::string(to_string(kind));
        panel.target_kind = kind;
        panel.target_params = random_target(kind, spec.n, spec.d, rng);
        panel.dataset = SampleSet(spec.n, ansatz.sample(kind, *panel.target_params, spec.samples, rng));
        train_panel(spec, derive_seed(panel_seed, 1), panel);
        write_panel(spec, panel, "_target-" + panel.label, result.files);
        result.panels.push_back(std::move(panel));
    }
    return result;
}

struct KlRow {
    std::size_t n = 0;
    std::size_t d = 0;
    /// One summary per spec.learners entry, in that order.
    std::vector<Summary> kl;
    std::vector<std::vector<double>> values;
};

struct KlResult {
    ExperimentSpec spec;
    std::vector<KlRow> rows;
    std::vector<std::string> files;

    const Summary &kl(std::size_t n, ModelKind kind) const {
        for (const auto &r : rows) {
            if (r.n == n) {
                for (std::size_t k = 0; k < spec.learners.size(); ++k) {
                    if (spec.learners[k] == kind) {
                        return r.kl[k];
                    }
                }
            }
        }
        throw std::out_of_range("no KL entry for that N and kind");
    }
};

/// Random model with theta ~ U[0, 2 pi) and p ~ U[0.8, 1].
inline ModelParams random_kl_model(std::size_t n, std::size_t d, Rng &rng) {
    ModelParams p(n, d);
    for (Eigen::Index j = 0; j < p.theta.cols(); ++j) {
        for (Eigen::Index i = 0; i < p.theta.rows(); ++i) {
            p.theta(i, j) = 2.0 * std::numbers::pi * uniform01(rng);
        }
    }
    for (Eigen::Index j = 0; j < p.zeta.cols(); ++j) {
        for (Eigen::Index i = 0; i < p.zeta.rows(); ++i) {
            p.zeta(i, j) = logit(std::min(0.8 + 0.2 * uniform01(rng), 1.0 - 1e-12));
        }
    }
    return p;
}

/// KL(uniform || model) for random models of each kind, N = n .. n_max with D = N - 1
/// (or spec.d for a single N). Model distributions are exact when N D <= 12, otherwise
/// Monte-Carlo over spec.branch_budget masks. Every kind sees the same random models.
inline KlResult run_kl_uniform(ExperimentSpec spec) {
    spec.experiment = "kl-uniform";
    spec = resolve(std::move(spec));
    KlResult result{spec, {}, {}};
    for (std::size_t n = spec.n; n <= spec.n_max; ++n) {
        const std::size_t d = spec.d && spec.n == spec.n_max ? spec.d : n - 1;
        const Ansatz ansatz(n, d, spec.input);
        const auto unif = uniform(n);
        KlRow row{n, d, {}, std::vector<std::vector<double>>(spec.learners.size(), std::vector<double>(spec.reps))};
        parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
            const std::uint64_t model_seed = derive_seed(spec.seed, n * 100000 + r);
            Rng rng(model_seed);
            const ModelParams params = random_kl_model(n, d, rng);
            for (std::size_t k = 0; k < spec.learners.size(); ++k) {
                const ModelKind kind = spec.learners[k];
                Rng branch_rng(derive_seed(model_seed, 1 + k));
                std::vector<double> q = n * d <= Ansatz::kMaxEnumeratedSlots
                                            ? ansatz.exact_distribution(kind, params)
                                            : ansatz.estimate_distribution(kind, params, spec.branch_budget, branch_rng);
                double total = 0.0;
                for (double v : q) {
                    total += v;
                }
                for (auto &v : q) {
                    v /= total;
                }
                row.values[k][r] = kl_divergence(unif, DiscreteDistribution(n, std::move(q)));
            }
        });
        for (const auto &v : row.values) {
            row.kl.push_back(summarize(v));
        }
        result.rows.push_back(std::move(row));
    }
    if (!spec.out.empty()) {
        std::vector<std::string> header{"n", "d"};
        for (auto k : spec.learners) {
            header.push_back("mean_kl_" + std::string(to_string(k)));
            header.push_back("std_kl_" + std::string(to_string(k)));
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto &r : result.rows) {
            std::vector<std::string> cells{std::to_string(r.n), std::to_string(r.d)};
            for (const auto &s : r.kl) {
                cells.push_back(format_double(s.mean));
                cells.push_back(format_double(s.std));
            }
            rows.push_back(std::move(cells));
        }
        const auto path = std::filesystem::path(spec.out) / "kl-uniform.csv";
        write_text(path, csv_with_spec(spec, header, rows));
        result.files.push_back(path.string());
    }
    return result;
}

}  // namespace vmbqc
