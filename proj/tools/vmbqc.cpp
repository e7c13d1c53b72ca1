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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vmbqc/experiments.hpp"
#include "vmbqc/mbqc_oracle.hpp"

namespace {

using namespace vmbqc;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;

void print_panels(const LearningResult &result) {
    for (const auto &panel : result.panels) {
        std::cout << "target " << panel.label << "\n";
        for (const auto &l : panel.learners) {
            const auto s = l.final_loss();
            std::printf("  %-12s final-10 loss %.6g +- %.3g (se, %zu reps)\n", std::string(to_string(l.kind)).c_str(),
                        s.mean, s.se, l.reps.size());
        }
    }
}

int run_sample(const ExperimentSpec &spec, const std::string &params_path, std::size_t shots,
               const std::string &kind_name) {
    if (params_path.empty()) {
        throw ValidationError("sample needs --params");
    }
    if (shots == 0) {
        throw ValidationError("sample needs --shots >= 1");
    }
    std::ifstream in(params_path);
    if (!in) {
        throw ValidationError("cannot read " + params_path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("bad parameter JSON: ") + e.what());
    }
    const auto params = params_from_json(j);
    ModelKind kind;
    try {
        kind = parse_model_kind(kind_name);
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    Rng rng(spec.seed);
    const Ansatz ansatz(params.qubits(), params.depth(), spec.input);
    const SampleSet set(params.qubits(), ansatz.sample(kind, params, shots, rng));
    if (spec.out.empty()) {
        write_dataset(std::cout, set);
    } else {
        const auto path = std::filesystem::path(spec.out) /
                          ("sample_n" + std::to_string(params.qubits()) + "_d" + std::to_string(params.depth()) + ".txt");
        std::ostringstream body;
        write_dataset(body, set);
        write_text(path, body.str());
        std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

int run_oracle_check(const ExperimentSpec &spec, bool corrupt) {
    const auto cal = calibrate_convention(spec.seed);
    std::cout << "calibrated convention: " << cal.convention.str() << " (residual " << cal.residual << ")\n";
    std::cout << "all matching conventions:";
    for (const auto &c : cal.matches) {
        std::cout << " {" << c.str() << "}";
    }
    std::cout << "\n";
    OracleConvention conv = cal.convention;
    if (corrupt) {
        conv.angle_scale = 1;
        std::cout << "using corrupted convention: " << conv.str() << "\n";
    }
    bool ok = true;
    for (const auto &c : verify_correspondence(conv, derive_seed(spec.seed, 1))) {
        std::printf("%s  %s (max deviation %.3g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst);
        ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitFailure;
}

int dispatch(ExperimentSpec spec, const std::string &params_path, std::size_t shots, const std::string &kind,
             bool corrupt) {
    spec = resolve(std::move(spec));
    if (spec.experiment == "sample") {
        return run_sample(spec, params_path, shots, kind);
    }
    if (spec.experiment == "oracle-check") {
        return run_oracle_check(spec, corrupt);
    }
    std::vector<std::string> files;
    if (spec.experiment == "kl-uniform") {
        const auto result = run_kl_uniform(spec);
        for (const auto &row : result.rows) {
            std::printf("N=%zu D=%zu", row.n, row.d);
            for (std::size_t k = 0; k < result.spec.learners.size(); ++k) {
                std::printf("  KL(unif||%s) = %.6g +- %.3g", std::string(to_string(result.spec.learners[k])).c_str(),
                            row.kl[k].mean, row.kl[k].se);
            }
            std::printf("\n");
        }
        files = result.files;
    } else {
        LearningResult result;
        if (spec.experiment == "learn-mixed") {
            result = run_learn_mixed(spec);
        } else if (spec.experiment == "learn-gauss") {
            result = run_learn_gauss(spec);
        } else {
            result = run_cross_compare(spec);
        }
        print_panels(result);
        files = result.files;
    }
    for (const auto &f : files) {
        std::cout << "wrote " << f << "\n";
    }
    return kExitOk;
}

std::vector<ModelKind> parse_kinds(const std::vector<std::string> &names) {
    std::vector<ModelKind> out;
    for (const auto &n : names) {
        try {
            out.push_back(parse_model_kind(n));
        } catch (const std::invalid_argument &e) {
            throw ValidationError(e.what());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Variational MBQC generative-model simulator and trainer"};
    ExperimentSpec spec;
    std::string params_path;
    std::string kind = "corrected";
    std::string input = "plus";
    std::size_t shots = 0;
    bool corrupt = false;
    std::vector<std::string> learners;
    std::vector<std::string> targets;

    app.add_option("--experiment", spec.experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(experiment_ids()));
    app.add_option("--n", spec.n, "Number of qubits (first N for kl-uniform)");
    app.add_option("--d", spec.d, "Circuit depth");
    app.add_option("--n-max", spec.n_max, "Last N of the kl-uniform sweep");
    app.add_option("--samples", spec.samples, "Training set size");
    app.add_option("--epochs", spec.epochs, "Training epochs");
    app.add_option("--reps", spec.reps, "Repetitions (random initialisations)");
    app.add_option("--seed", spec.seed, "Master seed");
    app.add_option("--out", spec.out, "Output directory");
    app.add_flag("--smoke", spec.smoke, "Reduced preset for quick checks");
    app.add_option("--branch-budget", spec.branch_budget, "Monte-Carlo masks per model distribution");
    app.add_option("--batch", spec.batch, "Shots per gradient expectation term");
    app.add_option("--learning-rate", spec.learning_rate, "Adagrad learning rate");
    app.add_option("--threads", spec.threads, "Worker threads (0 = all cores)");
    app.add_option("--learners", learners, "Learner kinds (unitary, uncorrected, corrected)");
    app.add_option("--targets", targets, "Target kinds for learn-mixed / cross-compare");
    app.add_option("--input", input, "Input register state (plus or zero)")
        ->check(CLI::IsMember({"plus", "zero"}));
    app.add_flag("--traces", spec.traces, "Also write per-repetition loss and wall-time traces");
    app.add_option("--params", params_path, "Parameter JSON for sample");
    app.add_option("--shots", shots, "Number of samples for sample");
    app.add_option("--kind", kind, "Model kind for sample");
    app.add_flag("--corrupt", corrupt, "oracle-check with a deliberately wrong angle convention");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }
    try {
        spec.learners = parse_kinds(learners);
        spec.targets = parse_kinds(targets);
        spec.input = parse_input_state(input);
        return dispatch(spec, params_path, shots, kind, corrupt);
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
