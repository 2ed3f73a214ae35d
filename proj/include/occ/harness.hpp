#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "occ/dataset.hpp"
#include "occ/descriptors.hpp"
#include "occ/optimizers.hpp"
#include "occ/stats.hpp"

namespace occ {

struct ExperimentConfig {
    std::string data_dir;
    std::string label_column = "class";
    std::vector<DescriptorKind> descriptors;  // empty = all five
    std::vector<OptimizerKind> optimizers;    // empty = all five
    std::size_t budget_evaluations = 50;
    std::size_t budget_proposals = 100;
    std::size_t outer_folds = 5;
    std::size_t min_class_size = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t jobs = 1;
    bool defaults_only = false;

    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json() const;
    void finalise();  // fills empty descriptor/optimizer lists
};

// One (problem, outer fold, descriptor, optimiser) work unit's results,
// indexed by evaluation count. eval_seconds carries wall-clock timing and is
// excluded from determinism guarantees.
struct ExperimentRecord {
    std::string problem_id;
    std::string dataset_id;
    std::size_t fold_id = 0;
    DescriptorKind descriptor = DescriptorKind::NND;
    OptimizerKind optimizer = OptimizerKind::Random;
    std::vector<double> validation_auroc;       // incumbent after e evaluations
    std::vector<double> test_auroc;             // test AUROC of that incumbent
    std::vector<HyperParams> incumbent_params;
    double default_validation_auroc = 0.0;
    double default_test_auroc = 0.0;
    HyperParams default_params_used;
    std::size_t proposals = 0;
    std::size_t evaluations = 0;
    std::vector<double> eval_seconds;

    std::string key() const;
    std::string to_json() const;
    static ExperimentRecord from_json(const std::string& text);
};

struct RunSummary {
    std::size_t completed = 0;
    std::size_t skipped = 0;  // already on disk
    std::vector<std::string> failures;
};

// Runs the full grid, one JSON file per work unit under config.out_dir.
// Existing files are skipped, making interrupted runs resumable. Unit
// failures are recorded, never fatal for the batch.
RunSummary run_experiment(const ExperimentConfig& config);

std::vector<ExperimentRecord> load_records(const std::string& dir);

struct AnalysisOptions {
    OptimizerKind headline_optimizer = OptimizerKind::MalherbePowell;
};

// Writes the analysis artifacts (CSV + JSON + Markdown) into out_dir:
// weighted mean curves, overfitting gaps, pairwise clustered Wilcoxon tests
// with Holm-Bonferroni rows, optimised-vs-default comparison, a weighted
// Kendall tau matrix, and the ALP/SVM validation-selected combination.
void analyze(const std::vector<ExperimentRecord>& records, const std::string& out_dir,
             const AnalysisOptions& options = {});

// Mean wall-clock per evaluation count per descriptor, as CSV.
void report_runtime(const std::vector<ExperimentRecord>& records, const std::string& out_path);

}  // namespace occ
