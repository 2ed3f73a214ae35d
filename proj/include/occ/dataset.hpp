#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occ/matrix.hpp"

namespace occ {

struct Dataset {
    std::string name;
    Matrix features;                  // n_instances x n_features, finite
    std::vector<std::string> labels;  // per-instance class id
};

// One target class drawn from a labelled dataset. `target_train` holds only
// target-class rows; `train_*` is the full pool (targets + pooled "other")
// used for validation, `test_*` the held-out rows with binary labels.
struct OneClassProblem {
    std::string dataset_name;
    std::string target_class;
    Matrix target_train;
    Matrix train_features;
    std::vector<bool> train_is_target;
    Matrix test_features;
    std::vector<bool> test_is_target;

    std::string id() const { return dataset_name + "/" + target_class; }
};

// Per-feature divisors fitted on target-class training rows only.
struct ScalingProfile {
    std::vector<double> divisors;

    Matrix apply(const Matrix& m) const;
    std::string to_json() const;
};

enum class MissingPolicy { Reject, DropRow };

Dataset load_csv(const std::string& path, const std::string& label_column,
                 MissingPolicy policy = MissingPolicy::Reject);

// One problem per class with at least `min_class_size` instances; remaining
// classes are pooled as non-targets. Rows are not split here; splitting into
// train/test happens per outer fold.
struct ClassPartition {
    std::string target_class;
    std::vector<std::size_t> target_rows;
    std::vector<std::size_t> other_rows;
};
std::vector<ClassPartition> derive_problems(const Dataset& d, std::size_t min_class_size);

ScalingProfile fit_iqr_scaling(const Matrix& target_train);

// Linear-interpolation quantile of a column (q in [0,1]).
double interpolated_quantile(std::vector<double> values, double q);

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Stratified k-fold over instances with binary labels; deterministic in seed.
std::vector<FoldSplit> stratified_kfold(const std::vector<bool>& is_target, std::size_t k,
                                        std::uint64_t seed);

// Assembles the OneClassProblem for one outer fold of a class partition.
OneClassProblem make_problem(const Dataset& d, const ClassPartition& part, const FoldSplit& fold);

}  // namespace occ
