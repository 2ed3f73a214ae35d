#pragma once

#include <optional>
#include <string>
#include <vector>

namespace occ {

// Per-problem weight 1 / (problems in the dataset * number of datasets), so
// every dataset contributes equally regardless of how many problems it yields.
struct ProblemWeight {
    std::string problem_id;
    std::string dataset_id;
    double weight = 0.0;
};

std::vector<ProblemWeight> dataset_equal_weights(const std::vector<std::string>& problem_ids,
                                                 const std::vector<std::string>& dataset_ids);

double weighted_mean(const std::vector<double>& values, const std::vector<ProblemWeight>& weights);

// One paired difference (mean over folds) with its dataset as cluster id.
struct PairedSample {
    double difference = 0.0;
    std::string cluster_id;
};

enum class Alternative { Greater, Less };

// Clustered Wilcoxon signed-rank test: absolute differences ranked across all
// observations (zeros dropped, midranks on ties), signed ranks summed within
// clusters, T = sum of cluster sums, Var = sum of squared cluster sums,
// one-sided normal p-value. All-zero samples return 0.5.
double clustered_wilcoxon(const std::vector<PairedSample>& sample, Alternative alternative);

std::vector<double> holm_bonferroni(const std::vector<double>& pvalues);

// Pair-weight product scheme; pairs tied in either list are excluded.
// Returns nullopt when every pair is tied.
std::optional<double> weighted_kendall_tau(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           const std::vector<ProblemWeight>& weights);

double normal_cdf(double z);

}  // namespace occ
