#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occ/dataset.hpp"
#include "occ/descriptors.hpp"
#include "occ/neighbors.hpp"

namespace occ {

// Mann-Whitney AUROC with ties counting one half.
double auroc(const std::vector<double>& target_scores, const std::vector<double>& other_scores);

// Efficient leave-one-out validation: every training instance is scored
// against a model that excludes it (targets) or the full target model
// (non-targets), pooled into a single AUROC. Results match a naive
// refit-per-point oracle exactly.
double loo_validate_nnd(const OneClassProblem& problem, std::size_t k);
double loo_validate_lnnd(const OneClassProblem& problem, std::size_t k);
double loo_validate_alp(const OneClassProblem& problem, std::size_t k, std::size_t l);

// Stratified inner 5-fold validation for SVM and LOF: mean of the per-fold
// AUROCs; folds without both classes are skipped.
double cv5_validate(const OneClassProblem& problem, DescriptorKind kind, const HyperParams& params,
                    std::uint64_t seed);

// Unit-box coordinate mapping for one descriptor on one problem. Discrete
// hyperparameters use a log scale; SVM's two dimensions are affine.
struct SearchDomain {
    DescriptorKind kind = DescriptorKind::NND;
    std::size_t dims = 1;
    std::size_t k_max = 1;
    std::size_t l_max = 1;

    HyperParams decode(const std::vector<double>& coords) const;
    std::vector<double> encode(const HyperParams& params) const;
    std::string key(const HyperParams& params) const;
};

struct EvalOutcome {
    std::vector<double> coords;  // after clamping
    HyperParams params;
    bool cache_hit = false;
    double value = 0.0;  // validation AUROC
};

// The optimisation objective for one (problem, descriptor) pair. Shared
// neighbour tables are computed once at construction; each discretised
// hyperparameter key is evaluated at most once.
class ObjectiveHandle {
public:
    ObjectiveHandle(const OneClassProblem& problem, DescriptorKind kind, std::uint64_t seed);
    ~ObjectiveHandle();
    ObjectiveHandle(ObjectiveHandle&&) noexcept;

    const SearchDomain& domain() const { return domain_; }
    DescriptorKind kind() const { return kind_; }

    // Clamps, discretises, consults the cache, evaluates on a miss.
    // Proposal counter always advances; evaluation counter only on a miss.
    EvalOutcome propose(std::vector<double> coords);

    std::size_t proposals() const { return proposals_; }
    std::size_t evaluations() const { return evaluations_; }

    // Direct evaluation bypassing counters (used for default-value scoring).
    double evaluate_params(const HyperParams& params) const;

private:
    struct State;
    DescriptorKind kind_;
    SearchDomain domain_;
    std::uint64_t seed_ = 0;
    std::size_t proposals_ = 0;
    std::size_t evaluations_ = 0;
    std::map<std::string, double> cache_;
    std::unique_ptr<State> state_;
};

}  // namespace occ
