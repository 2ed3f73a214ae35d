#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "occ/descriptors.hpp"
#include "occ/validation.hpp"

namespace occ {

enum class OptimizerKind { Random, HookeJeeves, NelderMead, Tpe, MalherbePowell };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

// A search stops when either cap is reached: unique evaluations or proposals.
struct Budget {
    std::size_t max_evaluations = 50;
    std::size_t max_proposals = 100;
    std::uint64_t seed = 0;
};

struct Trial {
    std::vector<double> coords;
    HyperParams params;
    double value = 0.0;
    bool cache_hit = false;
    std::size_t proposal_index = 0;           // 1-based
    std::optional<std::size_t> eval_index;    // 1-based; empty on a cache hit
};

// Wraps a raw objective with clamping-aware budget accounting and a full
// trial history. Optimisers only ever see this interface.
class BudgetedObjective {
public:
    using RawFn = std::function<EvalOutcome(std::vector<double>)>;

    BudgetedObjective(RawFn fn, std::size_t dims, Budget budget)
        : fn_(std::move(fn)), dims_(dims), budget_(budget) {}

    std::size_t dims() const { return dims_; }
    const Budget& budget() const { return budget_; }
    bool exhausted() const {
        return evaluations_ >= budget_.max_evaluations || proposals_ >= budget_.max_proposals;
    }
    std::optional<Trial> propose(std::vector<double> coords);

    const std::vector<Trial>& history() const { return history_; }
    std::size_t evaluations() const { return evaluations_; }
    std::size_t proposals() const { return proposals_; }

private:
    RawFn fn_;
    std::size_t dims_;
    Budget budget_;
    std::size_t evaluations_ = 0;
    std::size_t proposals_ = 0;
    std::vector<Trial> history_;
};

// Plain-function objective with exact-coordinate deduplication, for tests and
// synthetic benchmarks.
BudgetedObjective::RawFn make_function_objective(std::function<double(const std::vector<double>&)> f);

struct SearchResult {
    std::vector<Trial> history;
    Trial best;
    // Incumbent after e unique evaluations, e = 1..n (n = evaluations made).
    std::vector<Trial> incumbent_by_eval;

    std::string to_jsonl(const std::string& optimizer_id) const;
};

SearchResult finish_search(const BudgetedObjective& objective);

void run_random_search(BudgetedObjective& objective);
void run_hooke_jeeves(BudgetedObjective& objective, std::vector<double> start,
                      double initial_step = 0.1);
void run_nelder_mead(BudgetedObjective& objective, std::vector<double> start,
                     double simplex_scale = 0.1);

struct TpeOptions {
    double gamma = 0.2;
    std::size_t warmup = 12;
    std::size_t n_candidates = 24;
};
void run_tpe(BudgetedObjective& objective, const TpeOptions& options = {});

// Separable per-dimension Lipschitz ceiling with a noise term; slopes only
// ever grow during a search.
struct LipschitzState {
    std::vector<double> slopes;
    double epsilon = 1e-3;

    explicit LipschitzState(std::size_t dims) : slopes(dims, 0.0) {}

    double upper_bound(const std::vector<double>& x, const std::vector<Trial>& points) const;
    // Restores |f_i - f_j| <= sum_d slope_d |dx_d| for every pair involving
    // the fresh point whenever the epsilon-relaxed bound is violated.
    void observe(const std::vector<Trial>& prior, const Trial& fresh);
};

struct MalherbePowellOptions {
    std::size_t global_candidates = 500;
    double epsilon = 1e-3;
    double initial_trust_radius = 0.1;
};
void run_malherbe_powell(BudgetedObjective& objective, const MalherbePowellOptions& options = {});

// Convenience entry points mirroring the CLI's optimiser ids.
SearchResult random_search(const BudgetedObjective::RawFn& fn, std::size_t dims,
                           const Budget& budget);
SearchResult hooke_jeeves(const BudgetedObjective::RawFn& fn, std::size_t dims,
                          const Budget& budget, std::vector<double> start,
                          double initial_step = 0.1);
SearchResult nelder_mead(const BudgetedObjective::RawFn& fn, std::size_t dims,
                         const Budget& budget, std::vector<double> start,
                         double simplex_scale = 0.1);
SearchResult tpe(const BudgetedObjective::RawFn& fn, std::size_t dims, const Budget& budget,
                 const TpeOptions& options = {});
SearchResult malherbe_powell(const BudgetedObjective::RawFn& fn, std::size_t dims,
                             const Budget& budget, const MalherbePowellOptions& options = {});

// Runs one optimiser against a validation objective; local optimisers start
// from the descriptor's default hyperparameter values.
SearchResult run_search(OptimizerKind kind, ObjectiveHandle& handle, const Budget& budget,
                        const std::vector<double>& default_start);

}  // namespace occ
