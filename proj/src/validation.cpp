#include "occ/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "occ/rng.hpp"

namespace occ {

double auroc(const std::vector<double>& target_scores, const std::vector<double>& other_scores) {
    if (target_scores.empty() || other_scores.empty())
        throw std::invalid_argument("auroc: both score lists must be non-empty");

    const std::size_t n1 = target_scores.size();
    const std::size_t n0 = other_scores.size();
    std::vector<std::pair<double, bool>> all;  // (score, is_target)
    all.reserve(n1 + n0);
    for (double s : target_scores) all.emplace_back(s, true);
    for (double s : other_scores) all.emplace_back(s, false);
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Midranks; tied groups share the average rank, which keeps tie
    // contributions at exactly one half per pair.
    double rank_sum_target = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // (i+1 + j) / 2
        for (std::size_t t = i; t < j; ++t)
            if (all[t].second) rank_sum_target += midrank;
        i = j;
    }
    const double u =
        rank_sum_target - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

namespace {

std::size_t log_cap_100(std::size_t n) {
    if (n <= 1) return 1;
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(100.0 * std::log(static_cast<double>(n)))));
}

// Shared neighbour tables for the leave-one-out strategies: one self-excluded
// table for the targets, one plain table for the other training instances.
struct LooState {
    NeighborIndex index;
    NeighborTable loo;     // targets vs target set minus self
    NeighborTable others;  // non-target training rows vs full target set
    std::size_t n_target = 0;
    std::size_t n_other = 0;

    LooState(const OneClassProblem& problem, DescriptorKind kind)
        : index(problem.target_train) {
        n_target = problem.target_train.rows();

        Matrix other_rows;
        for (std::size_t i = 0; i < problem.train_features.rows(); ++i)
            if (!problem.train_is_target[i]) other_rows.push_row(problem.train_features.row(i));
        n_other = other_rows.rows();

        std::size_t loo_depth = 0, other_depth = 0;
        switch (kind) {
            case DescriptorKind::NND: {
                const std::size_t kmax = loo_k_max(kind, n_target);
                loo_depth = kmax;
                other_depth = kmax;
                break;
            }
            case DescriptorKind::LNND: {
                const std::size_t kmax = loo_k_max(kind, n_target);
                loo_depth = kmax + 1;  // substitution correction needs one extra
                other_depth = kmax;
                break;
            }
            case DescriptorKind::ALP: {
                const std::size_t t_full = alp_truncation(n_target);
                const std::size_t t_loo = alp_truncation(n_target - 1);
                loo_depth = std::max(t_full, t_loo + 1);
                other_depth = t_full;
                break;
            }
            default:
                throw std::invalid_argument("LooState: not a leave-one-out descriptor");
        }
        loo = query_loo(index, loo_depth);
        if (n_other > 0) others = query(index, other_rows, other_depth);
    }

    static std::size_t loo_k_max(DescriptorKind kind, std::size_t n) {
        switch (kind) {
            case DescriptorKind::NND:
                if (n < 2) throw std::invalid_argument("NND LOO: need n >= 2");
                return std::min(n - 1, log_cap_100(n));
            case DescriptorKind::LNND:
                if (n < 3) throw std::invalid_argument("LNND LOO: need n >= 3");
                return std::min(n - 2, log_cap_100(n));
            case DescriptorKind::ALP:
                if (n < 3) throw std::invalid_argument("ALP LOO: need n >= 3");
                return 5 * n;
            default:
                throw std::invalid_argument("loo_k_max: not a leave-one-out descriptor");
        }
    }
};

double loo_auroc_nnd(const LooState& st, std::size_t k) {
    if (k < 1 || k > st.loo.k_max) throw std::invalid_argument("loo_validate_nnd: k out of domain");
    std::vector<double> ts(st.n_target), os(st.n_other);
    for (std::size_t q = 0; q < st.n_target; ++q) ts[q] = -st.loo.dist(q, k);
    for (std::size_t q = 0; q < st.n_other; ++q) os[q] = -st.others.dist(q, k);
    return auroc(ts, os);
}

double loo_auroc_lnnd(const LooState& st, std::size_t k) {
    if (k < 1 || k + 1 > st.loo.k_max)
        throw std::invalid_argument("loo_validate_lnnd: k out of domain");
    std::vector<double> ts(st.n_target), os(st.n_other);
    for (std::size_t q = 0; q < st.n_target; ++q) {
        const double num = st.loo.dist(q, k);
        const std::size_t x = st.loo.neighbor(q, k);
        // If q is among x's k nearest neighbours (self excluded), the model
        // without q must substitute x's (k+1)-th neighbour distance.
        bool q_among = false;
        for (std::size_t r = 1; r <= k; ++r)
            if (st.loo.neighbor(x, r) == q) q_among = true;
        const double den = q_among ? st.loo.dist(x, k + 1) : st.loo.dist(x, k);
        ts[q] = lnnd_ratio(num, den);
    }
    for (std::size_t q = 0; q < st.n_other; ++q) {
        const std::size_t x = st.others.neighbor(q, k);
        os[q] = lnnd_ratio(st.others.dist(q, k), st.loo.dist(x, k));
    }
    return auroc(ts, os);
}

double loo_auroc_alp(const LooState& st, std::size_t k, std::size_t l) {
    const std::size_t n = st.n_target;
    if (k < 1 || l < 1 || k > 5 * n || l > 5 * n)
        throw std::invalid_argument("loo_validate_alp: k, l out of [1, 5n]");

    // Targets are scored against a model of size n-1, non-targets against the
    // full model; each side uses the truncation of its own model size.
    const std::size_t t_loo = alp_truncation(n - 1);
    const auto wk_loo = linear_weights(k, t_loo);
    const auto wl_loo = linear_weights(l, t_loo);

    std::vector<double> ts(st.n_target), os(st.n_other);
    for (std::size_t q = 0; q < st.n_target; ++q) {
        // i-th neighbour distance of x in the target set minus {x, q}: drop
        // q's entry from x's self-excluded list when it sits within reach.
        auto nbr_dist = [&](std::size_t x, std::size_t i) {
            bool q_before = false;
            for (std::size_t r = 1; r <= i; ++r)
                if (st.loo.neighbor(x, r) == q) q_before = true;
            return q_before ? st.loo.dist(x, i + 1) : st.loo.dist(x, i);
        };
        ts[q] = alp_from_neighbors(st.loo.distances[q], st.loo.indices[q], wk_loo, wl_loo,
                                   nbr_dist);
    }

    const std::size_t t_full = alp_truncation(n);
    const auto wk_full = linear_weights(k, t_full);
    const auto wl_full = linear_weights(l, t_full);
    for (std::size_t q = 0; q < st.n_other; ++q) {
        os[q] = alp_from_neighbors(
            st.others.distances[q], st.others.indices[q], wk_full, wl_full,
            [&](std::size_t x, std::size_t i) { return st.loo.dist(x, i); });
    }
    return auroc(ts, os);
}

double loo_auroc(const LooState& st, DescriptorKind kind, const HyperParams& p) {
    switch (kind) {
        case DescriptorKind::NND: return loo_auroc_nnd(st, p.k);
        case DescriptorKind::LNND: return loo_auroc_lnnd(st, p.k);
        case DescriptorKind::ALP: return loo_auroc_alp(st, p.k, p.l);
        default: throw std::logic_error("loo_auroc: bad kind");
    }
}

// One inner fold of the 5-fold strategy, with the neighbour tables LOF reuses
// across all k proposals.
struct InnerFold {
    Matrix target;                   // inner-train target rows
    Matrix val;                      // inner-validation rows
    std::vector<bool> val_is_target;
    NeighborTable loo;       // target vs itself (self excluded), LOF only
    NeighborTable val_table; // val vs target, LOF only
    bool usable = false;
};

struct Cv5State {
    std::vector<InnerFold> folds;
    std::size_t n_target = 0;   // full-train target count (for the log cap)
    std::size_t lof_k_max = 0;  // 0 when LOF tables were not built

    Cv5State(const OneClassProblem& problem, DescriptorKind kind, std::uint64_t seed) {
        for (bool t : problem.train_is_target) n_target += t ? 1 : 0;
        const auto splits = stratified_kfold(problem.train_is_target, 5, seed);

        std::size_t min_fold_target = SIZE_MAX;
        for (const auto& split : splits) {
            InnerFold f;
            for (auto i : split.train)
                if (problem.train_is_target[i]) f.target.push_row(problem.train_features.row(i));
            bool has_pos = false, has_neg = false;
            for (auto i : split.test) {
                f.val.push_row(problem.train_features.row(i));
                f.val_is_target.push_back(problem.train_is_target[i]);
                (problem.train_is_target[i] ? has_pos : has_neg) = true;
            }
            f.usable = has_pos && has_neg && f.target.rows() >= 1;
            if (f.usable) min_fold_target = std::min(min_fold_target, f.target.rows());
            folds.push_back(std::move(f));
        }
        if (min_fold_target == SIZE_MAX)
            throw std::runtime_error("cv5_validate: no usable inner fold");

        if (kind == DescriptorKind::LOF) {
            if (min_fold_target < 2)
                throw std::runtime_error("cv5_validate: LOF needs >= 2 targets per inner fold");
            lof_k_max = std::min(min_fold_target - 1, log_cap_100(n_target));
            for (auto& f : folds) {
                if (!f.usable) continue;
                NeighborIndex idx(f.target);
                f.loo = query_loo(idx, lof_k_max);
                f.val_table = query(idx, f.val, lof_k_max);
            }
        }
    }
};

// LOF score of validation row q in fold f at parameter k, from cached tables.
double lof_score_cached(const InnerFold& f, std::size_t q, std::size_t k) {
    auto mean_reach = [&](const std::vector<double>& dists,
                          const std::vector<std::size_t>& nbrs) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += std::max(f.loo.dist(nbrs[j], k), dists[j]);
        return s / static_cast<double>(k);
    };
    const double rm_y = mean_reach(f.val_table.distances[q], f.val_table.indices[q]);
    double lof = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t x = f.val_table.neighbor(q, j + 1);
        const double rm_x = mean_reach(f.loo.distances[x], f.loo.indices[x]);
        if (rm_x == 0.0) {
            if (rm_y != 0.0) return kMostAnomalous;
            lof += 1.0;
        } else {
            lof += rm_y / rm_x;
        }
    }
    return -lof / static_cast<double>(k);
}

double cv5_auroc(const Cv5State& st, DescriptorKind kind, const HyperParams& params) {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& f : st.folds) {
        if (!f.usable) continue;
        std::vector<double> ts, os;
        if (kind == DescriptorKind::LOF && st.lof_k_max > 0) {
            if (params.k < 1 || params.k > st.lof_k_max)
                throw std::invalid_argument("cv5_validate: LOF k out of domain");
            for (std::size_t q = 0; q < f.val.rows(); ++q) {
                const double s = lof_score_cached(f, q, params.k);
                (f.val_is_target[q] ? ts : os).push_back(s);
            }
        } else {
            const auto model = fit_descriptor(kind, f.target, params);
            const auto scores = model->score_all(f.val);
            for (std::size_t q = 0; q < scores.size(); ++q)
                (f.val_is_target[q] ? ts : os).push_back(scores[q]);
        }
        sum += auroc(ts, os);
        ++used;
    }
    return sum / static_cast<double>(used);
}

}  // namespace

double loo_validate_nnd(const OneClassProblem& problem, std::size_t k) {
    return loo_auroc_nnd(LooState(problem, DescriptorKind::NND), k);
}

double loo_validate_lnnd(const OneClassProblem& problem, std::size_t k) {
    return loo_auroc_lnnd(LooState(problem, DescriptorKind::LNND), k);
}

double loo_validate_alp(const OneClassProblem& problem, std::size_t k, std::size_t l) {
    return loo_auroc_alp(LooState(problem, DescriptorKind::ALP), k, l);
}

double cv5_validate(const OneClassProblem& problem, DescriptorKind kind, const HyperParams& params,
                    std::uint64_t seed) {
    if (kind != DescriptorKind::SVM && kind != DescriptorKind::LOF)
        throw std::invalid_argument("cv5_validate: only SVM and LOF use 5-fold validation");
    return cv5_auroc(Cv5State(problem, kind, seed), kind, params);
}

HyperParams SearchDomain::decode(const std::vector<double>& coords) const {
    if (coords.size() != dims) throw std::invalid_argument("SearchDomain::decode: wrong dims");
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    auto log_k = [&](double x, std::size_t cap) {
        if (cap <= 1) return std::size_t{1};
        const double v = std::exp(clamp01(x) * std::log(static_cast<double>(cap)));
        const auto r = static_cast<std::size_t>(std::llround(v));
        return std::min(cap, std::max<std::size_t>(1, r));
    };
    HyperParams p;
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
        case DescriptorKind::LOF:
            p.k = log_k(coords[0], k_max);
            break;
        case DescriptorKind::ALP:
            p.k = log_k(coords[0], k_max);
            p.l = log_k(coords[1], l_max);
            break;
        case DescriptorKind::SVM:
            // min() guards against the affine map overshooting the upper
            // bound by an ulp at coords == 1
            p.nu = std::min(1.0, 1e-6 + clamp01(coords[0]) * (1.0 - 1e-6));
            p.c_prime = std::min(1.0 - 1e-6, 1e-6 + clamp01(coords[1]) * (1.0 - 2e-6));
            break;
    }
    return p;
}

std::vector<double> SearchDomain::encode(const HyperParams& params) const {
    auto inv_log_k = [](std::size_t k, std::size_t cap) {
        if (cap <= 1) return 0.0;
        return std::log(static_cast<double>(k)) / std::log(static_cast<double>(cap));
    };
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
        case DescriptorKind::LOF:
            return {inv_log_k(params.k, k_max)};
        case DescriptorKind::ALP:
            return {inv_log_k(params.k, k_max), inv_log_k(params.l, l_max)};
        case DescriptorKind::SVM:
            return {(params.nu - 1e-6) / (1.0 - 1e-6), (params.c_prime - 1e-6) / (1.0 - 2e-6)};
    }
    throw std::logic_error("SearchDomain::encode: bad kind");
}

std::string SearchDomain::key(const HyperParams& params) const {
    char buf[80];
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
        case DescriptorKind::LOF:
            return "k=" + std::to_string(params.k);
        case DescriptorKind::ALP:
            return "k=" + std::to_string(params.k) + ",l=" + std::to_string(params.l);
        case DescriptorKind::SVM:
            std::snprintf(buf, sizeof(buf), "nu=%a,c=%a", params.nu, params.c_prime);
            return buf;
    }
    throw std::logic_error("SearchDomain::key: bad kind");
}

struct ObjectiveHandle::State {
    std::optional<LooState> loo;
    std::optional<Cv5State> cv5;
    const OneClassProblem* problem = nullptr;
};

ObjectiveHandle::~ObjectiveHandle() = default;
ObjectiveHandle::ObjectiveHandle(ObjectiveHandle&&) noexcept = default;

ObjectiveHandle::ObjectiveHandle(const OneClassProblem& problem, DescriptorKind kind,
                                 std::uint64_t seed)
    : kind_(kind), seed_(seed), state_(std::make_unique<State>()) {
    state_->problem = &problem;
    domain_.kind = kind;
    const std::size_t n = problem.target_train.rows();
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
            domain_.dims = 1;
            domain_.k_max = LooState::loo_k_max(kind, n);
            state_->loo.emplace(problem, kind);
            break;
        case DescriptorKind::ALP:
            domain_.dims = 2;
            domain_.k_max = domain_.l_max = 5 * n;
            state_->loo.emplace(problem, kind);
            break;
        case DescriptorKind::LOF:
            domain_.dims = 1;
            state_->cv5.emplace(problem, kind, seed);
            domain_.k_max = state_->cv5->lof_k_max;
            break;
        case DescriptorKind::SVM:
            domain_.dims = 2;
            state_->cv5.emplace(problem, kind, seed);
            break;
    }
}

double ObjectiveHandle::evaluate_params(const HyperParams& params) const {
    if (state_->loo) return loo_auroc(*state_->loo, kind_, params);
    return cv5_auroc(*state_->cv5, kind_, params);
}

EvalOutcome ObjectiveHandle::propose(std::vector<double> coords) {
    for (double& x : coords) x = std::min(1.0, std::max(0.0, x));
    EvalOutcome out;
    out.params = domain_.decode(coords);
    out.coords = std::move(coords);
    ++proposals_;
    const std::string key = domain_.key(out.params);
    if (auto it = cache_.find(key); it != cache_.end()) {
        out.cache_hit = true;
        out.value = it->second;
        return out;
    }
    out.value = evaluate_params(out.params);
    cache_.emplace(key, out.value);
    ++evaluations_;
    return out;
}

}  // namespace occ
