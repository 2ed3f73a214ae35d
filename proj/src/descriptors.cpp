#include "occ/descriptors.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "occ/svm.hpp"

namespace occ {

std::string to_string(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::NND: return "NND";
        case DescriptorKind::LNND: return "LNND";
        case DescriptorKind::LOF: return "LOF";
        case DescriptorKind::ALP: return "ALP";
        case DescriptorKind::SVM: return "SVM";
    }
    throw std::logic_error("to_string: bad DescriptorKind");
}

DescriptorKind descriptor_from_string(const std::string& name) {
    if (name == "NND" || name == "nnd") return DescriptorKind::NND;
    if (name == "LNND" || name == "lnnd") return DescriptorKind::LNND;
    if (name == "LOF" || name == "lof") return DescriptorKind::LOF;
    if (name == "ALP" || name == "alp") return DescriptorKind::ALP;
    if (name == "SVM" || name == "svm") return DescriptorKind::SVM;
    throw std::invalid_argument("unknown descriptor: " + name);
}

std::size_t k_domain_max(DescriptorKind kind, std::size_t n_target) {
    const double n = static_cast<double>(n_target);
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
        case DescriptorKind::LOF: {
            if (n_target <= 1) return 1;
            const auto log_cap = static_cast<std::size_t>(std::ceil(100.0 * std::log(n)));
            return std::min(n_target, std::max<std::size_t>(log_cap, 1));
        }
        case DescriptorKind::ALP:
            return 5 * n_target;
        case DescriptorKind::SVM:
            throw std::invalid_argument("k_domain_max: SVM has no k");
    }
    throw std::logic_error("k_domain_max: bad kind");
}

std::size_t alp_truncation(std::size_t n_target) {
    if (n_target < 2) throw std::invalid_argument("alp_truncation: need at least 2 target points");
    const auto log_cap = static_cast<std::size_t>(
        std::ceil(20.0 * std::log(static_cast<double>(n_target))));
    return std::min(n_target - 1, std::max<std::size_t>(log_cap, 1));
}

HyperParams default_params(DescriptorKind kind, std::size_t n_target) {
    HyperParams p;
    const double logn = n_target > 1 ? std::log(static_cast<double>(n_target)) : 0.0;
    switch (kind) {
        case DescriptorKind::NND:
        case DescriptorKind::LNND:
            p.k = 1;
            break;
        case DescriptorKind::LOF:
            p.k = std::min<std::size_t>(10, std::max<std::size_t>(k_domain_max(kind, n_target), 1));
            break;
        case DescriptorKind::ALP:
            p.k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(5.5 * logn)));
            p.l = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(6.0 * logn)));
            p.k = std::min(p.k, k_domain_max(kind, n_target));
            p.l = std::min(p.l, k_domain_max(kind, n_target));
            break;
        case DescriptorKind::SVM:
            p.nu = 0.5;
            p.c_prime = 0.5;
            break;
    }
    return p;
}

std::vector<double> linear_weights(std::size_t p, std::size_t truncate_at) {
    if (p < 1 || truncate_at < 1)
        throw std::invalid_argument("linear_weights: p and truncate_at must be >= 1");
    const std::size_t m = std::min(p, truncate_at);
    // Sum of the kept raw numerators p, p-1, ..., p-m+1 is m(2p-m+1)/2.
    const double norm = 0.5 * static_cast<double>(m) * static_cast<double>(2 * p - m + 1);
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = static_cast<double>(p - j) / norm;
    return w;
}

double nnd_from_table(const NeighborTable& t, std::size_t query, std::size_t k) {
    return -t.dist(query, k);
}

double lnnd_ratio(double numerator, double denominator) {
    if (denominator == 0.0) return numerator == 0.0 ? -1.0 : kMostAnomalous;
    return -numerator / denominator;
}

double alp_from_neighbors(std::span<const double> query_dists,
                          std::span<const std::size_t> query_nbrs,
                          const std::vector<double>& wk, const std::vector<double>& wl,
                          const std::function<double(std::size_t, std::size_t)>& nbr_dist) {
    const std::size_t k_eff = wk.size();
    const std::size_t l_eff = wl.size();
    std::vector<double> lp(k_eff);
    for (std::size_t i = 0; i < k_eff; ++i) {
        double local = 0.0;  // D_i(y): weighted mean of neighbours' i-th distances
        for (std::size_t j = 0; j < l_eff; ++j) local += wl[j] * nbr_dist(query_nbrs[j], i + 1);
        const double d = query_dists[i];
        lp[i] = (local + d) == 0.0 ? 1.0 : local / (local + d);
    }
    std::sort(lp.begin(), lp.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < k_eff; ++i) s += wk[i] * lp[i];
    return s;
}

namespace {

class NndModel final : public FittedDescriptor {
public:
    NndModel(const Matrix& target, std::size_t k) : index_(target), k_(k) {
        if (k < 1 || k > target.rows())
            throw std::invalid_argument("NND: k out of [1, n]");
    }
    DescriptorKind kind() const override { return DescriptorKind::NND; }
    double score(std::span<const double> y) const override {
        Matrix q(1, index_.dim());
        for (std::size_t j = 0; j < index_.dim(); ++j) q(0, j) = y[j];
        const auto t = query(index_, q, k_);
        return nnd_from_table(t, 0, k_);
    }
    std::string to_json() const override {
        return nlohmann::json{{"kind", "NND"}, {"k", k_}, {"n", index_.size()}}.dump();
    }

private:
    NeighborIndex index_;
    std::size_t k_;
};

class LnndModel final : public FittedDescriptor {
public:
    LnndModel(const Matrix& target, std::size_t k) : index_(target), k_(k) {
        if (k < 1 || k + 1 > target.rows())
            throw std::invalid_argument("LNND: need n >= k+1");
        loo_ = query_loo(index_, k);
    }
    DescriptorKind kind() const override { return DescriptorKind::LNND; }
    double score(std::span<const double> y) const override {
        Matrix q(1, index_.dim());
        for (std::size_t j = 0; j < index_.dim(); ++j) q(0, j) = y[j];
        const auto t = query(index_, q, k_);
        const std::size_t nbr = t.neighbor(0, k_);
        return lnnd_ratio(t.dist(0, k_), loo_.dist(nbr, k_));
    }
    std::string to_json() const override {
        return nlohmann::json{{"kind", "LNND"}, {"k", k_}, {"n", index_.size()}}.dump();
    }

private:
    NeighborIndex index_;
    std::size_t k_;
    NeighborTable loo_;
};

class LofModel final : public FittedDescriptor {
public:
    LofModel(const Matrix& target, std::size_t k) : index_(target), k_(k) {
        if (k < 1 || k + 1 > target.rows())
            throw std::invalid_argument("LOF: need n >= k+1");
        loo_ = query_loo(index_, k);
        reach_mean_.resize(target.rows());
        for (std::size_t x = 0; x < target.rows(); ++x)
            reach_mean_[x] = mean_reach_dist(loo_.distances[x], loo_.indices[x]);
    }
    DescriptorKind kind() const override { return DescriptorKind::LOF; }
    double score(std::span<const double> y) const override {
        Matrix q(1, index_.dim());
        for (std::size_t j = 0; j < index_.dim(); ++j) q(0, j) = y[j];
        const auto t = query(index_, q, k_);
        return score_from_lists(t.distances[0], t.indices[0]);
    }
    // Shared with the validation path: score from a precomputed neighbour list.
    double score_from_lists(const std::vector<double>& dists,
                            const std::vector<std::size_t>& nbrs) const {
        const double rm_y = mean_reach_dist(dists, nbrs);
        // LOF(y) = mean_x lrd(x)/lrd(y) = mean_x rm(y)/rm(x); 0/0 -> 1,
        // positive/0 -> most anomalous.
        double lof = 0.0;
        for (std::size_t j = 0; j < k_; ++j) {
            const double rm_x = reach_mean_[nbrs[j]];
            if (rm_x == 0.0) {
                if (rm_y != 0.0) return kMostAnomalous;
                lof += 1.0;
            } else {
                lof += rm_y / rm_x;
            }
        }
        return -lof / static_cast<double>(k_);
    }
    std::string to_json() const override {
        return nlohmann::json{{"kind", "LOF"}, {"k", k_}, {"n", index_.size()}}.dump();
    }

private:
    // mean over the k neighbours b of max(d_k(b), dist(., b))
    double mean_reach_dist(const std::vector<double>& dists,
                           const std::vector<std::size_t>& nbrs) const {
        double s = 0.0;
        for (std::size_t j = 0; j < k_; ++j)
            s += std::max(loo_.dist(nbrs[j], k_), dists[j]);
        return s / static_cast<double>(k_);
    }

    NeighborIndex index_;
    std::size_t k_;
    NeighborTable loo_;
    std::vector<double> reach_mean_;
};

class AlpModel final : public FittedDescriptor {
public:
    AlpModel(const Matrix& target, std::size_t k, std::size_t l) : index_(target), k_(k), l_(l) {
        const std::size_t n = target.rows();
        if (n < 2) throw std::invalid_argument("ALP: need n >= 2");
        if (k < 1 || l < 1 || k > 5 * n || l > 5 * n)
            throw std::invalid_argument("ALP: k, l out of [1, 5n]");
        trunc_ = alp_truncation(n);
        wk_ = linear_weights(k, trunc_);
        wl_ = linear_weights(l, trunc_);
        loo_ = query_loo(index_, trunc_);
    }
    DescriptorKind kind() const override { return DescriptorKind::ALP; }
    double score(std::span<const double> y) const override {
        Matrix q(1, index_.dim());
        for (std::size_t j = 0; j < index_.dim(); ++j) q(0, j) = y[j];
        const std::size_t depth = std::max(wk_.size(), wl_.size());
        const auto t = query(index_, q, depth);
        return alp_from_neighbors(
            t.distances[0], t.indices[0], wk_, wl_,
            [this](std::size_t x, std::size_t i) { return loo_.dist(x, i); });
    }
    std::string to_json() const override {
        return nlohmann::json{
            {"kind", "ALP"}, {"k", k_}, {"l", l_}, {"truncation", trunc_}, {"n", index_.size()}}
            .dump();
    }

private:
    NeighborIndex index_;
    std::size_t k_, l_;
    std::size_t trunc_;
    std::vector<double> wk_, wl_;
    NeighborTable loo_;
};

class SvmModel final : public FittedDescriptor {
public:
    SvmModel(Matrix target, double nu, double c_prime) : target_(std::move(target)) {
        if (nu < 1e-6 || nu > 1.0) throw std::invalid_argument("SVM: nu out of [1e-6, 1]");
        if (c_prime < 1e-6 || c_prime > 1.0 - 1e-6)
            throw std::invalid_argument("SVM: c' out of [1e-6, 1-1e-6]");
        nu_ = nu;
        c_prime_ = c_prime;
        sol_ = solve_one_class_svm(target_, nu, c_prime / (1.0 - c_prime));
    }
    DescriptorKind kind() const override { return DescriptorKind::SVM; }
    double score(std::span<const double> y) const override {
        return svm_decision(target_, sol_, y);
    }
    std::string to_json() const override {
        return nlohmann::json{{"kind", "SVM"},
                              {"nu", nu_},
                              {"c_prime", c_prime_},
                              {"c", sol_.c},
                              {"rho", sol_.rho},
                              {"alpha", sol_.alpha}}
            .dump();
    }
    const SvmSolution& solution() const { return sol_; }

private:
    Matrix target_;
    double nu_ = 0.5, c_prime_ = 0.5;
    SvmSolution sol_;
};

}  // namespace

std::unique_ptr<FittedDescriptor> fit_descriptor(DescriptorKind kind, const Matrix& target,
                                                 const HyperParams& params) {
    switch (kind) {
        case DescriptorKind::NND: return std::make_unique<NndModel>(target, params.k);
        case DescriptorKind::LNND: return std::make_unique<LnndModel>(target, params.k);
        case DescriptorKind::LOF: return std::make_unique<LofModel>(target, params.k);
        case DescriptorKind::ALP: return std::make_unique<AlpModel>(target, params.k, params.l);
        case DescriptorKind::SVM:
            return std::make_unique<SvmModel>(target, params.nu, params.c_prime);
    }
    throw std::logic_error("fit_descriptor: bad kind");
}

}  // namespace occ
