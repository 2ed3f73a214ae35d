#include "occ/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace occ {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<ProblemWeight> dataset_equal_weights(const std::vector<std::string>& problem_ids,
                                                 const std::vector<std::string>& dataset_ids) {
    if (problem_ids.size() != dataset_ids.size())
        throw std::invalid_argument("dataset_equal_weights: misaligned inputs");
    std::map<std::string, std::size_t> per_dataset;
    for (const auto& d : dataset_ids) ++per_dataset[d];
    const double n_datasets = static_cast<double>(per_dataset.size());
    std::vector<ProblemWeight> out(problem_ids.size());
    for (std::size_t i = 0; i < problem_ids.size(); ++i) {
        out[i].problem_id = problem_ids[i];
        out[i].dataset_id = dataset_ids[i];
        out[i].weight = 1.0 / (static_cast<double>(per_dataset[dataset_ids[i]]) * n_datasets);
    }
    return out;
}

double weighted_mean(const std::vector<double>& values, const std::vector<ProblemWeight>& weights) {
    if (values.empty() || values.size() != weights.size())
        throw std::invalid_argument("weighted_mean: empty or misaligned inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i].weight * values[i];
        den += weights[i].weight;
    }
    return num / den;
}

double clustered_wilcoxon(const std::vector<PairedSample>& sample, Alternative alternative) {
    std::vector<const PairedSample*> nonzero;
    for (const auto& s : sample) {
        if (!std::isfinite(s.difference))
            throw std::invalid_argument("clustered_wilcoxon: non-finite difference");
        if (s.difference != 0.0) nonzero.push_back(&s);
    }
    if (nonzero.empty()) return 0.5;  // no evidence either way

    // Midranks of |difference| across all non-zero observations.
    std::vector<std::size_t> order(nonzero.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(nonzero[a]->difference) < std::abs(nonzero[b]->difference);
    });
    std::vector<double> rank(nonzero.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        const double v = std::abs(nonzero[order[i]]->difference);
        while (j < order.size() && std::abs(nonzero[order[j]]->difference) == v) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) rank[order[t]] = midrank;
        i = j;
    }

    std::map<std::string, double> cluster_sum;
    for (std::size_t s = 0; s < nonzero.size(); ++s)
        cluster_sum[nonzero[s]->cluster_id] +=
            nonzero[s]->difference > 0.0 ? rank[s] : -rank[s];

    double statistic = 0.0, variance = 0.0;
    for (const auto& [cluster, sum] : cluster_sum) {
        statistic += sum;
        variance += sum * sum;
    }
    if (variance == 0.0) return 0.5;
    const double z = statistic / std::sqrt(variance);
    // Positive differences favour the first member of the pair; small p under
    // Greater means the first is better.
    return alternative == Alternative::Greater ? 1.0 - normal_cdf(z) : normal_cdf(z);
}

std::vector<double> holm_bonferroni(const std::vector<double>& pvalues) {
    const std::size_t m = pvalues.size();
    for (double p : pvalues)
        if (p < 0.0 || p > 1.0 || !std::isfinite(p))
            throw std::invalid_argument("holm_bonferroni: p-values must lie in [0,1]");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    std::vector<double> adjusted(m);
    double running_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = std::min(1.0, static_cast<double>(m - i) * pvalues[order[i]]);
        running_max = std::max(running_max, scaled);
        adjusted[order[i]] = running_max;
    }
    return adjusted;
}

std::optional<double> weighted_kendall_tau(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           const std::vector<ProblemWeight>& weights) {
    if (a.size() != b.size() || a.size() != weights.size() || a.size() < 2)
        throw std::invalid_argument("weighted_kendall_tau: misaligned or too-short inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 || db == 0.0) continue;  // ties excluded entirely
            const double w = weights[i].weight * weights[j].weight;
            den += w;
            num += (da > 0.0) == (db > 0.0) ? w : -w;
        }
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace occ
