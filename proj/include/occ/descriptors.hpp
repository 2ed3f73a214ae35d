#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "occ/matrix.hpp"
#include "occ/neighbors.hpp"

namespace occ {

enum class DescriptorKind { NND, LNND, LOF, ALP, SVM };

std::string to_string(DescriptorKind kind);
DescriptorKind descriptor_from_string(const std::string& name);

// Hyperparameter values for one descriptor. k/l are used by the
// neighbour-based kinds, nu/c_prime by SVM.
struct HyperParams {
    std::size_t k = 1;
    std::size_t l = 1;
    double nu = 0.5;
    double c_prime = 0.5;
};

// Score returned when a positive quantity is divided by zero: the most
// anomalous value we can represent while keeping arithmetic well defined.
inline constexpr double kMostAnomalous = -1.7976931348623157e308;  // lowest double

// Hyperparameter domains. k caps follow min(n, ceil(100 ln n)) for
// NND/LNND/LOF and 5n for ALP; natural log throughout.
std::size_t k_domain_max(DescriptorKind kind, std::size_t n_target);

// Neighbour-table truncation depth for ALP: min(n - 1, ceil(20 ln n)).
// The n - 1 cap keeps every neighbour's own i-th neighbour distance defined.
std::size_t alp_truncation(std::size_t n_target);

// Default hyperparameter values, used as local-optimiser starting points and
// for the optimised-vs-default comparison. NND's default k is 1; ALP's are
// ceil(5.5 ln n) and ceil(6 ln n); LNND and LOF defaults are fallbacks
// (k = 1 and k = 10) since no canonical values exist for them here.
HyperParams default_params(DescriptorKind kind, std::size_t n_target);

// Linearly decreasing weights p, p-1, ..., 1 normalised to sum 1, truncated
// to the first min(p, truncate_at) entries and renormalised.
std::vector<double> linear_weights(std::size_t p, std::size_t truncate_at);

class FittedDescriptor {
public:
    virtual ~FittedDescriptor() = default;
    virtual DescriptorKind kind() const = 0;
    // Higher = more target-like, for every kind.
    virtual double score(std::span<const double> y) const = 0;
    virtual std::string to_json() const = 0;

    std::vector<double> score_all(const Matrix& queries) const {
        std::vector<double> out(queries.rows());
        for (std::size_t i = 0; i < queries.rows(); ++i) out[i] = score(queries.row(i));
        return out;
    }
};

// Fits on target-class data only. Throws std::invalid_argument when the
// hyperparameters fall outside the descriptor's domain for this n.
std::unique_ptr<FittedDescriptor> fit_descriptor(DescriptorKind kind, const Matrix& target,
                                                 const HyperParams& params);

// Scoring primitives shared with the validation module. All take prebuilt
// neighbour tables so one k_max query serves every k.

// -d_k(y)
double nnd_from_table(const NeighborTable& t, std::size_t query, std::size_t k);

// -num/den with the zero rules: 0/0 -> -1, x/0 -> kMostAnomalous.
double lnnd_ratio(double numerator, double denominator);

// ALP score from the query's neighbour list and a callback giving the i-th
// neighbour distance of neighbour x (with x's own row excluded).
double alp_from_neighbors(std::span<const double> query_dists,
                          std::span<const std::size_t> query_nbrs,
                          const std::vector<double>& wk, const std::vector<double>& wl,
                          const std::function<double(std::size_t x, std::size_t i)>& nbr_dist);

}  // namespace occ
