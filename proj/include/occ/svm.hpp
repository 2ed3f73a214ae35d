#pragma once

#include <cstddef>
#include <vector>

#include "occ/matrix.hpp"

namespace occ {

// Gaussian kernel exp(-||u-v||_2^2 / c) with c = c' / (1 - c'), so that
// c' in [1e-6, 1-1e-6] maps onto (0, inf) and larger c' widens the kernel.
double gaussian_kernel(std::span<const double> u, std::span<const double> v, double c);

struct SvmSolution {
    std::vector<double> alpha;  // dual coefficients, 0 <= alpha_i <= 1/(nu n), sum 1
    double rho = 0.0;           // offset recovered from free support vectors
    double c = 1.0;             // kernel width
    double objective = 0.0;     // 0.5 * alpha' K alpha at the solution
    double kkt_violation = 0.0; // residual max violation at termination
    std::size_t iterations = 0;
};

// Solves the one-class dual
//   min 0.5 sum_ij alpha_i alpha_j K(x_i, x_j)
//   s.t. 0 <= alpha_i <= 1/(nu n), sum alpha_i = 1
// with a pairwise SMO scheme (maximal-violation working pair) to KKT
// tolerance `tol`. Throws on non-convergence within `max_passes` * n updates.
SvmSolution solve_one_class_svm(const Matrix& target, double nu, double c, double tol = 1e-3,
                                std::size_t max_passes = 100000);

double svm_decision(const Matrix& target, const SvmSolution& sol, std::span<const double> y);

}  // namespace occ
