#include "occ/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace occ {

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double c) {
    return std::exp(-squared_euclidean(u, v) / c);
}

SvmSolution solve_one_class_svm(const Matrix& target, double nu, double c, double tol,
                                std::size_t max_passes) {
    const std::size_t n = target.rows();
    if (n == 0) throw std::invalid_argument("solve_one_class_svm: empty target set");
    if (nu <= 0.0 || nu > 1.0) throw std::invalid_argument("solve_one_class_svm: nu out of (0,1]");
    if (c <= 0.0) throw std::invalid_argument("solve_one_class_svm: c must be positive");

    const double box = 1.0 / (nu * static_cast<double>(n));

    SvmSolution sol;
    sol.c = c;
    sol.alpha.assign(n, 0.0);

    // Feasible start: fill the box greedily; with nu = 1 this is already the
    // unique solution alpha_i = 1/n.
    {
        double remaining = 1.0;
        for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
            const double a = std::min(box, remaining);
            sol.alpha[i] = a;
            remaining -= a;
        }
    }

    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            kernel[i * n + j] = kernel[j * n + i] = gaussian_kernel(target.row(i), target.row(j), c);

    // gradient of 0.5 a'Ka is K a
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double g = 0.0;
        for (std::size_t j = 0; j < n; ++j) g += kernel[i * n + j] * sol.alpha[j];
        grad[i] = g;
    }

    const std::size_t max_iter = max_passes;
    const double eps_box = 1e-12;
    double violation = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        // KKT: grad_i >= rho where alpha_i can grow, grad_i <= rho where it
        // can shrink. Pick the maximally violating pair.
        double g_up = std::numeric_limits<double>::infinity();   // min grad over alpha_i < box
        double g_down = -std::numeric_limits<double>::infinity(); // max grad over alpha_j > 0
        std::size_t i_up = n, j_down = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (sol.alpha[i] < box - eps_box && grad[i] < g_up) {
                g_up = grad[i];
                i_up = i;
            }
            if (sol.alpha[i] > eps_box && grad[i] > g_down) {
                g_down = grad[i];
                j_down = i;
            }
        }
        if (i_up == n || j_down == n) {
            violation = 0.0;  // no feasible direction remains
            break;
        }
        violation = g_down - g_up;
        if (violation <= tol) break;

        const std::size_t i = i_up, j = j_down;
        const double curvature =
            kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
        double delta;
        if (curvature > 1e-15) {
            delta = (grad[j] - grad[i]) / curvature;
        } else {
            delta = std::numeric_limits<double>::infinity();
        }
        delta = std::min(delta, std::min(box - sol.alpha[i], sol.alpha[j]));
        if (delta <= 0.0) break;

        sol.alpha[i] += delta;
        sol.alpha[j] -= delta;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += delta * (kernel[t * n + i] - kernel[t * n + j]);
    }
    sol.iterations = it;
    sol.kkt_violation = std::max(violation, 0.0);
    if (it == max_iter && violation > tol)
        throw std::runtime_error("solve_one_class_svm: no convergence, KKT violation " +
                                 std::to_string(violation));

    // rho from free support vectors; fall back to the midpoint of the active
    // gradient bounds when every alpha sits on the box.
    double rho_sum = 0.0;
    std::size_t rho_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] > eps_box && sol.alpha[i] < box - eps_box) {
            rho_sum += grad[i];
            ++rho_count;
        }
    }
    if (rho_count > 0) {
        sol.rho = rho_sum / static_cast<double>(rho_count);
    } else {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (sol.alpha[i] > eps_box) lo = std::max(lo, grad[i]);
            if (sol.alpha[i] < box - eps_box) hi = std::min(hi, grad[i]);
        }
        if (!std::isfinite(lo)) lo = hi;
        if (!std::isfinite(hi)) hi = lo;
        sol.rho = 0.5 * (lo + hi);
    }

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += sol.alpha[i] * grad[i];
    sol.objective = 0.5 * obj;
    return sol;
}

double svm_decision(const Matrix& target, const SvmSolution& sol, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < target.rows(); ++i) {
        if (sol.alpha[i] == 0.0) continue;
        s += sol.alpha[i] * gaussian_kernel(target.row(i), y, sol.c);
    }
    return s - sol.rho;
}

}  // namespace occ
