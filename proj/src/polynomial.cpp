#include "optokerr/polynomial.hpp"

#include "optokerr/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace optokerr::poly {

Coefficients add(std::span<const double> p, std::span<const double> q) {
    Coefficients r(std::max(p.size(), q.size()), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        r[i] += p[i];
    for (std::size_t i = 0; i < q.size(); ++i)
        r[i] += q[i];
    return r;
}

Coefficients multiply(std::span<const double> p, std::span<const double> q) {
    if (p.empty() || q.empty())
        return {};
    Coefficients r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            r[i + j] += p[i] * q[j];
    return r;
}

Coefficients scale(std::span<const double> p, double s) {
    Coefficients r(p.begin(), p.end());
    for (double& c : r)
        c *= s;
    return r;
}

double evaluate(std::span<const double> p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = acc * x + p[i];
    return acc;
}

double evaluate_derivative(std::span<const double> p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 1;)
        acc = acc * x + static_cast<double>(i) * p[i];
    return acc;
}

double absolute_sum(std::span<const double> p, double x) {
    const double ax = std::abs(x);
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = acc * ax + std::abs(p[i]);
    return acc;
}

double relative_residual(std::span<const double> p, double x) {
    const double denom = absolute_sum(p, x);
    if (denom == 0.0)
        return 0.0;
    return std::abs(evaluate(p, x)) / denom;
}

std::vector<std::complex<double>> companion_roots(std::span<const double> p) {
    std::size_t n = p.size();
    while (n > 0 && p[n - 1] == 0.0)
        --n;
    if (n <= 1)
        return {};
    const int degree = static_cast<int>(n - 1);
    const double lead = p[n - 1];

    // Upper Hessenberg companion form: first row holds -c_{n-1-j}/c_n.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int j = 0; j < degree; ++j)
        companion(0, j) = -p[n - 2 - static_cast<std::size_t>(j)] / lead;
    for (int i = 1; i < degree; ++i)
        companion(i, i - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw RootFindingError("companion eigen-decomposition did not converge",
                               std::vector<double>(p.begin(), p.begin() + static_cast<long>(n)));

    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i)
        roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

double newton_polish(std::span<const double> p, double x, int max_iterations) {
    double best = x;
    double best_res = std::abs(evaluate(p, x));
    for (int it = 0; it < max_iterations && best_res > 0.0; ++it) {
        const double d = evaluate_derivative(p, best);
        if (d == 0.0 || !std::isfinite(d))
            break;
        const double step = evaluate(p, best) / d;
        const double candidate = best - step;
        const double res = std::abs(evaluate(p, candidate));
        if (!(res < best_res))
            break;
        best = candidate;
        best_res = res;
        if (std::abs(step) <= 1e-16 * std::abs(best))
            break;
    }
    return best;
}

} // namespace optokerr::poly
