#pragma once

// Small dense real-polynomial toolkit. Coefficients are stored in ascending
// order: c[0] + c[1] x + ... + c[n] x^n.

#include <complex>
#include <span>
#include <vector>

namespace optokerr::poly {

using Coefficients = std::vector<double>;

Coefficients add(std::span<const double> p, std::span<const double> q);
Coefficients multiply(std::span<const double> p, std::span<const double> q);
Coefficients scale(std::span<const double> p, double s);

double evaluate(std::span<const double> p, double x);
double evaluate_derivative(std::span<const double> p, double x);

// sum_i |c_i| |x|^i, the natural magnitude against which p(x) is judged.
double absolute_sum(std::span<const double> p, double x);

// |p(x)| / absolute_sum(p, x); zero when both vanish.
double relative_residual(std::span<const double> p, double x);

// Eigenvalues of the companion matrix of p (leading coefficient must be
// non-zero). Throws RootFindingError if the eigen-solver does not converge.
std::vector<std::complex<double>> companion_roots(std::span<const double> p);

// Newton iterations on p starting from x, stopping once the step stalls or
// the residual stops improving.
double newton_polish(std::span<const double> p, double x, int max_iterations = 8);

} // namespace optokerr::poly
