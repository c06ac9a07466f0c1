#pragma once

// Reference computations used only by the tests. Everything here is written
// from the defining formulas, in long double, without calling the library's
// root finders or polynomial builders.

#include <optokerr/model.hpp>
#include <optokerr/steadystate.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using ld = long double;

// Device used throughout the figures.
struct Reference {
    static constexpr double omega_a = 2.0 * std::numbers::pi * 1.3e9;
    static constexpr double omega_m = 2.0 * std::numbers::pi * 6.3e6;
    static constexpr double g0 = 250.0;
    static constexpr double kappa = 2.0 * std::numbers::pi * 1e5;
    static constexpr double gamma = 40.0;
    static constexpr double delta_a = omega_m;
};

inline optokerr::SystemParams reference_system(double g_ck) {
    return optokerr::SystemParams({Reference::omega_a, Reference::omega_m, Reference::g0, g_ck, Reference::kappa,
                                   Reference::gamma});
}

// Nondimensional device (omega_m = 1) drawn so that single and triple roots both occur.
struct Draw {
    optokerr::SystemParams sys;
    double delta_a;
    double eps_c;
};

inline Draw random_draw(std::mt19937_64& rng, bool with_ck) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
    const double kappa = log_uniform(0.01, 0.3);
    const double gamma = log_uniform(1e-4, 0.05);
    const double g0 = log_uniform(1e-3, 3e-2);
    const double delta_a = log_uniform(0.05, 2.0);
    const double g_ck = with_ck ? log_uniform(1e-6, 1e-3) : 0.0;
    const double k = 2 * g0 * g0 / (gamma * gamma + 1.0);
    const double x_t = log_uniform(0.05, 3.0) * delta_a / k;
    const double eps = std::sqrt(x_t * ((delta_a - k * x_t) * (delta_a - k * x_t) + kappa * kappa));
    return {optokerr::SystemParams({100.0, 1.0, g0, g_ck, kappa, gamma}), delta_a, eps};
}

// sqrt(2 kappa P / (hbar omega_c)) with omega_c = omega_a - delta_a.
inline double eps_of_power(double power, double delta_a = Reference::delta_a) {
    const ld hbar = 1.054571817e-34L;
    const ld w = static_cast<ld>(Reference::omega_a) - delta_a;
    return static_cast<double>(std::sqrt(2.0L * Reference::kappa * power / (hbar * w)));
}

inline double power_of_eps(double eps, double delta_a = Reference::delta_a) {
    const ld hbar = 1.054571817e-34L;
    const ld w = static_cast<ld>(Reference::omega_a) - delta_a;
    return static_cast<double>(static_cast<ld>(eps) * eps * hbar * w / (2.0L * Reference::kappa));
}

// Closed-form coefficients a_0..a_5 of the photon-number quintic.
inline std::array<ld, 6> quintic_closed_form(ld wm, ld g0, ld gck, ld kappa, ld gamma, ld da, ld eps) {
    const ld e2 = eps * eps, g2 = gamma * gamma, w2 = wm * wm, k2 = kappa * kappa;
    const ld s = g2 + w2;
    const ld q = da * (g0 * g0 + da * gck) + gck * k2;
    const ld h = g0 * g0 + da * gck;
    std::array<ld, 6> a{};
    a[0] = -e2 * s * s;
    a[1] = s * (4 * e2 * gck * wm + (da * da + k2) * s);
    a[2] = -2 * (2 * q * wm * s + e2 * gck * gck * (g2 + 3 * w2));
    a[3] = 2 * gck * q * g2 + 4 * e2 * gck * gck * gck * wm +
           2 * (2 * g0 * g0 * g0 * g0 + 5 * da * g0 * g0 * gck + 3 * gck * gck * (da * da + k2)) * w2;
    a[4] = -gck * (e2 * gck * gck * gck + 4 * (h * h + gck * gck * k2) * wm);
    a[5] = gck * gck * h * h + gck * gck * gck * gck * k2;
    return a;
}

// x [kappa^2 + (Delta_a - g0^2 x (g_ck x + 2 Omega_m) / (gamma^2 + Omega_m^2))^2] - eps^2.
inline ld photon_equation(ld x, ld wm, ld g0, ld gck, ld kappa, ld gamma, ld da, ld eps) {
    const ld om = wm - gck * x;
    const ld d = da - g0 * g0 * x * (gck * x + 2 * om) / (gamma * gamma + om * om);
    return x * (kappa * kappa + d * d) - eps * eps;
}

// Bisection to the last representable bracket.
inline ld bisect(const std::function<ld(ld)>& f, ld lo, ld hi) {
    ld flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const ld mid = 0.5L * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const ld fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5L * (lo + hi);
}

// Roots of f on (0, x_max] from sign changes on a geometric grid starting at
// x_min, each refined by bisection.
inline std::vector<ld> sign_change_roots(const std::function<ld(ld)>& f, ld x_min, ld x_max, std::size_t n) {
    std::vector<ld> roots;
    const ld ratio = std::pow(x_max / x_min, 1.0L / static_cast<ld>(n - 1));
    ld x_prev = x_min;
    ld f_prev = f(x_prev);
    for (std::size_t k = 1; k < n; ++k) {
        const ld x = k + 1 == n ? x_max : x_prev * ratio;
        const ld fx = f(x);
        if (fx == 0)
            roots.push_back(x);
        else if ((fx < 0) != (f_prev < 0) && f_prev != 0)
            roots.push_back(bisect(f, x_prev, x));
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

// All photon-number roots of the steady-state equation, by brute scan. Every
// root satisfies x kappa^2 <= eps^2, which bounds the scan.
inline std::vector<ld> brute_photon_roots(const optokerr::SystemParams& sys, double delta_a, double eps,
                                          std::size_t n = 100000) {
    const ld x_max = static_cast<ld>(eps) * eps / (static_cast<ld>(sys.kappa()) * sys.kappa()) * 1.0001L;
    const ld x_min = x_max * 1e-14L;
    auto f = [&](ld x) {
        return photon_equation(x, sys.omega_m(), sys.g0(), sys.g_ck(), sys.kappa(), sys.gamma(), delta_a, eps);
    };
    return sign_change_roots(f, x_min, x_max, n);
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 != 0), trigonometric form,
// then Newton-polished in long double. Ascending.
inline std::vector<ld> cubic_real_roots(ld c3, ld c2, ld c1, ld c0) {
    const ld a = c2 / c3, b = c1 / c3, c = c0 / c3;
    const ld p = b - a * a / 3;
    const ld q = 2 * a * a * a / 27 - a * b / 3 + c;
    const ld disc = q * q / 4 + p * p * p / 27;
    std::vector<ld> t;
    if (disc > 0) {
        const ld s = std::sqrt(disc);
        t.push_back(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s));
    } else {
        const ld r = std::sqrt(-p / 3);
        const ld arg = std::clamp<ld>(3 * q / (2 * p * r), -1, 1);
        const ld phi = std::acos(arg) / 3;
        for (int k = 0; k < 3; ++k)
            t.push_back(2 * r * std::cos(phi - 2 * std::numbers::pi_v<ld> * k / 3));
    }
    std::vector<ld> x;
    for (ld ti : t) {
        ld xi = ti - a / 3;
        for (int it = 0; it < 6; ++it) {
            const ld f = ((c3 * xi + c2) * xi + c1) * xi + c0;
            const ld df = (3 * c3 * xi + 2 * c2) * xi + c1;
            if (df == 0)
                break;
            const ld step = f / df;
            xi -= step;
            if (std::abs(step) <= std::abs(xi) * 1e-19L)
                break;
        }
        x.push_back(xi);
    }
    std::sort(x.begin(), x.end());
    return x;
}

// Positive roots of the g_ck = 0 cubic
//   k^2 x^3 - 2 Delta_a k x^2 + (kappa^2 + Delta_a^2) x - eps^2 = 0,  k = 2 g0^2 omega_m / (gamma^2 + omega_m^2).
inline std::vector<ld> plain_cubic_roots(ld wm, ld g0, ld kappa, ld gamma, ld da, ld eps) {
    const ld k = 2 * g0 * g0 * wm / (gamma * gamma + wm * wm);
    auto all = cubic_real_roots(k * k, -2 * da * k, kappa * kappa + da * da, -eps * eps);
    std::vector<ld> pos;
    for (ld r : all)
        if (r > 0)
            pos.push_back(r);
    return pos;
}

// Control amplitude squared at which the g_ck = 0 cubic first acquires three
// roots: the local minimum of x[(Delta_a - k x)^2 + kappa^2]. Zero when the
// curve is monotone (Delta_a^2 <= 3 kappa^2).
inline ld plain_fold_eps2(ld wm, ld g0, ld kappa, ld gamma, ld da) {
    const ld k = 2 * g0 * g0 * wm / (gamma * gamma + wm * wm);
    const ld disc = 16 * da * da * k * k - 12 * k * k * (kappa * kappa + da * da);
    if (disc <= 0)
        return 0;
    const ld x = (4 * da * k + std::sqrt(disc)) / (6 * k * k);
    return x * ((da - k * x) * (da - k * x) + kappa * kappa);
}

// Largest real part among the eigenvalues of a complex matrix.
inline double max_real_eigenvalue(const Eigen::Matrix4cd& m) {
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m, false);
    double best = -INFINITY;
    for (int i = 0; i < 4; ++i)
        best = std::max(best, es.eigenvalues()[i].real());
    return best;
}

inline double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace oracle
