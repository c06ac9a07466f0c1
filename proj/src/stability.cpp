#include "optokerr/stability.hpp"

#include "optokerr/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace optokerr {

namespace {

constexpr double kImaginaryResidue = 1e-10;
constexpr double kMarginalFraction = 1e-8;

} // namespace

DriftMatrix drift_matrix(const SteadyState& ss, const SystemParams& sys, DriftOptions opts) {
    const complex i{0.0, 1.0};
    const double kappa = sys.kappa();
    const double gamma = sys.gamma();
    const complex A = ss.A0;
    const complex Ac = std::conj(ss.A0);

    complex G = ss.G;
    if (opts.neglect_gamma_in_coupling)
        G = sys.g0() * (1.0 + sys.g_ck() * ss.n_photon / ss.Omega_m);
    const complex Gc = std::conj(G);

    DriftMatrix C;
    auto& m = C.m;
    m.setZero();
    m(0, 0) = -i * ss.Delta - kappa;
    m(0, 2) = i * A * Gc;
    m(0, 3) = i * A * G;

    m(1, 1) = i * ss.Delta - kappa;
    m(1, 2) = -i * Ac * Gc;
    m(1, 3) = -i * Ac * G;

    m(2, 0) = i * Ac * G;
    m(2, 1) = i * A * G;
    m(2, 2) = -i * ss.Omega_m - gamma;

    m(3, 0) = -i * Ac * Gc;
    m(3, 1) = -i * A * Gc;
    m(3, 3) = i * ss.Omega_m - gamma;
    return C;
}

CharacteristicCoefficients characteristic_coefficients(const DriftMatrix& C) {
    // Faddeev-LeVerrier: M_k = C M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(C M_k) / k.
    const Eigen::Matrix4cd& A = C.m;
    const Eigen::Matrix4cd I = Eigen::Matrix4cd::Identity();
    std::array<complex, 5> c{};
    c[4] = 1.0;
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    for (int k = 1; k <= 4; ++k) {
        M = A * M + c[static_cast<std::size_t>(5 - k)] * I;
        c[static_cast<std::size_t>(4 - k)] = -(A * M).trace() / static_cast<double>(k);
    }

    // Scale of c_{4-k} is bounded by binom(4,k) rho^k with rho the row-sum norm.
    double rho = 0.0;
    for (int r = 0; r < 4; ++r)
        rho = std::max(rho, A.row(r).cwiseAbs().sum());
    constexpr double binom[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
    for (int k = 1; k <= 4; ++k) {
        const complex ck = c[static_cast<std::size_t>(4 - k)];
        const double ref = binom[k] * std::pow(rho, k);
        if (std::abs(ck.imag()) > kImaginaryResidue * ref) {
            std::ostringstream msg;
            msg << "characteristic coefficient c" << (4 - k) << " has imaginary part " << ck.imag()
                << " (reference " << ref << "): matrix is not physical";
            throw StructuralError(msg.str());
        }
    }
    return {c[3].real(), c[2].real(), c[1].real(), c[0].real()};
}

bool routh_hurwitz_stable(double c3, double c2, double c1, double c0) {
    return c3 > 0.0 && c3 * c2 - c1 > 0.0 && c3 * c2 * c1 - (c1 * c1 + c3 * c3 * c0) > 0.0 && c0 > 0.0;
}

bool routh_hurwitz_stable(const CharacteristicCoefficients& c) {
    return routh_hurwitz_stable(c.c3, c.c2, c.c1, c.c0);
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Stable:
        return "stable";
    case Verdict::Unstable:
        return "unstable";
    case Verdict::Marginal:
        return "marginal";
    }
    return "marginal";
}

double marginal_band(const SystemParams& sys) {
    return kMarginalFraction * (sys.kappa() + sys.gamma());
}

StabilityReport classify(const SteadyState& ss, const SystemParams& sys, DriftOptions opts) {
    const DriftMatrix C = drift_matrix(ss, sys, opts);
    StabilityReport report;
    report.coeffs = characteristic_coefficients(C);

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(C.m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw SolverError("eigen-decomposition of the drift matrix did not converge");
    std::array<complex, 4> ev{};
    for (int k = 0; k < 4; ++k)
        ev[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
    // Deterministic order: by real part, then imaginary part.
    std::sort(ev.begin(), ev.end(), [](const complex& a, const complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    report.eigenvalues = ev;

    report.margin = std::numeric_limits<double>::infinity();
    for (const auto& l : ev)
        report.margin = std::min(report.margin, -l.real());
    report.eig_verdict = report.margin > 0.0;
    report.rh_verdict = routh_hurwitz_stable(report.coeffs);

    if (std::abs(report.margin) < marginal_band(sys)) {
        report.verdict = Verdict::Marginal;
    } else if (report.rh_verdict != report.eig_verdict) {
        std::ostringstream msg;
        msg << "Routh-Hurwitz verdict (" << report.rh_verdict << ") disagrees with eigenvalues (margin "
            << report.margin << ")";
        throw SolverError(msg.str());
    } else {
        report.verdict = report.eig_verdict ? Verdict::Stable : Verdict::Unstable;
    }
    return report;
}

std::vector<std::size_t> fold_alternation_violations(const std::vector<Verdict>& pattern) {
    std::vector<std::size_t> bad;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k] == Verdict::Marginal)
            continue;
        const Verdict expected = (k % 2 == 0) ? Verdict::Stable : Verdict::Unstable;
        if (pattern[k] != expected)
            bad.push_back(k);
    }
    const std::size_t last = pattern.size() - 1;
    if (!pattern.empty() && pattern.size() % 2 == 0 && (bad.empty() || bad.back() != last))
        bad.push_back(last);
    return bad;
}

} // namespace optokerr
