#pragma once

#include "optokerr/model.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace optokerr {

using complex = std::complex<double>;

// Raw rates entering the steady-state polynomial. Unlike SystemParams this
// admits a negative cross-Kerr coupling, which is only used for sign studies.
struct QuinticInputs {
    double omega_m = 0.0;
    double g0 = 0.0;
    double g_ck = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double delta_a = 0.0;
    double eps_c = 0.0;
};

// Steady-state polynomial in the mean photon number x = |A0|^2,
//
//   (gamma^2 + Omega_m^2)^2 * ( x [kappa^2 + Delta(x)^2] - eps_c^2 ) = sum_i a_i x^i,
//
// held in scaled form. Rates are divided by omega_m and x = x_unit * u, so
// that sum_i a_i x^i = value_scale * sum_i scaled[i] u^i.
struct QuinticCoefficients {
    std::array<double, 6> scaled{};
    double x_unit = 1.0;
    double value_scale = 1.0;
    int degree = 0; // after dropping negligible leading terms

    // a_i in physical units.
    double physical(int i) const;
    std::array<double, 6> physical_all() const;

    // Polynomial value at a physical photon number x.
    double evaluate(double x) const;
    double evaluate_scaled(double u) const;
    double relative_residual(double x) const;
};

QuinticCoefficients quintic_coefficients(const QuinticInputs& in);
QuinticCoefficients quintic_coefficients(const SystemParams& sys, double delta_a, double eps_c);

struct PhotonRoot {
    double x = 0.0;          // mean photon number
    double residual = 0.0;   // relative polynomial residual
    bool marginal = false;   // coincides with a neighbour (fold/tangency)
};

// All real steady photon numbers, ascending. An undriven cavity yields the
// single root x = 0; otherwise only x > 0 is returned.
std::vector<PhotonRoot> steady_photon_roots(const SystemParams& sys, double delta_a, double eps_c);
std::vector<double> steady_photon_numbers(const SystemParams& sys, double delta_a, double eps_c);

// |B0|^2 as a function of |A0|^2.
double phonon_of_photon(double x, const SystemParams& sys);

// Effective detuning Delta(x).
double effective_detuning(double x, const SystemParams& sys, double delta_a);

// |x [kappa^2 + Delta(x)^2] - eps_c^2| relative to the larger of the two terms.
double photon_equation_residual(double x, const SystemParams& sys, double delta_a, double eps_c);

struct SteadyState {
    complex A0;
    complex B0;
    double n_photon = 0.0;
    double n_phonon = 0.0;
    double Delta = 0.0;   // effective detuning
    double Omega_m = 0.0; // omega_m - g_ck |A0|^2
    complex g;            // g0 + g_ck B0
    complex G;            // fluctuation coupling
};

// Tolerance on the steady-state residual accepted by steady_state_from_photon.
inline constexpr double kSteadyResidualTolerance = 1e-9;

SteadyState steady_state_from_photon(double x, const SystemParams& sys, double delta_a, double eps_c);

struct DescartesResult {
    std::string signs; // highest degree first, '0' marks a vanishing coefficient
    int alternations = 0;
};

DescartesResult descartes_check(const QuinticCoefficients& coeffs);

} // namespace optokerr
