#pragma once

#include "optokerr/model.hpp"
#include "optokerr/steadystate.hpp"

#include <Eigen/Core>

#include <array>
#include <string_view>
#include <vector>

namespace optokerr {

// Linearized fluctuation dynamics over (da, da^dag, db, db^dag).
struct DriftMatrix {
    Eigen::Matrix4cd m;
};

struct DriftOptions {
    // Use G evaluated with gamma + i Omega_m ~ i Omega_m. Comparison studies only.
    bool neglect_gamma_in_coupling = false;
};

DriftMatrix drift_matrix(const SteadyState& ss, const SystemParams& sys, DriftOptions opts = {});

// lambda^4 + c3 lambda^3 + c2 lambda^2 + c1 lambda + c0 = det(lambda I - C).
struct CharacteristicCoefficients {
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
};

CharacteristicCoefficients characteristic_coefficients(const DriftMatrix& C);

// Full quartic Routh-Hurwitz set, including c0 > 0.
bool routh_hurwitz_stable(double c3, double c2, double c1, double c0);
bool routh_hurwitz_stable(const CharacteristicCoefficients& c);

enum class Verdict { Stable, Unstable, Marginal };

std::string_view to_string(Verdict v);

struct StabilityReport {
    CharacteristicCoefficients coeffs;
    std::array<complex, 4> eigenvalues{};
    bool rh_verdict = false;
    bool eig_verdict = false;
    double margin = 0.0; // min over eigenvalues of -Re(lambda)
    Verdict verdict = Verdict::Marginal;

    // c0 > 0 on its own: the saddle-node (fold) part of the criterion.
    bool saddle_node_stable() const { return coeffs.c0 > 0.0; }
};

// Width of the band around the imaginary axis in which verdicts are not trusted.
double marginal_band(const SystemParams& sys);

StabilityReport classify(const SteadyState& ss, const SystemParams& sys, DriftOptions opts = {});

// Ascending-root stability pattern should read S,U,S,U,... ending in S.
// Returns the indices that break the alternation (empty when consistent).
std::vector<std::size_t> fold_alternation_violations(const std::vector<Verdict>& pattern);

} // namespace optokerr
