#pragma once

// Weak-probe response of the driven cavity: first-order sideband amplitudes,
// input-output relations and the reduced output field eps_T whose real and
// imaginary parts are the probe absorption and dispersion.

#include "optokerr/model.hpp"
#include "optokerr/stability.hpp"
#include "optokerr/steadystate.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace optokerr {

struct ResponseOptions {
    // Keep the probe source in the A_- relation. Switching it off gives the
    // conventional sideband equations, which the closed form for A_+ assumes.
    bool aminus_probe_term = true;
};

struct SidebandAmplitudes {
    complex A_plus;
    complex A_minus;
    complex B_plus;
    complex B_minus;
    double Delta_plus = 0.0;  // Delta + Delta_p
    double Delta_minus = 0.0; // Delta - Delta_p
    double omega_plus = 0.0;  // Omega_m + Delta_p
    double omega_minus = 0.0; // Omega_m - Delta_p
    double residual = 0.0;    // worst relative back-substitution residual
};

// Solves the coupled first-order system for (A_+, A_-^*, B_+, B_-^*).
SidebandAmplitudes linear_response(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive,
                                   ResponseOptions opts = {});

// Back-substitution residual of the four sideband relations.
double sideband_residual(const SidebandAmplitudes& amps, const SteadyState& ss, const SystemParams& sys,
                         const DriveParams& drive, ResponseOptions opts = {});

// Printed closed form of A_+; a cross-check only.
complex closed_form_aplus(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive);

struct OutputAmplitudes {
    complex A_out;       // at the control frequency
    complex A_out_plus;  // at the probe (Stokes) frequency
    complex A_out_minus; // at 2 omega_c - omega_p
};

OutputAmplitudes output_amplitudes(const SteadyState& ss, const SidebandAmplitudes& amps, const DriveParams& drive,
                                   double kappa);

// eps_T = sqrt(2 kappa) A_out^+ / eps_p + 1 = 2 kappa A_+ / eps_p.
complex epsilon_T(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive,
                  ResponseOptions opts = {});

// Probe response about a fixed operating point, as a function of the reduced
// probe offset delta_p = Delta_p - omega_m (rad/s).
class ProbeResponse {
public:
    ProbeResponse(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss,
                  ResponseOptions opts = {});

    SidebandAmplitudes amplitudes(double delta_p) const;
    complex eps_T(double delta_p) const;
    complex closed_form_eps_T(double delta_p) const;
    double absorption(double delta_p) const { return eps_T(delta_p).real(); }

    const SystemParams& system() const noexcept { return sys_; }
    const SteadyState& state() const noexcept { return ss_; }

private:
    DriveParams drive_at(double delta_p) const;

    SystemParams sys_;
    DriveParams drive_;
    SteadyState ss_;
    ResponseOptions opts_;
};

// Branch used as the operating point: by default the lowest stable root.
struct BranchSelect {
    std::optional<std::size_t> index;
};

struct OperatingPoint {
    std::size_t index = 0;
    SteadyState state;
    StabilityReport stability;
    std::vector<PhotonRoot> roots;
};

OperatingPoint select_branch(const SystemParams& sys, const DriveParams& drive, BranchSelect branch = {});

struct ResponsePoint {
    double delta_p_reduced = 0.0; // delta_p / omega_m
    complex eps_T;
    double absorption() const { return eps_T.real(); }
    double dispersion() const { return eps_T.imag(); }
};

// Agreement between the linear system and the printed closed form for A_+.
struct ConsistencyReport {
    std::size_t points = 0;
    double max_relative_difference = 0.0;
    double worst_delta_p_reduced = 0.0;
    double max_residual = 0.0;
    bool agrees = true; // max_relative_difference <= tolerance
    double tolerance = 1e-9;
};

struct ResponseSpectrum {
    OperatingPoint operating_point;
    std::vector<ResponsePoint> points;
    ConsistencyReport consistency;
};

// grid: sorted probe offsets delta_p in rad/s.
ResponseSpectrum absorption_spectrum(const SystemParams& sys, const DriveParams& drive, BranchSelect branch,
                                     std::span<const double> grid, ResponseOptions opts = {});

struct ZeroScanOptions {
    std::size_t points = 2001;
    double half_window = 0.5;     // in units of omega_m
    double tolerance = 1e-12;     // bracket width, in units of omega_m
};

// Crossing of Re(eps_T) through zero nearest delta_p = 0, in rad/s.
double zero_absorption_point(const SystemParams& sys, const DriveParams& drive, BranchSelect branch = {},
                             ResponseOptions opts = {}, ZeroScanOptions scan = {});
double zero_absorption_point(const ProbeResponse& response, ZeroScanOptions scan = {});

struct AbsorptionPeak {
    double center = 0.0; // rad/s
    double height = 0.0;
    double left = 0.0;   // half-height crossings, rad/s
    double right = 0.0;
    double width = 0.0;  // right - left
    bool bounded = false; // both half-height crossings found inside the grid
};

// Local maxima of Re(eps_T) on the grid, refined by golden-section search,
// with full width at half of each maximum.
std::vector<AbsorptionPeak> absorption_peaks(const ProbeResponse& response, std::span<const double> grid);

} // namespace optokerr
