#pragma once

// Deterministic mean-field evolution of the cavity and mechanical amplitudes.
//
//   da/dt = -(i Delta_a + kappa) a + i g0 a (b + b*) + i g_ck a |b|^2 + eps_c + eps_p e^{-i Delta_p t}
//   db/dt = -(i omega_m + gamma) b + i g0 |a|^2 + i g_ck |a|^2 b
//
// The probe term is present only when eps_p > 0. Internally time is measured
// in units of 1/omega_m; every public time is in seconds.

#include "optokerr/model.hpp"
#include "optokerr/steadystate.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace optokerr {

struct MeanFieldState {
    complex a;
    complex b;
};

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-13;
    double max_step = 0.0;           // seconds; 0 selects an eighth of a mechanical period
    std::size_t max_steps = 20'000'000; // accepted plus rejected steps
};

struct Trajectory {
    std::vector<double> times; // seconds
    std::vector<complex> a;
    std::vector<complex> b;
    bool converged = false; // reached t_end
    MeanFieldState final_state;
};

// Right-hand side of the mean-field equations in physical units (1/s).
MeanFieldState mean_field_rate(const SystemParams& sys, const DriveParams& drive, double t,
                               const MeanFieldState& s);

// Integrates from t = 0 to t_end (a negative t_end runs backward in time).
// sample_times must lie between 0 and t_end and be ordered in the direction
// of integration; they are filled from the dense output. With no sample
// times only the endpoints are recorded.
Trajectory integrate_mean_field(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& initial,
                                double t_end, std::span<const double> sample_times = {},
                                IntegratorOptions opts = {});

struct SettleOptions {
    double t_end = 0.0;          // seconds; 0 selects 20000 mechanical periods
    double threshold = 1e-8;     // on the windowed criterion
    double window_periods = 10.0;
    double match_tolerance = 1e-6; // relative distance to the matched root
    IntegratorOptions integrator;
};

struct SettleOutcome {
    bool converged = false;
    std::optional<SteadyState> state; // set when converged onto a verified root
    std::optional<std::size_t> root_index; // index into steady_photon_roots
    MeanFieldState final_state;
    double criterion = 0.0; // last value of the windowed criterion
    double match_distance = 0.0;
    double t_final = 0.0;
};

// max(|da/dt| / (kappa |a| + eps), |db/dt| / (gamma |b| + eps)), eps = 1e-12 omega_m.
double settle_criterion(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& s);

// Runs until the criterion stays below threshold for window_periods
// mechanical periods, or until t_end or the step budget is reached. Requires
// eps_p = 0. A converged run whose endpoint is not within match_tolerance of
// a steady root reports converged = true with no state.
SettleOutcome settle(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& initial,
                     SettleOptions opts = {});

// Settles at each control amplitude in turn, starting each run from the
// previous endpoint. Models an adiabatic ramp of the drive.
std::vector<SettleOutcome> ramp_settle(const SystemParams& sys, const DriveParams& drive,
                                       std::span<const double> eps_c_values, const MeanFieldState& initial,
                                       SettleOptions opts = {});

inline constexpr std::uint64_t kDefaultEnsembleSeed = 20240611;

// |a| uniform in [0, a_max], |b| uniform in [0, b_max], phases uniform.
std::vector<MeanFieldState> random_initial_states(std::size_t n, double a_max, double b_max,
                                                  std::uint64_t seed = kDefaultEnsembleSeed);

// Header t_s,re_a,im_a,re_b,im_b then one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

} // namespace optokerr
