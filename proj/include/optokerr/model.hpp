#pragma once

// Physical parameters of the two-tone driven optomechanical cavity with
// cross-Kerr coupling. Every frequency, coupling and decay rate is an
// angular frequency in rad/s.

#include <numbers>

namespace optokerr {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace constants

// Static device parameters. Validated on construction, immutable afterwards.
class SystemParams {
public:
    struct Values {
        double omega_a = 0.0; // cavity frequency
        double omega_m = 0.0; // mechanical frequency
        double g0 = 0.0;      // radiation-pressure coupling
        double g_ck = 0.0;    // cross-Kerr coupling, >= 0
        double kappa = 0.0;   // cavity amplitude decay
        double gamma = 0.0;   // mechanical amplitude decay
    };

    explicit SystemParams(const Values& v);

    double omega_a() const noexcept { return v_.omega_a; }
    double omega_m() const noexcept { return v_.omega_m; }
    double g0() const noexcept { return v_.g0; }
    double g_ck() const noexcept { return v_.g_ck; }
    double kappa() const noexcept { return v_.kappa; }
    double gamma() const noexcept { return v_.gamma; }
    const Values& values() const noexcept { return v_; }

    bool resolved_sideband() const noexcept { return v_.omega_m > v_.kappa; }

    SystemParams with_g_ck(double g_ck) const;

private:
    Values v_;
};

// Control/probe drive in the frame rotating at the control frequency.
class DriveParams {
public:
    struct Values {
        double delta_a = 0.0; // omega_a - omega_c
        double eps_c = 0.0;   // control Rabi amplitude
        double eps_p = 0.0;   // probe Rabi amplitude
        double delta_p = 0.0; // omega_p - omega_c
    };

    explicit DriveParams(const Values& v);

    double delta_a() const noexcept { return v_.delta_a; }
    double eps_c() const noexcept { return v_.eps_c; }
    double eps_p() const noexcept { return v_.eps_p; }
    double delta_p() const noexcept { return v_.delta_p; }
    const Values& values() const noexcept { return v_; }

    // The probe is intended to be a small perturbation of the control.
    bool weak_probe() const noexcept { return v_.eps_p <= 0.1 * v_.eps_c; }

    DriveParams with_delta_p(double delta_p) const;
    DriveParams with_eps_c(double eps_c) const;
    DriveParams with_eps_p(double eps_p) const;

private:
    Values v_;
};

// sqrt(2 kappa P / (hbar omega)), the Rabi amplitude of a drive of power P.
double rabi_from_power(double power, double kappa, double omega_field);

// Bose-Einstein occupation of the mechanical bath.
double thermal_occupancy(double omega_m, double temperature);

} // namespace optokerr
