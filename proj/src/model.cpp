#include "optokerr/model.hpp"

#include "optokerr/error.hpp"

#include <cmath>
#include <string>

namespace optokerr {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw DomainError(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (!(v > 0.0))
        throw DomainError(std::string(name) + " must be > 0");
}

void require_nonnegative(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0)
        throw DomainError(std::string(name) + " must be >= 0");
}

} // namespace

SystemParams::SystemParams(const Values& v) : v_(v) {
    require_positive(v.omega_a, "omega_a");
    require_positive(v.omega_m, "omega_m");
    require_nonnegative(v.g0, "g0");
    require_nonnegative(v.g_ck, "g_ck");
    require_positive(v.kappa, "kappa");
    require_positive(v.gamma, "gamma");
}

SystemParams SystemParams::with_g_ck(double g_ck) const {
    Values v = v_;
    v.g_ck = g_ck;
    return SystemParams(v);
}

DriveParams::DriveParams(const Values& v) : v_(v) {
    require_finite(v.delta_a, "delta_a");
    require_nonnegative(v.eps_c, "eps_c");
    require_nonnegative(v.eps_p, "eps_p");
    require_finite(v.delta_p, "delta_p");
}

DriveParams DriveParams::with_delta_p(double delta_p) const {
    Values v = v_;
    v.delta_p = delta_p;
    return DriveParams(v);
}

DriveParams DriveParams::with_eps_c(double eps_c) const {
    Values v = v_;
    v.eps_c = eps_c;
    return DriveParams(v);
}

DriveParams DriveParams::with_eps_p(double eps_p) const {
    Values v = v_;
    v.eps_p = eps_p;
    return DriveParams(v);
}

double rabi_from_power(double power, double kappa, double omega_field) {
    require_nonnegative(power, "power");
    require_positive(kappa, "kappa");
    require_positive(omega_field, "omega_field");
    return std::sqrt(2.0 * kappa * power / (constants::hbar * omega_field));
}

double thermal_occupancy(double omega_m, double temperature) {
    require_positive(omega_m, "omega_m");
    require_nonnegative(temperature, "temperature");
    if (temperature == 0.0)
        return 0.0;
    const double ratio = constants::hbar * omega_m / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(ratio);
}

} // namespace optokerr
