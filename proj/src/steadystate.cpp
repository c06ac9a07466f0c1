#include "optokerr/steadystate.hpp"

#include "optokerr/error.hpp"
#include "optokerr/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace optokerr {

namespace {

constexpr double kDeflationThreshold = 1e-14;
constexpr double kRealFilter = 1e-8;
constexpr double kMarginalSeparation = 1e-6;
constexpr double kRootResidualTolerance = 1e-9;

void require_finite_inputs(const QuinticInputs& in) {
    const double vals[] = {in.omega_m, in.g0, in.g_ck, in.kappa, in.gamma, in.delta_a, in.eps_c};
    for (double v : vals)
        if (!std::isfinite(v))
            throw DomainError("steady-state inputs must be finite");
    if (!(in.omega_m > 0.0) || !(in.kappa > 0.0) || !(in.gamma > 0.0))
        throw DomainError("omega_m, kappa and gamma must be > 0");
    if (in.eps_c < 0.0)
        throw DomainError("eps_c must be >= 0");
}

QuinticInputs inputs_of(const SystemParams& sys, double delta_a, double eps_c) {
    return {sys.omega_m(), sys.g0(), sys.g_ck(), sys.kappa(), sys.gamma(), delta_a, eps_c};
}

std::span<const double> active_span(const QuinticCoefficients& c) {
    return {c.scaled.data(), static_cast<std::size_t>(c.degree) + 1};
}

} // namespace

double QuinticCoefficients::physical(int i) const {
    return value_scale * scaled.at(static_cast<std::size_t>(i)) / std::pow(x_unit, i);
}

std::array<double, 6> QuinticCoefficients::physical_all() const {
    std::array<double, 6> a{};
    for (int i = 0; i < 6; ++i)
        a[static_cast<std::size_t>(i)] = physical(i);
    return a;
}

double QuinticCoefficients::evaluate_scaled(double u) const {
    return poly::evaluate(scaled, u);
}

double QuinticCoefficients::evaluate(double x) const {
    return value_scale * evaluate_scaled(x / x_unit);
}

double QuinticCoefficients::relative_residual(double x) const {
    return poly::relative_residual(scaled, x / x_unit);
}

QuinticCoefficients quintic_coefficients(const QuinticInputs& in) {
    require_finite_inputs(in);
    const double w = in.omega_m;
    const double k = in.kappa / w;
    const double gm = in.gamma / w;
    const double d = in.delta_a / w;
    const double g0 = in.g0 / w;
    const double gck = in.g_ck / w;
    const double e = in.eps_c / w;

    QuinticCoefficients out;
    if (in.g_ck != 0.0)
        out.x_unit = w / std::abs(in.g_ck);
    else if (in.eps_c > 0.0)
        out.x_unit = (in.eps_c * in.eps_c) / (in.kappa * in.kappa);
    else
        out.x_unit = 1.0;
    const double X = out.x_unit;
    out.value_scale = std::pow(w, 6);

    using poly::Coefficients;
    const Coefficients omega{1.0, -gck * X};                // Omega_m / omega_m
    const Coefficients denom = poly::add(Coefficients{gm * gm}, poly::multiply(omega, omega));
    // Delta(u) * denom(u)
    const Coefficients shift{0.0, 2.0 * g0 * g0 * X, -g0 * g0 * gck * X * X};
    const Coefficients detuned = poly::add(poly::scale(denom, d), poly::scale(shift, -1.0));

    const Coefficients denom2 = poly::multiply(denom, denom);
    const Coefficients bracket =
        poly::add(poly::scale(denom2, k * k), poly::multiply(detuned, detuned));
    const Coefficients p = poly::add(poly::multiply(Coefficients{0.0, X}, bracket),
                                     poly::scale(denom2, -e * e));

    for (std::size_t i = 0; i < out.scaled.size() && i < p.size(); ++i)
        out.scaled[i] = p[i];

    double largest = 0.0;
    for (double c : out.scaled)
        largest = std::max(largest, std::abs(c));
    out.degree = 5;
    while (out.degree > 0 && std::abs(out.scaled[static_cast<std::size_t>(out.degree)]) < kDeflationThreshold * largest)
        --out.degree;
    for (std::size_t i = static_cast<std::size_t>(out.degree) + 1; i < out.scaled.size(); ++i)
        out.scaled[i] = 0.0;
    return out;
}

QuinticCoefficients quintic_coefficients(const SystemParams& sys, double delta_a, double eps_c) {
    return quintic_coefficients(inputs_of(sys, delta_a, eps_c));
}

std::vector<PhotonRoot> steady_photon_roots(const SystemParams& sys, double delta_a, double eps_c) {
    const QuinticCoefficients coeffs = quintic_coefficients(sys, delta_a, eps_c);
    if (eps_c == 0.0)
        return {PhotonRoot{0.0, 0.0, false}};

    const auto p = active_span(coeffs);
    std::vector<PhotonRoot> roots;
    for (const auto& z : poly::companion_roots(p)) {
        if (std::abs(z.imag()) >= kRealFilter * std::max(1.0, std::abs(z.real())))
            continue;
        const double u = poly::newton_polish(p, z.real());
        if (!(u > 0.0))
            continue;
        const double res = poly::relative_residual(p, u);
        if (res > kRootResidualTolerance) {
            std::ostringstream msg;
            msg << "root u=" << u << " failed residual check (" << res << ")";
            throw RootFindingError(msg.str(), std::vector<double>(p.begin(), p.end()));
        }
        roots.push_back({u * coeffs.x_unit, res, false});
    }
    std::sort(roots.begin(), roots.end(), [](const PhotonRoot& a, const PhotonRoot& b) { return a.x < b.x; });

    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        const double a = roots[i].x;
        const double b = roots[i + 1].x;
        if (std::abs(b - a) <= kMarginalSeparation * std::max(a, b)) {
            roots[i].marginal = true;
            roots[i + 1].marginal = true;
        }
    }
    // An even count means a tangent pair slipped through the real filter.
    if (!roots.empty() && roots.size() % 2 == 0) {
        std::size_t closest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
            const double sep = (roots[i + 1].x - roots[i].x) / roots[i + 1].x;
            if (sep < best) {
                best = sep;
                closest = i;
            }
        }
        roots[closest].marginal = true;
        roots[closest + 1].marginal = true;
    }
    return roots;
}

std::vector<double> steady_photon_numbers(const SystemParams& sys, double delta_a, double eps_c) {
    std::vector<double> xs;
    for (const auto& r : steady_photon_roots(sys, delta_a, eps_c))
        xs.push_back(r.x);
    return xs;
}

double phonon_of_photon(double x, const SystemParams& sys) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("photon number must be finite and >= 0");
    const double omega = sys.omega_m() - sys.g_ck() * x;
    return sys.g0() * sys.g0() * x * x / (sys.gamma() * sys.gamma() + omega * omega);
}

double effective_detuning(double x, const SystemParams& sys, double delta_a) {
    const double omega = sys.omega_m() - sys.g_ck() * x;
    const double denom = sys.gamma() * sys.gamma() + omega * omega;
    return delta_a - sys.g0() * sys.g0() * x * (sys.g_ck() * x + 2.0 * omega) / denom;
}

double photon_equation_residual(double x, const SystemParams& sys, double delta_a, double eps_c) {
    const double delta = effective_detuning(x, sys, delta_a);
    const double lhs = x * (sys.kappa() * sys.kappa() + delta * delta);
    const double rhs = eps_c * eps_c;
    const double ref = std::max(lhs, rhs);
    if (ref == 0.0)
        return 0.0;
    return std::abs(lhs - rhs) / ref;
}

SteadyState steady_state_from_photon(double x, const SystemParams& sys, double delta_a, double eps_c) {
    if (!std::isfinite(x) || x < 0.0)
        throw DomainError("photon number must be finite and >= 0");
    if (!std::isfinite(delta_a) || !std::isfinite(eps_c) || eps_c < 0.0)
        throw DomainError("drive parameters must be finite with eps_c >= 0");
    // The polynomial form is judged term by term and so stays meaningful near
    // Omega_m = 0, where the rational form loses digits to cancellation.
    const double res = quintic_coefficients(sys, delta_a, eps_c).relative_residual(x);
    if (res > kSteadyResidualTolerance) {
        std::ostringstream msg;
        msg << "photon number " << x << " is not a steady state (residual " << res << ")";
        throw RejectedRootError(msg.str());
    }

    const complex i{0.0, 1.0};
    SteadyState ss;
    ss.n_photon = x;
    ss.Omega_m = sys.omega_m() - sys.g_ck() * x;
    const complex mech{sys.gamma(), ss.Omega_m};
    ss.B0 = i * sys.g0() * x / mech;
    ss.n_phonon = std::norm(ss.B0);
    ss.Delta = delta_a - sys.g_ck() * ss.n_phonon -
               2.0 * sys.g0() * sys.g0() * x * ss.Omega_m /
                   (sys.gamma() * sys.gamma() + ss.Omega_m * ss.Omega_m);
    ss.A0 = eps_c / complex{sys.kappa(), ss.Delta};
    ss.g = sys.g0() + sys.g_ck() * ss.B0;
    ss.G = sys.g0() * (1.0 + i * sys.g_ck() * x / mech);
    return ss;
}

DescartesResult descartes_check(const QuinticCoefficients& coeffs) {
    for (double c : coeffs.scaled)
        if (!std::isfinite(c))
            throw DomainError("coefficients must be finite");
    DescartesResult out;
    int previous = 0;
    for (int i = coeffs.degree; i >= 0; --i) {
        const double c = coeffs.scaled[static_cast<std::size_t>(i)];
        const int sign = (c > 0.0) - (c < 0.0);
        out.signs.push_back(sign > 0 ? '+' : sign < 0 ? '-' : '0');
        if (sign == 0)
            continue;
        if (previous != 0 && sign != previous)
            ++out.alternations;
        previous = sign;
    }
    return out;
}

} // namespace optokerr
