#include "optokerr/response.hpp"

#include "optokerr/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace optokerr {

namespace {

constexpr complex I{0.0, 1.0};
constexpr double kPivotFloor = 1e-14;
constexpr double kGolden = 0.6180339887498949;

// |sum of terms| / sum |terms|, zero when every term vanishes.
double relation_residual(std::initializer_list<complex> terms) {
    complex total{0.0, 0.0};
    double scale = 0.0;
    for (const auto& t : terms) {
        total += t;
        scale += std::abs(t);
    }
    return scale == 0.0 ? 0.0 : std::abs(total) / scale;
}

void require_sorted_finite(std::span<const double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw DomainError("probe grid must be finite");
        if (i > 0 && grid[i] < grid[i - 1])
            throw DomainError("probe grid must be sorted ascending");
    }
}

} // namespace

SidebandAmplitudes linear_response(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive,
                                   ResponseOptions opts) {
    const double kappa = sys.kappa();
    const double gamma = sys.gamma();
    const double dp = drive.delta_p();
    const double ep = drive.eps_p();
    const complex A = ss.A0;
    const complex Ac = std::conj(ss.A0);
    const complex g = ss.g;
    const complex gc = std::conj(ss.g);

    SidebandAmplitudes out;
    out.Delta_plus = ss.Delta + dp;
    out.Delta_minus = ss.Delta - dp;
    out.omega_plus = ss.Omega_m + dp;
    out.omega_minus = ss.Omega_m - dp;

    // Unknowns (A_+, A_-^*, B_+, B_-^*); rows 2 and 4 are the conjugated
    // A_- and B_- relations.
    Eigen::Matrix4cd M;
    M << complex{kappa, out.Delta_minus}, 0.0, -I * A * gc, -I * A * g,
         0.0, complex{kappa, -out.Delta_plus}, I * Ac * gc, I * Ac * g,
         -I * g * Ac, -I * g * A, complex{gamma, out.omega_minus}, 0.0,
         I * gc * Ac, I * gc * A, 0.0, complex{gamma, -out.omega_plus};
    Eigen::Vector4cd rhs;
    rhs << ep, (opts.aminus_probe_term ? ep : 0.0), 0.0, 0.0;

    Eigen::FullPivLU<Eigen::Matrix4cd> lu(M);
    const auto& packed = lu.matrixLU();
    const double lead = std::abs(packed(0, 0));
    for (int k = 0; k < 4; ++k) {
        if (!(std::abs(packed(k, k)) > kPivotFloor * lead)) {
            std::ostringstream msg;
            msg << "sideband system is singular: pivot " << k << " vanishes (|u_kk| = " << std::abs(packed(k, k))
                << ", delta_p = " << dp << ")";
            throw SingularSystemError(msg.str(), static_cast<std::size_t>(k));
        }
    }
    const Eigen::Vector4cd v = lu.solve(rhs);
    out.A_plus = v(0);
    out.A_minus = std::conj(v(1));
    out.B_plus = v(2);
    out.B_minus = std::conj(v(3));
    out.residual = sideband_residual(out, ss, sys, drive, opts);
    return out;
}

double sideband_residual(const SidebandAmplitudes& a, const SteadyState& ss, const SystemParams& sys,
                         const DriveParams& drive, ResponseOptions opts) {
    const double kappa = sys.kappa();
    const double gamma = sys.gamma();
    const double ep = drive.eps_p();
    const double ep_minus = opts.aminus_probe_term ? ep : 0.0;
    const complex A = ss.A0;
    const complex Ac = std::conj(ss.A0);
    const complex g = ss.g;
    const complex gc = std::conj(ss.g);

    const double r1 = relation_residual({a.A_plus * complex{kappa, a.Delta_minus}, -I * gc * a.B_plus * A,
                                         -I * g * std::conj(a.B_minus) * A, complex{-ep, 0.0}});
    const double r2 = relation_residual({a.A_minus * complex{kappa, a.Delta_plus}, -I * g * std::conj(a.B_plus) * A,
                                         -I * gc * a.B_minus * A, complex{-ep_minus, 0.0}});
    const double r3 = relation_residual({a.B_plus * complex{gamma, a.omega_minus}, -I * g * Ac * a.A_plus,
                                         -I * g * A * std::conj(a.A_minus)});
    const double r4 = relation_residual({a.B_minus * complex{gamma, a.omega_plus}, -I * g * A * std::conj(a.A_plus),
                                         -I * g * Ac * a.A_minus});
    return std::max({r1, r2, r3, r4});
}

complex closed_form_aplus(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive) {
    const double kappa = sys.kappa();
    const double gamma = sys.gamma();
    const double dp = drive.delta_p();
    const double Dp = ss.Delta + dp;
    const double Dm = ss.Delta - dp;
    const double wp = ss.Omega_m + dp;
    const double wm = ss.Omega_m - dp;
    const complex cav_minus{kappa, Dm};
    const complex s = complex{gamma, wm} * complex{gamma, -wp} * cav_minus * complex{kappa, -Dp};
    const double coupling = std::norm(ss.g) * std::norm(ss.A0);
    const complex num = s / cav_minus + I * coupling * (wp + wm);
    const complex den = s - coupling * (wp + wm) * (Dp + Dm);
    return num / den * drive.eps_p();
}

OutputAmplitudes output_amplitudes(const SteadyState& ss, const SidebandAmplitudes& amps, const DriveParams& drive,
                                   double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw DomainError("kappa must be > 0");
    const double root = std::sqrt(2.0 * kappa);
    return {root * ss.A0 - drive.eps_c() / root, root * amps.A_plus - drive.eps_p() / root, root * amps.A_minus};
}

complex epsilon_T(const SteadyState& ss, const SystemParams& sys, const DriveParams& drive, ResponseOptions opts) {
    const DriveParams probe = drive.eps_p() > 0.0 ? drive : drive.with_eps_p(1.0);
    const SidebandAmplitudes a = linear_response(ss, sys, probe, opts);
    return 2.0 * sys.kappa() * a.A_plus / probe.eps_p();
}

ProbeResponse::ProbeResponse(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss,
                             ResponseOptions opts)
    : sys_(sys), drive_(drive.eps_p() > 0.0 ? drive : drive.with_eps_p(1.0)), ss_(ss), opts_(opts) {}

DriveParams ProbeResponse::drive_at(double delta_p) const {
    return drive_.with_delta_p(sys_.omega_m() + delta_p);
}

SidebandAmplitudes ProbeResponse::amplitudes(double delta_p) const {
    return linear_response(ss_, sys_, drive_at(delta_p), opts_);
}

complex ProbeResponse::eps_T(double delta_p) const {
    return epsilon_T(ss_, sys_, drive_at(delta_p), opts_);
}

complex ProbeResponse::closed_form_eps_T(double delta_p) const {
    const DriveParams d = drive_at(delta_p);
    return 2.0 * sys_.kappa() * closed_form_aplus(ss_, sys_, d) / d.eps_p();
}

OperatingPoint select_branch(const SystemParams& sys, const DriveParams& drive, BranchSelect branch) {
    OperatingPoint op;
    op.roots = steady_photon_roots(sys, drive.delta_a(), drive.eps_c());

    std::vector<StabilityReport> reports;
    reports.reserve(op.roots.size());
    for (const auto& r : op.roots)
        reports.push_back(classify(steady_state_from_photon(r.x, sys, drive.delta_a(), drive.eps_c()), sys));

    auto describe = [&]() {
        std::ostringstream s;
        s << "available branches:";
        for (std::size_t k = 0; k < op.roots.size(); ++k)
            s << " [" << k << "] x=" << op.roots[k].x << " (" << to_string(reports[k].verdict) << ")";
        return s.str();
    };

    std::optional<std::size_t> chosen = branch.index;
    if (!chosen) {
        for (std::size_t k = 0; k < reports.size(); ++k) {
            if (reports[k].verdict == Verdict::Stable) {
                chosen = k;
                break;
            }
        }
        if (!chosen)
            throw NotFoundError("no stable steady state; " + describe());
    }
    if (*chosen >= op.roots.size())
        throw NotFoundError("branch " + std::to_string(*chosen) + " does not exist; " + describe());
    if (reports[*chosen].verdict != Verdict::Stable)
        throw NotFoundError("branch " + std::to_string(*chosen) + " is not stable; " + describe());

    op.index = *chosen;
    op.state = steady_state_from_photon(op.roots[op.index].x, sys, drive.delta_a(), drive.eps_c());
    op.stability = reports[op.index];
    return op;
}

ResponseSpectrum absorption_spectrum(const SystemParams& sys, const DriveParams& drive, BranchSelect branch,
                                     std::span<const double> grid, ResponseOptions opts) {
    require_sorted_finite(grid);
    ResponseSpectrum out;
    out.operating_point = select_branch(sys, drive, branch);
    const ProbeResponse response(sys, drive, out.operating_point.state, opts);

    out.points.reserve(grid.size());
    ConsistencyReport& c = out.consistency;
    for (double dp : grid) {
        const SidebandAmplitudes amps = response.amplitudes(dp);
        const complex eps = 2.0 * sys.kappa() * amps.A_plus / (drive.eps_p() > 0.0 ? drive.eps_p() : 1.0);
        out.points.push_back({dp / sys.omega_m(), eps});

        const complex closed = response.closed_form_eps_T(dp);
        const double diff = std::abs(closed - eps) / std::max(std::abs(eps), std::numeric_limits<double>::min());
        if (c.points == 0 || diff > c.max_relative_difference) {
            c.max_relative_difference = diff;
            c.worst_delta_p_reduced = dp / sys.omega_m();
        }
        c.max_residual = std::max(c.max_residual, amps.residual);
        ++c.points;
    }
    c.agrees = c.max_relative_difference <= c.tolerance;
    return out;
}

double zero_absorption_point(const ProbeResponse& response, ZeroScanOptions scan) {
    if (scan.points < 2 || !(scan.half_window > 0.0) || !(scan.tolerance > 0.0))
        throw DomainError("zero scan needs >= 2 points, a positive window and tolerance");
    const double wm = response.system().omega_m();
    const double lo = -scan.half_window * wm;
    const double hi = scan.half_window * wm;
    const double tol = scan.tolerance * wm;

    std::vector<double> xs(scan.points);
    std::vector<double> vs(scan.points);
    for (std::size_t k = 0; k < scan.points; ++k) {
        xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(scan.points - 1);
        vs[k] = response.absorption(xs[k]);
    }

    std::optional<double> best;
    for (std::size_t k = 0; k + 1 < scan.points; ++k) {
        double a = xs[k];
        double b = xs[k + 1];
        double fa = vs[k];
        const double fb = vs[k + 1];
        double root;
        if (fa == 0.0) {
            root = a;
        } else if (fb == 0.0) {
            root = b;
        } else if ((fa < 0.0) != (fb < 0.0)) {
            while (b - a > tol) {
                const double mid = 0.5 * (a + b);
                const double fm = response.absorption(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            root = 0.5 * (a + b);
        } else {
            continue;
        }
        if (!best || std::abs(root) < std::abs(*best))
            best = root;
    }
    if (!best) {
        const auto [mn, mx] = std::minmax_element(vs.begin(), vs.end());
        std::ostringstream msg;
        msg << "Re(eps_T) has no sign change in [" << -scan.half_window << ", " << scan.half_window
            << "] omega_m over " << scan.points << " points; min " << *mn << " at "
            << xs[static_cast<std::size_t>(mn - vs.begin())] / wm << ", max " << *mx << " at "
            << xs[static_cast<std::size_t>(mx - vs.begin())] / wm;
        throw NotFoundError(msg.str());
    }
    return *best;
}

double zero_absorption_point(const SystemParams& sys, const DriveParams& drive, BranchSelect branch,
                             ResponseOptions opts, ZeroScanOptions scan) {
    const OperatingPoint op = select_branch(sys, drive, branch);
    return zero_absorption_point(ProbeResponse(sys, drive, op.state, opts), scan);
}

std::vector<AbsorptionPeak> absorption_peaks(const ProbeResponse& response, std::span<const double> grid) {
    require_sorted_finite(grid);
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = response.absorption(grid[k]);
    const double tol = 1e-12 * response.system().omega_m();

    auto golden_max = [&](double a, double b) {
        double c = b - kGolden * (b - a);
        double d = a + kGolden * (b - a);
        double fc = response.absorption(c);
        double fd = response.absorption(d);
        while (b - a > tol) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kGolden * (b - a);
                fc = response.absorption(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kGolden * (b - a);
                fd = response.absorption(d);
            }
        }
        return 0.5 * (a + b);
    };

    // Crossing of level between an inside point (above) and an outside point (below).
    auto crossing = [&](double inside, double outside, double level) {
        while (std::abs(outside - inside) > tol) {
            const double mid = 0.5 * (inside + outside);
            if (response.absorption(mid) > level)
                inside = mid;
            else
                outside = mid;
        }
        return 0.5 * (inside + outside);
    };

    std::vector<AbsorptionPeak> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(v[k] > v[k - 1] && v[k] >= v[k + 1]))
            continue;
        AbsorptionPeak p;
        p.center = golden_max(grid[k - 1], grid[k + 1]);
        p.height = std::max(response.absorption(p.center), v[k]);
        const double level = 0.5 * p.height;

        std::optional<double> left;
        for (std::size_t j = k; j-- > 0;) {
            if (v[j] <= level) {
                left = crossing(j + 1 == k ? p.center : grid[j + 1], grid[j], level);
                break;
            }
        }
        std::optional<double> right;
        for (std::size_t j = k + 1; j < n; ++j) {
            if (v[j] <= level) {
                right = crossing(j - 1 == k ? p.center : grid[j - 1], grid[j], level);
                break;
            }
        }
        p.bounded = left.has_value() && right.has_value();
        p.left = left.value_or(grid.front());
        p.right = right.value_or(grid.back());
        p.width = p.right - p.left;
        peaks.push_back(p);
    }
    return peaks;
}

} // namespace optokerr
