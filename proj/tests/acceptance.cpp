// Acceptance run: one line per criterion, nonzero exit if any fails.

#include "oracle.hpp"

#include <optokerr/dynamics.hpp>
#include <optokerr/error.hpp>
#include <optokerr/response.hpp>
#include <optokerr/stability.hpp>
#include <optokerr/sweep.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace optokerr;
using oracle::Reference;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

const double kGck = 1e-3 * Reference::g0;
const double kPower = 9.6e-9;

std::vector<double> symmetric_grid(double half, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k)
        g[k] = Reference::omega_m * half * (2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0);
    g[n / 2] = 0.0;
    return g;
}

DriveParams figure_drive(double power) {
    return DriveParams({Reference::delta_a, oracle::eps_of_power(power), 0.0, 0.0});
}

std::string pattern_of(const SystemParams& sys, double delta_a, double eps) {
    std::string s;
    for (double x : steady_photon_numbers(sys, delta_a, eps)) {
        const auto v = classify(steady_state_from_photon(x, sys, delta_a, eps), sys).verdict;
        s += v == Verdict::Stable ? 'S' : v == Verdict::Unstable ? 'U' : 'M';
    }
    return s;
}

Outcome cubic_limit() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    std::size_t roots = 0, mismatched_counts = 0, not_deflated = 0;
    for (int n = 0; n < 100; ++n) {
        const auto d = oracle::random_draw(rng, false);
        const auto& s = d.sys;
        if (quintic_coefficients(s, d.delta_a, d.eps_c).degree != 3)
            ++not_deflated;
        const auto got = steady_photon_numbers(s, d.delta_a, d.eps_c);
        const auto ref = oracle::plain_cubic_roots(s.omega_m(), s.g0(), s.kappa(), s.gamma(), d.delta_a, d.eps_c);
        if (got.size() != ref.size()) {
            ++mismatched_counts;
            continue;
        }
        for (std::size_t k = 0; k < got.size(); ++k)
            worst = std::max(worst, std::abs(got[k] / static_cast<double>(ref[k]) - 1.0));
        roots += got.size();
    }
    return {mismatched_counts == 0 && not_deflated == 0 && worst < 1e-9,
            "100 draws, " + std::to_string(roots) + " roots, worst relative difference " + fmt(worst, 3) +
                ", count mismatches " + std::to_string(mismatched_counts) + ", undeflated " +
                std::to_string(not_deflated)};
}

Outcome descartes_signs() {
    std::mt19937_64 rng(102);
    int bad = 0, oracle_bad = 0;
    for (int n = 0; n < 1000; ++n) {
        const auto d = oracle::random_draw(rng, true);
        const auto& s = d.sys;
        if (descartes_check(quintic_coefficients(s, d.delta_a, d.eps_c)).signs != "+-+-+-")
            ++bad;
        const auto a = oracle::quintic_closed_form(s.omega_m(), s.g0(), s.g_ck(), s.kappa(), s.gamma(), d.delta_a,
                                                   d.eps_c);
        for (int i = 0; i < 6; ++i)
            oracle_bad += (a[i] > 0) != (i % 2 == 1);
    }
    return {bad == 0 && oracle_bad == 0, "1000 draws, sequence (-,+,-,+,-,+) ascending; library deviations " +
                                             std::to_string(bad) + ", closed-form deviations " +
                                             std::to_string(oracle_bad)};
}

Outcome stability_cross_check() {
    std::mt19937_64 rng(103);
    int compared = 0, disagreements = 0, unstable = 0, excluded = 0;
    for (int n = 0; n < 800; ++n) {
        const auto d = oracle::random_draw(rng, n % 2 == 0);
        for (double x : steady_photon_numbers(d.sys, d.delta_a, d.eps_c)) {
            const auto ss = steady_state_from_photon(x, d.sys, d.delta_a, d.eps_c);
            const auto rep = classify(ss, d.sys);
            const double re = oracle::max_real_eigenvalue(drift_matrix(ss, d.sys).m);
            if (std::abs(re) < marginal_band(d.sys)) {
                ++excluded;
                continue;
            }
            ++compared;
            disagreements += rep.rh_verdict != (re < 0);
            unstable += re > 0;
        }
    }
    return {compared >= 1000 && disagreements == 0,
            std::to_string(compared) + " states compared (" + std::to_string(unstable) + " unstable, " +
                std::to_string(excluded) + " in the marginal band), disagreements " + std::to_string(disagreements)};
}

// Root counts change only where eps^2 crosses a local extremum of
// F(x) = x [kappa^2 + Delta(x)^2], so the extrema give the window edges.
std::vector<oracle::ld> photon_curve_extrema(const SystemParams& sys, double delta_a, oracle::ld x_max) {
    auto F = [&](oracle::ld x) {
        return oracle::photon_equation(x, sys.omega_m(), sys.g0(), sys.g_ck(), sys.kappa(), sys.gamma(), delta_a, 0);
    };
    const std::size_t n = 400000;
    const oracle::ld x_min = x_max * 1e-14L;
    const oracle::ld ratio = std::pow(x_max / x_min, 1.0L / static_cast<oracle::ld>(n - 1));
    std::vector<oracle::ld> values;
    oracle::ld x0 = x_min, x1 = x0 * ratio, f0 = F(x0), f1 = F(x1);
    for (std::size_t k = 2; k < n; ++k) {
        const oracle::ld x2 = x1 * ratio, f2 = F(x2);
        if ((f1 - f0) * (f2 - f1) < 0) {
            // Golden-section refinement on [x0, x2].
            const bool is_max = f1 > f0;
            oracle::ld a = x0, b = x2;
            const oracle::ld r = (std::sqrt(5.0L) - 1) / 2;
            for (int it = 0; it < 200 && b - a > 1e-18L * b; ++it) {
                const oracle::ld c = b - r * (b - a), d = a + r * (b - a);
                const bool left = is_max ? F(c) > F(d) : F(c) < F(d);
                (left ? b : a) = left ? d : c;
            }
            values.push_back(F(0.5L * (a + b)));
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    return values;
}

// Number of solutions of F(x) = v given the extremal values of F in x order.
std::size_t crossings(const std::vector<oracle::ld>& extrema, oracle::ld v) {
    std::vector<oracle::ld> knots{0};
    knots.insert(knots.end(), extrema.begin(), extrema.end());
    knots.push_back(INFINITY);
    std::size_t c = 0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        c += (v > std::min(knots[k], knots[k + 1])) && (v < std::max(knots[k], knots[k + 1]));
    return c;
}

// Window lower edge from the pre-build oracle scan, frozen.
constexpr double kWindowLower = 4.6018283283213695e-11;
constexpr double kWindowUpper = 50e-9;

struct Window {
    bool found = false;
    double lower = 0.0;
    double upper = 0.0;
};

Window five_root_window() {
    const auto sys = oracle::reference_system(kGck);
    const double da = Reference::delta_a;
    const oracle::ld e_max = oracle::eps_of_power(50e-9);
    const auto ext = photon_curve_extrema(sys, da, e_max * e_max / (static_cast<oracle::ld>(sys.kappa()) * sys.kappa()));
    std::vector<double> edges{0.0};
    for (auto v : ext) {
        const double p = oracle::power_of_eps(static_cast<double>(std::sqrt(v)), da);
        if (p < 50e-9)
            edges.push_back(p);
    }
    edges.push_back(50e-9);
    std::sort(edges.begin(), edges.end());
    Window w;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const oracle::ld e = oracle::eps_of_power(mid, da);
        if (crossings(ext, e * e) != 5)
            continue;
        if (!w.found)
            w.lower = edges[k];
        w.found = true;
        w.upper = edges[k + 1];
    }
    return w;
}

Outcome tristability() {
    const auto w = five_root_window();
    if (!w.found)
        return {false, "oracle scan found no five-root window in (0, 50 nW]"};
    const double mid = 0.5 * (w.lower + w.upper);
    const auto sys = oracle::reference_system(kGck);
    const double eps = oracle::eps_of_power(mid);
    const auto lib = steady_photon_numbers(sys, Reference::delta_a, eps);
    const auto ref = oracle::brute_photon_roots(sys, Reference::delta_a, eps);
    double worst = lib.size() == ref.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min(lib.size(), ref.size()); ++k)
        worst = std::max(worst, std::abs(lib[k] / static_cast<double>(ref[k]) - 1.0));
    const std::string pattern = pattern_of(sys, Reference::delta_a, eps);
    std::string eig_pattern;
    for (double x : lib) {
        const auto ss = steady_state_from_photon(x, sys, Reference::delta_a, eps);
        eig_pattern += oracle::max_real_eigenvalue(drift_matrix(ss, sys).m) < 0 ? 'S' : 'U';
    }
    const bool bounds_ok = std::abs(w.lower / kWindowLower - 1.0) < 1e-9 && w.upper == kWindowUpper;
    // The library sweep must place its 3 -> 5 fold on the same edge.
    const auto sweep = power_sweep(sys, Reference::delta_a, power_grid(), Reference::omega_a - Reference::delta_a);
    double fold = 0.0;
    for (const auto& f : sweep.folds)
        if (f.roots_above == 5)
            fold = f.power;
    const bool fold_ok = std::abs(fold / w.lower - 1.0) < 1e-4;
    const bool pass = bounds_ok && fold_ok && worst < 1e-9 && pattern == "SUSUS" && eig_pattern == pattern;
    return {pass, "window (" + fmt(w.lower, 17) + ", " + fmt(w.upper) + "] W (library fold " + fmt(fold, 17) +
                      "), at " + fmt(mid) + " W: " +
                      std::to_string(lib.size()) + " roots (oracle agreement " + fmt(worst, 3) + "), pattern " +
                      pattern + " (eigen-solver " + eig_pattern + "), required SUSUS"};
}

Outcome onset_ordering() {
    const double da = Reference::delta_a;
    const auto grid = power_grid();
    const auto plain = first_fold(power_sweep(oracle::reference_system(0.0), da, grid, Reference::omega_a - da));
    const auto ck = first_fold(power_sweep(oracle::reference_system(kGck), da, grid, Reference::omega_a - da));
    if (!plain || !ck)
        return {false, "missing fold"};
    const auto e2 = oracle::plain_fold_eps2(Reference::omega_m, Reference::g0, Reference::kappa, Reference::gamma, da);
    const double analytic = oracle::power_of_eps(std::sqrt(static_cast<double>(e2)), da);
    const bool plain_ok = plain->lower <= analytic * (1 + 1e-12) && analytic <= plain->upper * (1 + 1e-12);
    return {ck->power < plain->power && plain_ok,
            "first fold with cross-Kerr " + fmt(ck->power) + " W, without " + fmt(plain->power) +
                " W (analytic " + fmt(analytic) + " W, bracketed " + (plain_ok ? "yes" : "no") + ")"};
}

Outcome dynamics_oracle() {
    const double power = 0.5 * (kWindowLower + kWindowUpper);
    const auto sys = oracle::reference_system(kGck);
    const double eps = oracle::eps_of_power(power);
    const DriveParams drive({Reference::delta_a, eps, 0.0, 0.0});
    const auto roots = steady_photon_numbers(sys, Reference::delta_a, eps);
    std::vector<Verdict> verdicts;
    double n_max = 0.0;
    for (double x : roots) {
        const auto ss = steady_state_from_photon(x, sys, Reference::delta_a, eps);
        verdicts.push_back(classify(ss, sys).verdict);
        n_max = std::max(n_max, ss.n_phonon);
    }
    const auto starts = random_initial_states(50, 2.0 * std::sqrt(roots.back()), 2.0 * std::sqrt(n_max));
    SettleOptions opts;
    opts.t_end = 8000.0 * constants::two_pi / Reference::omega_m;
    opts.integrator.max_steps = 200'000;
    int on_stable = 0, on_unstable = 0, unmatched = 0, unsettled = 0;
    for (const auto& s : starts) {
        SettleOutcome out;
        try {
            out = settle(sys, drive, s, opts);
        } catch (const Error&) {
            ++unsettled;
            continue;
        }
        if (!out.converged)
            ++unsettled;
        else if (!out.root_index)
            ++unmatched;
        else if (verdicts[*out.root_index] == Verdict::Stable)
            ++on_stable;
        else
            ++on_unstable;
    }
    const auto stable = std::count(verdicts.begin(), verdicts.end(), Verdict::Stable);
    return {on_stable == 50 && stable == 3,
            "at " + fmt(power) + " W with " + std::to_string(stable) + " stable roots of " +
                std::to_string(roots.size()) + ": settled on stable " + std::to_string(on_stable) +
                ", on unstable " + std::to_string(on_unstable) + ", off every root " + std::to_string(unmatched) +
                ", not settled within 8000 periods " + std::to_string(unsettled)};
}

struct Symmetry {
    double asymmetry = 0.0; // relative to max |Re eps_T|
    double at_zero = 0.0;
};

Symmetry omit_symmetry(bool aminus) {
    const auto sys = oracle::reference_system(0.0);
    const auto d = figure_drive(kPower);
    const auto op = select_branch(sys, d);
    const ProbeResponse r(sys, d, op.state, {aminus});
    const auto grid = symmetric_grid(0.15, 1001);
    std::vector<double> re(grid.size());
    double peak = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        re[k] = r.absorption(grid[k]);
        peak = std::max(peak, std::abs(re[k]));
    }
    Symmetry s;
    for (std::size_t k = 0; k < grid.size(); ++k)
        s.asymmetry = std::max(s.asymmetry, std::abs(re[k] - re[grid.size() - 1 - k]) / peak);
    s.at_zero = r.absorption(0.0);
    return s;
}

Outcome omit() {
    const auto on = omit_symmetry(true);
    const auto off = omit_symmetry(false);
    const bool pass = on.asymmetry <= 1e-9 && std::abs(on.at_zero) <= 1e-6;
    return {pass, "asymmetry " + fmt(on.asymmetry, 3) + " of max (limit 1e-9), Re eps_T(0) = " + fmt(on.at_zero, 3) +
                      " (limit 1e-6); without the probe term in A_-: asymmetry " + fmt(off.asymmetry, 3) +
                      ", Re eps_T(0) = " + fmt(off.at_zero, 3)};
}

// delta_p0 / omega_m for g_ck / g0 = 0, 2, ..., 10 x 1e-4, frozen from the scan-and-bisect run.
constexpr double kShift[6] = {0.00024764844449234446, -0.011101641850080352, -0.02245112011814494,
                              -0.03380079321609808,   -0.045150668333750213, -0.056500753015745461};

Outcome zero_shift() {
    std::vector<double> g;
    for (int k = 0; k <= 5; ++k)
        g.push_back(2e-4 * k * Reference::g0);
    const auto scan = ck_shift_scan(oracle::reference_system(kGck), figure_drive(kPower), g);
    double worst_frozen = 0.0;
    int brackets_broken = 0;
    const double wm = Reference::omega_m;
    for (std::size_t k = 0; k < scan.rows.size(); ++k) {
        const double z = scan.rows[k].delta_p0;
        worst_frozen = std::max(worst_frozen, std::abs(z / wm - kShift[k]));
        // Independent check: the absorption changes sign across the reported point.
        const auto sys = oracle::reference_system(g[k]);
        const auto op = select_branch(sys, figure_drive(kPower));
        const ProbeResponse r(sys, figure_drive(kPower), op.state);
        if (r.absorption(z - 2e-12 * wm) * r.absorption(z + 2e-12 * wm) > 0.0)
            ++brackets_broken;
    }
    std::string values;
    for (const auto& row : scan.rows)
        values += (values.empty() ? "" : ", ") + fmt(row.delta_p0 / wm, 8);
    return {scan.monotone && brackets_broken == 0 && worst_frozen <= 1e-11,
            "delta_p0/omega_m = {" + values + "}, monotone " + (scan.monotone ? "yes" : "no") +
                ", unbracketed " + std::to_string(brackets_broken) + ", worst frozen deviation " +
                fmt(worst_frozen, 3)};
}

// Full widths in units of omega_m, frozen.
constexpr double kLeftWidth = 0.0030830845529213466;
constexpr double kRightWidth = 0.028652330468036245;

// Width from a bisection of the half-height crossings on each side of the centre.
double oracle_width(const ProbeResponse& r, double center, double height, double reach) {
    auto f = [&](long double d) { return static_cast<long double>(r.absorption(static_cast<double>(d)) - 0.5 * height); };
    auto side = [&](double dir) {
        double step = 1e-5 * Reference::omega_m, d = center;
        while (f(d + dir * step) > 0 && std::abs(d - center) < reach)
            d += dir * step;
        return static_cast<double>(oracle::bisect(f, std::min(d, d + dir * step), std::max(d, d + dir * step)));
    };
    return side(1.0) - side(-1.0);
}

Outcome linewidths() {
    const auto sys = oracle::reference_system(kGck);
    const auto d = figure_drive(kPower);
    const ProbeResponse r(sys, d, select_branch(sys, d).state);
    const auto peaks = absorption_peaks(r, symmetric_grid(0.15, 1001));
    if (peaks.size() != 2)
        return {false, std::to_string(peaks.size()) + " peaks found, expected 2"};
    const double wm = Reference::omega_m;
    const double lw = peaks[0].width / wm, rw = peaks[1].width / wm;
    const double lo = oracle_width(r, peaks[0].center, peaks[0].height, 0.15 * wm) / wm;
    const double ro = oracle_width(r, peaks[1].center, peaks[1].height, 0.15 * wm) / wm;
    const double oracle_dev = std::max(std::abs(lo / lw - 1.0), std::abs(ro / rw - 1.0));
    const double frozen_dev = std::max(std::abs(lw / kLeftWidth - 1.0), std::abs(rw / kRightWidth - 1.0));
    return {lw < rw && oracle_dev < 1e-6 && frozen_dev < 1e-8,
            "left width " + fmt(lw) + ", right width " + fmt(rw) + " (omega_m), oracle deviation " +
                fmt(oracle_dev, 3) + ", frozen deviation " + fmt(frozen_dev, 3)};
}

Outcome response_consistency() {
    const auto sys = oracle::reference_system(kGck);
    const auto d = figure_drive(kPower);
    const auto grid = symmetric_grid(0.15, 1001);
    const auto on = absorption_spectrum(sys, d, {}, grid);
    const auto off = absorption_spectrum(sys, d, {}, grid, {false});
    const auto& c = on.consistency;
    const bool residual_ok = c.max_residual < 1e-10 && off.consistency.max_residual < 1e-10;
    std::string report_note;
    if (!c.agrees) {
        nlohmann::json j;
        j["points"] = c.points;
        j["tolerance"] = c.tolerance;
        j["max_relative_difference"] = c.max_relative_difference;
        j["worst_delta_p_over_omega_m"] = c.worst_delta_p_reduced;
        j["max_residual"] = c.max_residual;
        j["without_aminus_probe_term"] = {{"max_relative_difference", off.consistency.max_relative_difference},
                                          {"max_residual", off.consistency.max_residual},
                                          {"agrees", off.consistency.agrees}};
        std::ofstream("response_discrepancy.json") << j.dump(2) << '\n';
        report_note = ", discrepancy report written to response_discrepancy.json";
    }
    return {residual_ok && (c.agrees || !report_note.empty()),
            "closed form vs linear system: " + fmt(c.max_relative_difference, 3) + " with the probe in A_-, " +
                fmt(off.consistency.max_relative_difference, 3) + " without; residual " + fmt(c.max_residual, 3) +
                " / " + fmt(off.consistency.max_residual, 3) + report_note};
}

Outcome phonon_shape() {
    const auto sys = oracle::reference_system(kGck);
    const double x_end = 2.0 * Reference::omega_m / kGck;
    const std::size_t n = 20001;
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k)
        grid[k] = x_end * static_cast<double>(k) / static_cast<double>(n - 1);
    const auto rows = phonon_photon_curve(sys, grid);
    int plain_drops = 0, maxima = 0;
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < n; ++k) {
        plain_drops += rows[k].n_phonon_plain <= rows[k - 1].n_phonon_plain;
        if (k + 1 < n && rows[k].n_phonon_ck > rows[k - 1].n_phonon_ck && rows[k].n_phonon_ck >= rows[k + 1].n_phonon_ck) {
            ++maxima;
            argmax = k;
        }
    }
    const double target = Reference::omega_m / kGck;
    const double off = std::abs(grid[argmax] - target);
    const double allowed = 2.0 * Reference::gamma / kGck + x_end / static_cast<double>(n - 1);
    return {plain_drops == 0 && maxima == 1 && off <= allowed,
            "plain curve non-increasing steps " + std::to_string(plain_drops) + ", interior maxima " +
                std::to_string(maxima) + " at x = " + fmt(grid[argmax]) + " (omega_m/g_ck = " + fmt(target) +
                ", offset " + fmt(off, 3) + ", allowed " + fmt(allowed, 3) + ")"};
}

struct Criterion {
    int number;
    double limit_s;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, 5, cubic_limit},          {2, 2, descartes_signs},  {3, 10, stability_cross_check},
        {4, 10, tristability},        {5, 10, onset_ordering},  {6, 30, dynamics_oracle},
        {7, 3, omit},                 {8, 10, zero_shift},      {9, 5, linewidths},
        {10, 3, response_consistency}, {11, 2, phonon_shape},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = s < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d: %s [%.2f s, limit %.0f s%s] %s\n", c.number, pass ? "PASS" : "FAIL", s, c.limit_s,
                    in_time ? "" : ", over time", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
