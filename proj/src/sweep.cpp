#include "optokerr/sweep.hpp"

#include "optokerr/error.hpp"
#include "optokerr/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace optokerr {

namespace {

struct Sample {
    double power = 0.0;
    std::vector<double> x;
    std::vector<Verdict> verdict;
};

Sample evaluate(const SystemParams& sys, double delta_a, double omega_c, double power) {
    const double eps = rabi_from_power(power, sys.kappa(), omega_c);
    Sample s;
    s.power = power;
    for (const auto& r : steady_photon_roots(sys, delta_a, eps)) {
        s.x.push_back(r.x);
        s.verdict.push_back(classify(steady_state_from_photon(r.x, sys, delta_a, eps), sys).verdict);
    }
    return s;
}

double relative_distance(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

struct Matching {
    std::vector<std::optional<std::size_t>> forward;  // root of `from` -> root of `to`
    std::vector<std::optional<std::size_t>> backward; // root of `to` -> root of `from`
    double worst = 0.0;
};

// Greedy bipartite matching on relative distance. Symmetric in its arguments,
// so linking does not depend on the sweep direction.
Matching greedy_match(const std::vector<double>& from, const std::vector<double>& to) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < from.size(); ++i)
        for (std::size_t j = 0; j < to.size(); ++j)
            pairs.emplace_back(relative_distance(from[i], to[j]), i, j);
    std::sort(pairs.begin(), pairs.end());

    Matching m;
    m.forward.resize(from.size());
    m.backward.resize(to.size());
    for (const auto& [d, i, j] : pairs) {
        if (m.forward[i] || m.backward[j])
            continue;
        m.forward[i] = j;
        m.backward[j] = i;
        m.worst = std::max(m.worst, d);
    }
    return m;
}

void require_monotone(std::span<const double> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw DomainError(std::string(what) + " must be finite");
    if (v.size() < 2)
        return;
    const bool up = v[1] > v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1]))
            throw DomainError(std::string(what) + " must be strictly monotone");
}

} // namespace

std::vector<PhononPhotonRow> phonon_photon_curve(const SystemParams& sys, std::span<const double> x_grid) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!std::isfinite(x_grid[i]) || x_grid[i] < 0.0)
            throw DomainError("photon grid must be finite and non-negative");
        if (i > 0 && x_grid[i] < x_grid[i - 1])
            throw DomainError("photon grid must be sorted ascending");
    }
    const SystemParams plain = sys.with_g_ck(0.0);
    std::vector<PhononPhotonRow> rows;
    rows.reserve(x_grid.size());
    for (double x : x_grid)
        rows.push_back({x, phonon_of_photon(x, plain), phonon_of_photon(x, sys)});
    return rows;
}

PowerSweep power_sweep(const SystemParams& sys, double delta_a, std::span<const double> powers, double omega_c,
                       SweepOptions opts) {
    require_monotone(powers, "powers");
    if (!std::isfinite(delta_a))
        throw DomainError("delta_a must be finite");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c))
        throw DomainError("omega_c must be finite and > 0");
    if (!(opts.max_jump > 0.0) || !(opts.fold_tolerance > 0.0))
        throw DomainError("sweep tolerances must be > 0");

    std::vector<Sample> seq;
    for (double p : powers)
        if (p > 0.0)
            seq.push_back(evaluate(sys, delta_a, omega_c, p));

    // Bisect every interval across which the root count changes or a link
    // jumps, until it is narrower than the fold tolerance.
    for (std::size_t k = 0; k + 1 < seq.size();) {
        const Sample& a = seq[k];
        const Sample& b = seq[k + 1];
        const bool narrow = std::abs(b.power - a.power) <= opts.fold_tolerance * std::max(a.power, b.power);
        const bool unsettled =
            a.x.size() != b.x.size() || greedy_match(a.x, b.x).worst > opts.max_jump;
        if (unsettled && !narrow) {
            const double mid = 0.5 * (a.power + b.power);
            seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(k + 1), evaluate(sys, delta_a, omega_c, mid));
        } else {
            ++k;
        }
    }

    PowerSweep out;
    for (const auto& s : seq) {
        out.powers.push_back(s.power);
        out.root_counts.push_back(s.x.size());
    }
    if (seq.empty())
        return out;

    std::vector<std::size_t> owner; // branch index per root of the current sample
    auto open = [&](const Sample& s, std::size_t j) {
        SweepBranch br;
        br.id = static_cast<int>(out.branches.size());
        br.stability = s.verdict[j];
        br.sweep_values.push_back(s.power);
        br.x.push_back(s.x[j]);
        out.branches.push_back(std::move(br));
        return out.branches.size() - 1;
    };
    for (std::size_t j = 0; j < seq.front().x.size(); ++j)
        owner.push_back(open(seq.front(), j));

    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        const Sample& a = seq[k];
        const Sample& b = seq[k + 1];
        const double mid = 0.5 * (a.power + b.power);
        const Matching m = greedy_match(a.x, b.x);

        if (a.x.size() != b.x.size()) {
            const bool up = b.power > a.power;
            const Sample& lo = up ? a : b;
            const Sample& hi = up ? b : a;
            out.folds.push_back({mid, lo.power, hi.power, lo.x.size(), hi.x.size()});
        }
        for (std::size_t i = 0; i < a.x.size(); ++i)
            if (!m.forward[i])
                out.branches[owner[i]].fold_points.push_back(mid);

        std::vector<std::size_t> next(b.x.size());
        for (std::size_t j = 0; j < b.x.size(); ++j) {
            if (!m.backward[j]) {
                next[j] = open(b, j);
                out.branches[next[j]].fold_points.push_back(mid);
                continue;
            }
            SweepBranch& br = out.branches[owner[*m.backward[j]]];
            if (br.stability != b.verdict[j]) {
                out.stability_changes.push_back(mid);
                next[j] = open(b, j);
                continue;
            }
            br.sweep_values.push_back(b.power);
            br.x.push_back(b.x[j]);
            next[j] = owner[*m.backward[j]];
        }
        owner = std::move(next);
    }

    std::sort(out.folds.begin(), out.folds.end(),
              [](const FoldPoint& l, const FoldPoint& r) { return l.power < r.power; });
    std::sort(out.stability_changes.begin(), out.stability_changes.end());
    return out;
}

std::optional<FoldPoint> first_fold(const PowerSweep& sweep) {
    for (const auto& f : sweep.folds)
        if (f.roots_above > f.roots_below)
            return f;
    return std::nullopt;
}

std::vector<double> power_grid(double max_power, std::size_t n) {
    if (!(max_power > 0.0) || !std::isfinite(max_power) || n < 2)
        throw DomainError("power grid needs max_power > 0 and at least 2 points");
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k)
        grid[k] = max_power * static_cast<double>(k) / static_cast<double>(n - 1);
    return grid;
}

ShiftScan ck_shift_scan(const SystemParams& sys, const DriveParams& drive, std::span<const double> g_ck_values,
                        BranchSelect branch, ResponseOptions opts, ZeroScanOptions scan) {
    for (std::size_t i = 0; i < g_ck_values.size(); ++i) {
        if (!std::isfinite(g_ck_values[i]))
            throw DomainError("g_ck values must be finite");
        if (i > 0 && g_ck_values[i] < g_ck_values[i - 1])
            throw DomainError("g_ck values must be sorted ascending");
    }
    ShiftScan out;
    for (double g : g_ck_values)
        out.rows.push_back({g, zero_absorption_point(sys.with_g_ck(g), drive, branch, opts, scan)});

    bool inc = out.rows.size() >= 2;
    bool dec = inc;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        inc = inc && out.rows[i].delta_p0 > out.rows[i - 1].delta_p0;
        dec = dec && out.rows[i].delta_p0 < out.rows[i - 1].delta_p0;
    }
    out.monotone = inc || dec;
    out.direction = inc ? 1 : dec ? -1 : 0;
    return out;
}

RobustnessReport detuning_robustness(const SystemParams& sys, std::span<const double> powers, double delta_first,
                                     double delta_second, SweepOptions opts) {
    auto born_at_first_fold = [&](const SystemParams& s, double delta, double& fold_power) {
        const double omega_c = s.omega_a() - delta;
        const PowerSweep sw = power_sweep(s, delta, powers, omega_c, opts);
        const auto f = first_fold(sw);
        if (!f) {
            std::ostringstream msg;
            msg << "no bistability for g_ck = " << s.g_ck() << " at delta_a = " << delta;
            throw NotFoundError(msg.str());
        }
        fold_power = f->power;
        const Sample lo = evaluate(s, delta, omega_c, f->lower);
        const Sample hi = evaluate(s, delta, omega_c, f->upper);
        const Matching m = greedy_match(lo.x, hi.x);
        double upper = 0.0;
        for (std::size_t j = 0; j < hi.x.size(); ++j)
            if (!m.backward[j])
                upper = std::max(upper, hi.x[j]);
        return upper;
    };

    auto entry = [&](const SystemParams& s) {
        RobustnessEntry e;
        e.g_ck = s.g_ck();
        e.x_first = born_at_first_fold(s, delta_first, e.fold_power_first);
        e.x_second = born_at_first_fold(s, delta_second, e.fold_power_second);
        e.absolute_displacement = std::abs(e.x_first - e.x_second);
        e.displacement = relative_distance(e.x_first, e.x_second);
        return e;
    };

    RobustnessReport r;
    r.plain = entry(sys.with_g_ck(0.0));
    r.ck = entry(sys);
    r.ck_more_robust = r.ck.displacement < r.plain.displacement;
    return r;
}

} // namespace optokerr
