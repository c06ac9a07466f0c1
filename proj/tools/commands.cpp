#include "commands.hpp"

#include "output.hpp"

#include <optokerr/optokerr.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <vector>

namespace optokerr::cli {

namespace {

using nlohmann::json;

int exit_code_of(optokerr_status s) {
    switch (s) {
    case OPTOKERR_OK:
        return kExitOk;
    case OPTOKERR_E_DOMAIN:
        return kExitConfig;
    case OPTOKERR_E_NOT_CONVERGED:
        return kExitNotConverged;
    default:
        return kExitSolver;
    }
}

void check(optokerr_status s, const char* what) {
    if (s == OPTOKERR_OK)
        return;
    throw CommandError(exit_code_of(s), std::string(what) + ": " + optokerr_status_name(s) + ": " +
                                            optokerr_last_error());
}

struct ModelDeleter {
    void operator()(optokerr_model* m) const { optokerr_model_destroy(m); }
};
struct SpectrumDeleter {
    void operator()(optokerr_spectrum* s) const { optokerr_spectrum_destroy(s); }
};
struct SweepDeleter {
    void operator()(optokerr_sweep* s) const { optokerr_sweep_destroy(s); }
};
struct TrajectoryDeleter {
    void operator()(optokerr_trajectory* t) const { optokerr_trajectory_destroy(t); }
};
using Model = std::unique_ptr<optokerr_model, ModelDeleter>;

optokerr_system_params system_of(const RunConfig& cfg) {
    const auto& s = cfg.system;
    return {s.omega_a, s.omega_m, s.g0, s.g_ck, s.kappa, s.gamma};
}

// Control field frequency for a given control detuning.
double control_frequency(const RunConfig& cfg, double delta_a) {
    return cfg.system.omega_a - delta_a;
}

double control_amplitude(const RunConfig& cfg) {
    if (cfg.drive.eps_c)
        return *cfg.drive.eps_c;
    if (!cfg.drive.power_w)
        return 0.0;
    double eps = 0.0;
    check(optokerr_rabi_from_power(*cfg.drive.power_w, cfg.system.kappa,
                                   control_frequency(cfg, cfg.drive.delta_a), &eps),
          "control amplitude");
    return eps;
}

Model make_model(const RunConfig& cfg, double g_ck) {
    optokerr_system_params sys = system_of(cfg);
    sys.g_ck = g_ck;
    const optokerr_drive_params drive{cfg.drive.delta_a, control_amplitude(cfg), cfg.drive.eps_p, 0.0};
    optokerr_model* m = nullptr;
    check(optokerr_model_create(&sys, &drive, &m), "model");
    return Model(m);
}

Model make_model(const RunConfig& cfg) {
    return make_model(cfg, cfg.system.g_ck);
}

std::vector<optokerr_root> all_roots(const optokerr_model* m) {
    size_t count = 0;
    optokerr_status s = optokerr_roots(m, nullptr, 0, &count);
    if (s != OPTOKERR_E_BUFFER)
        check(s, "steady states");
    std::vector<optokerr_root> roots(count);
    check(optokerr_roots(m, roots.data(), roots.size(), &count), "steady states");
    return roots;
}

const char* verdict_name(optokerr_verdict v) {
    switch (v) {
    case OPTOKERR_STABLE:
        return "stable";
    case OPTOKERR_UNSTABLE:
        return "unstable";
    default:
        return "marginal";
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 1)
        return {lo};
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

json root_json(std::size_t index, const optokerr_root& r) {
    return {{"index", index},
            {"n_photon", r.n_photon},
            {"n_phonon", r.n_phonon},
            {"delta_rad_s", r.delta},
            {"omega_eff_rad_s", r.omega_eff},
            {"a0", {r.a0.re, r.a0.im}},
            {"b0", {r.b0.re, r.b0.im}},
            {"residual", r.residual},
            {"verdict", verdict_name(r.verdict)},
            {"margin_rad_s", r.margin},
            {"routh_hurwitz_stable", r.routh_hurwitz_stable != 0},
            {"marginal_root", r.marginal_root != 0}};
}

json params_json(const RunConfig& cfg, double eps_c) {
    const auto& s = cfg.system;
    return {{"omega_a_rad_s", s.omega_a}, {"omega_m_rad_s", s.omega_m}, {"g0_rad_s", s.g0},
            {"g_ck_rad_s", s.g_ck},       {"kappa_rad_s", s.kappa},     {"gamma_rad_s", s.gamma},
            {"delta_a_rad_s", cfg.drive.delta_a}, {"eps_c_per_s", eps_c}};
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
    write_atomic(cfg.out_dir, name, j.dump(2) + "\n");
}

optokerr_response_options response_of(const RunConfig& cfg) {
    optokerr_response_options o = optokerr_response_defaults();
    if (cfg.spectrum.branch)
        o.branch = static_cast<long>(*cfg.spectrum.branch);
    o.aminus_probe_term = cfg.spectrum.aminus_probe_term ? 1 : 0;
    return o;
}

// ---- sweep modes ---------------------------------------------------------

std::vector<double> sweep_powers(const RunConfig& cfg) {
    return linspace(cfg.sweep.power_min_w, cfg.sweep.power_max_w, static_cast<std::size_t>(cfg.sweep.points));
}

int sweep_power(const RunConfig& cfg, std::ostream& out) {
    const Model model = make_model(cfg);
    const auto powers = sweep_powers(cfg);
    optokerr_sweep* raw = nullptr;
    check(optokerr_power_sweep(model.get(), powers.data(), powers.size(),
                               control_frequency(cfg, cfg.drive.delta_a), &raw),
          "power sweep");
    const std::unique_ptr<optokerr_sweep, SweepDeleter> sweep(raw);

    CsvTable table({"power_w", "branch_id", "n_photon", "stability"});
    json data = json::array();
    const std::size_t nb = optokerr_sweep_branch_count(sweep.get());
    for (std::size_t b = 0; b < nb; ++b) {
        int id = 0;
        optokerr_verdict v{};
        size_t np = 0;
        check(optokerr_sweep_branch(sweep.get(), b, &id, &v, &np), "sweep branch");
        for (size_t k = 0; k < np; ++k) {
            double p = 0.0, x = 0.0;
            check(optokerr_sweep_branch_point(sweep.get(), b, k, &p, &x), "sweep point");
            table.row({fmt(p), std::to_string(id), fmt(x), verdict_name(v)});
            data.push_back({{"power_w", p}, {"branch_id", id}, {"n_photon", x}, {"stability", verdict_name(v)}});
        }
    }

    json folds = json::array();
    json first_fold = nullptr;
    const std::size_t nf = optokerr_sweep_fold_count(sweep.get());
    for (std::size_t i = 0; i < nf; ++i) {
        optokerr_fold f{};
        check(optokerr_sweep_fold(sweep.get(), i, &f), "fold");
        json j{{"power_w", f.power},
               {"lower_w", f.lower},
               {"upper_w", f.upper},
               {"roots_below", f.roots_below},
               {"roots_above", f.roots_above}};
        if (first_fold.is_null() && f.roots_above > f.roots_below)
            first_fold = j;
        folds.push_back(j);
    }
    json changes = json::array();
    for (std::size_t i = 0; i < optokerr_sweep_stability_change_count(sweep.get()); ++i) {
        double p = 0.0;
        check(optokerr_sweep_stability_change(sweep.get(), i, &p), "stability change");
        changes.push_back(p);
    }
    std::size_t max_roots = 0;
    for (std::size_t i = 0; i < optokerr_sweep_point_count(sweep.get()); ++i) {
        double p = 0.0;
        size_t r = 0;
        check(optokerr_sweep_point(sweep.get(), i, &p, &r), "sweep point");
        max_roots = std::max<std::size_t>(max_roots, r);
    }

    json report{{"mode", "power"},
                {"parameters", params_json(cfg, 0.0)},
                {"branch_count", nb},
                {"max_root_count", max_roots},
                {"folds", folds},
                {"first_fold", first_fold},
                {"stability_changes_w", changes}};
    if (cfg.format == OutputFormat::Json)
        report["branches"] = data;
    else
        write_atomic(cfg.out_dir, "branches.csv", table.str());
    write_json(cfg, "sweep.json", report);

    out << "branches: " << nb << "  max roots: " << max_roots << "  folds: " << nf << "\n";
    if (!first_fold.is_null())
        out << "first fold: " << fmt(first_fold["power_w"].get<double>()) << " W\n";
    return kExitOk;
}

int sweep_ck_shift(const RunConfig& cfg, std::ostream& out) {
    std::vector<double> g = cfg.sweep.g_ck_values;
    if (g.empty())
        for (int k = 0; k <= 10; k += 2)
            g.push_back(k * 1e-4 * cfg.system.g0);
    const Model model = make_model(cfg);
    std::vector<double> zero(g.size());
    int direction = 0;
    check(optokerr_ck_shift_scan(model.get(), g.data(), g.size(), response_of(cfg), zero.data(), &direction),
          "cross-Kerr shift scan");

    const double wm = cfg.system.omega_m;
    CsvTable table({"g_ck_rad_s", "g_ck_over_g0", "delta_p0_over_omega_m"});
    json data = json::array();
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double ratio = cfg.system.g0 != 0.0 ? g[k] / cfg.system.g0 : 0.0;
        table.row({fmt(g[k]), fmt(ratio), fmt(zero[k] / wm)});
        data.push_back({{"g_ck_rad_s", g[k]}, {"g_ck_over_g0", ratio}, {"delta_p0_over_omega_m", zero[k] / wm}});
        out << "g_ck/g0 = " << fmt(ratio) << "  delta_p0/omega_m = " << fmt(zero[k] / wm) << "\n";
    }
    json report{{"mode", "ck_shift"},
                {"parameters", params_json(cfg, control_amplitude(cfg))},
                {"monotone", direction != 0},
                {"direction", direction}};
    if (cfg.format == OutputFormat::Json)
        report["shift"] = data;
    else
        write_atomic(cfg.out_dir, "shift.csv", table.str());
    write_json(cfg, "sweep.json", report);
    out << "monotone: " << (direction > 0 ? "increasing" : direction < 0 ? "decreasing" : "no") << "\n";
    return kExitOk;
}

int sweep_robustness(const RunConfig& cfg, std::ostream& out) {
    const double second = cfg.sweep.delta_a_second.value_or(0.8 * cfg.system.omega_m);
    const Model model = make_model(cfg);
    const auto powers = sweep_powers(cfg);
    optokerr_robustness r{};
    check(optokerr_detuning_robustness(model.get(), powers.data(), powers.size(), cfg.drive.delta_a, second, &r),
          "detuning robustness");

    CsvTable table({"case", "g_ck_rad_s", "fold_power_first_w", "fold_power_second_w", "n_photon_first",
                    "n_photon_second", "relative_displacement", "absolute_displacement"});
    auto entry = [&](const char* name, const optokerr_robustness_entry& e) {
        table.row({name, fmt(e.g_ck), fmt(e.fold_power_first), fmt(e.fold_power_second), fmt(e.x_first),
                   fmt(e.x_second), fmt(e.displacement), fmt(e.absolute_displacement)});
        return json{{"g_ck_rad_s", e.g_ck},
                    {"fold_power_first_w", e.fold_power_first},
                    {"fold_power_second_w", e.fold_power_second},
                    {"n_photon_first", e.x_first},
                    {"n_photon_second", e.x_second},
                    {"relative_displacement", e.displacement},
                    {"absolute_displacement", e.absolute_displacement}};
    };
    json report{{"mode", "robustness"},
                {"parameters", params_json(cfg, 0.0)},
                {"delta_a_first_rad_s", cfg.drive.delta_a},
                {"delta_a_second_rad_s", second},
                {"plain", entry("plain", r.plain)},
                {"ck", entry("ck", r.ck)},
                {"ck_more_robust", r.ck_more_robust != 0}};
    if (cfg.format == OutputFormat::Csv)
        write_atomic(cfg.out_dir, "robustness.csv", table.str());
    write_json(cfg, "robustness.json", report);
    out << "relative displacement  plain: " << fmt(r.plain.displacement) << "  ck: " << fmt(r.ck.displacement)
        << "\n";
    return kExitOk;
}

int sweep_phonon(const RunConfig& cfg, std::ostream& out) {
    double x_max = 0.0;
    if (cfg.sweep.photon_max)
        x_max = *cfg.sweep.photon_max;
    else if (cfg.system.g_ck > 0.0)
        x_max = 2.0 * cfg.system.omega_m / cfg.system.g_ck;
    else
        throw CommandError(kExitConfig, "sweep mode phonon needs photon_max when g_ck is zero");
    const auto x = linspace(0.0, x_max, static_cast<std::size_t>(cfg.sweep.photon_points));
    const Model model = make_model(cfg);
    std::vector<double> plain(x.size()), ck(x.size());
    check(optokerr_phonon_curve(model.get(), x.data(), x.size(), plain.data(), ck.data()), "phonon curve");

    CsvTable table({"n_photon", "n_phonon_plain", "n_phonon_ck"});
    json data = json::array();
    std::size_t peak = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        table.row({fmt(x[k]), fmt(plain[k]), fmt(ck[k])});
        data.push_back({x[k], plain[k], ck[k]});
        if (ck[k] > ck[peak])
            peak = k;
    }
    if (cfg.format == OutputFormat::Json) {
        json report{{"mode", "phonon"},
                    {"parameters", params_json(cfg, 0.0)},
                    {"columns", {"n_photon", "n_phonon_plain", "n_phonon_ck"}},
                    {"rows", data}};
        write_json(cfg, "phonon.json", report);
    } else {
        write_atomic(cfg.out_dir, "phonon.csv", table.str());
    }
    out << "points: " << x.size() << "  largest cross-Kerr phonon number at n_photon = " << fmt(x[peak]) << "\n";
    return kExitOk;
}

// ---- settle --------------------------------------------------------------

optokerr_settle_options settle_options_of(const RunConfig& cfg) {
    optokerr_settle_options o = optokerr_settle_defaults();
    o.t_end = cfg.settle.t_end_s;
    o.threshold = cfg.settle.threshold;
    o.integrator.rtol = cfg.settle.rtol;
    o.integrator.atol = cfg.settle.atol;
    o.integrator.max_steps = static_cast<size_t>(cfg.settle.max_steps);
    return o;
}

json settle_json(const optokerr_settle_result& r, const std::vector<optokerr_root>& roots) {
    json j{{"converged", r.converged != 0},
           {"matched", r.matched != 0},
           {"root_index", r.matched ? json(r.root_index) : json(nullptr)},
           {"a", {r.a.re, r.a.im}},
           {"b", {r.b.re, r.b.im}},
           {"criterion", r.criterion},
           {"match_distance", r.match_distance},
           {"t_final_s", r.t_final}};
    if (r.matched && r.root_index < roots.size())
        j["root_verdict"] = verdict_name(roots[r.root_index].verdict);
    return j;
}

optokerr_status run_settle_call(const optokerr_model* m, optokerr_complex a0, optokerr_complex b0,
                                const optokerr_settle_options& o, optokerr_settle_result& r) {
    const optokerr_status s = optokerr_settle(m, a0, b0, o, &r);
    if (s != OPTOKERR_E_NOT_CONVERGED)
        check(s, "settle");
    return s;
}

int settle_single(const RunConfig& cfg, std::ostream& out) {
    const Model model = make_model(cfg);
    const auto roots = all_roots(model.get());
    const optokerr_complex a0{cfg.settle.a0_re, cfg.settle.a0_im};
    const optokerr_complex b0{cfg.settle.b0_re, cfg.settle.b0_im};
    const optokerr_settle_options opts = settle_options_of(cfg);
    optokerr_settle_result r{};
    const optokerr_status s = run_settle_call(model.get(), a0, b0, opts, r);

    // Replay the same span with dense sampling; the step sequence is unchanged,
    // so the budget only needs a little slack.
    CsvTable table({"t_s", "re_a", "im_a", "re_b", "im_b"});
    json data = json::array();
    if (r.t_final > 0.0) {
        const auto times = linspace(0.0, r.t_final, static_cast<std::size_t>(cfg.settle.samples));
        optokerr_integrator_options io = opts.integrator;
        io.max_steps = io.max_steps + io.max_steps / 2 + 16;
        optokerr_trajectory* raw = nullptr;
        check(optokerr_integrate(model.get(), a0, b0, r.t_final, times.data(), times.size(), io, &raw),
              "trajectory");
        const std::unique_ptr<optokerr_trajectory, TrajectoryDeleter> traj(raw);
        for (std::size_t i = 0; i < optokerr_trajectory_size(traj.get()); ++i) {
            double t = 0.0;
            optokerr_complex a{}, b{};
            check(optokerr_trajectory_sample(traj.get(), i, &t, &a, &b), "trajectory sample");
            table.row({fmt(t), fmt(a.re), fmt(a.im), fmt(b.re), fmt(b.im)});
            data.push_back({t, a.re, a.im, b.re, b.im});
        }
    } else {
        table.row({fmt(0.0), fmt(a0.re), fmt(a0.im), fmt(b0.re), fmt(b0.im)});
        data.push_back({0.0, a0.re, a0.im, b0.re, b0.im});
    }

    json roots_j = json::array();
    for (std::size_t k = 0; k < roots.size(); ++k)
        roots_j.push_back(root_json(k, roots[k]));
    json report{{"mode", "single"},
                {"parameters", params_json(cfg, control_amplitude(cfg))},
                {"initial", {{"a", {a0.re, a0.im}}, {"b", {b0.re, b0.im}}}},
                {"endpoint", settle_json(r, roots)},
                {"roots", roots_j}};
    if (cfg.format == OutputFormat::Json)
        report["trajectory"] = {{"columns", {"t_s", "re_a", "im_a", "re_b", "im_b"}}, {"rows", data}};
    else
        write_atomic(cfg.out_dir, "trajectory.csv", table.str());
    write_json(cfg, "settle.json", report);

    out << (r.converged ? "converged" : "not converged") << " at t = " << fmt(r.t_final) << " s";
    if (r.matched)
        out << "  root " << r.root_index << " (" << verdict_name(roots[r.root_index].verdict) << ")";
    out << "\n";
    return s == OPTOKERR_OK ? kExitOk : kExitNotConverged;
}

int settle_ensemble(const RunConfig& cfg, std::ostream& out) {
    const Model model = make_model(cfg);
    const auto roots = all_roots(model.get());
    double x_max = 0.0, n_max = 0.0;
    for (const auto& r : roots) {
        x_max = std::max(x_max, r.n_photon);
        n_max = std::max(n_max, r.n_phonon);
    }
    // Starting points cover a disc twice the size of the largest steady amplitude.
    const double a_max = 2.0 * std::sqrt(x_max);
    const double b_max = 2.0 * std::sqrt(n_max);
    const auto n = static_cast<std::size_t>(cfg.settle.ensemble_size);
    std::vector<optokerr_complex> a0(n), b0(n);
    check(optokerr_random_initial_states(n, a_max, b_max, cfg.settle.seed, a0.data(), b0.data()),
          "initial states");

    const optokerr_settle_options opts = settle_options_of(cfg);
    CsvTable table({"run", "re_a0", "im_a0", "re_b0", "im_b0", "converged", "root_index", "root_verdict", "re_a",
                    "im_a", "re_b", "im_b", "criterion", "match_distance", "t_final_s"});
    json runs = json::array();
    std::vector<std::size_t> hits(roots.size(), 0);
    std::size_t not_converged = 0, unmatched = 0;
    for (std::size_t k = 0; k < n; ++k) {
        optokerr_settle_result r{};
        run_settle_call(model.get(), a0[k], b0[k], opts, r);
        if (!r.converged)
            ++not_converged;
        else if (!r.matched)
            ++unmatched;
        else
            ++hits[r.root_index];
        const std::string index = r.matched ? std::to_string(r.root_index) : "-1";
        const std::string verdict = r.matched ? verdict_name(roots[r.root_index].verdict) : "none";
        table.row({std::to_string(k), fmt(a0[k].re), fmt(a0[k].im), fmt(b0[k].re), fmt(b0[k].im),
                   r.converged ? "1" : "0", index, verdict, fmt(r.a.re), fmt(r.a.im), fmt(r.b.re), fmt(r.b.im),
                   fmt(r.criterion), fmt(r.match_distance), fmt(r.t_final)});
        json j = settle_json(r, roots);
        j["run"] = k;
        j["initial"] = {{"a", {a0[k].re, a0[k].im}}, {"b", {b0[k].re, b0[k].im}}};
        runs.push_back(j);
    }

    json histogram = json::array();
    std::size_t on_unstable = 0;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        histogram.push_back({{"root_index", k},
                             {"n_photon", roots[k].n_photon},
                             {"verdict", verdict_name(roots[k].verdict)},
                             {"count", hits[k]}});
        if (roots[k].verdict != OPTOKERR_STABLE)
            on_unstable += hits[k];
    }
    json report{{"mode", "ensemble"},
                {"parameters", params_json(cfg, control_amplitude(cfg))},
                {"seed", cfg.settle.seed},
                {"runs", n},
                {"a_max", a_max},
                {"b_max", b_max},
                {"histogram", histogram},
                {"not_converged", not_converged},
                {"unmatched", unmatched},
                {"on_non_stable_roots", on_unstable}};
    if (cfg.format == OutputFormat::Json)
        report["endpoints"] = runs;
    else
        write_atomic(cfg.out_dir, "ensemble.csv", table.str());
    write_json(cfg, "settle.json", report);

    for (std::size_t k = 0; k < roots.size(); ++k)
        out << "root " << k << " (" << verdict_name(roots[k].verdict) << "): " << hits[k] << "\n";
    out << "not converged: " << not_converged << "  unmatched: " << unmatched << "\n";
    return not_converged ? kExitNotConverged : kExitOk;
}

} // namespace

int run_roots(const RunConfig& cfg, std::ostream& out) {
    const Model model = make_model(cfg);
    const auto roots = all_roots(model.get());

    CsvTable table({"index", "n_photon", "n_phonon", "delta_rad_s", "omega_eff_rad_s", "re_a0", "im_a0", "re_b0",
                    "im_b0", "verdict", "margin_rad_s", "routh_hurwitz", "marginal_root"});
    json list = json::array();
    char line[256];
    std::snprintf(line, sizeof line, "%5s  %-24s  %-24s  %-24s  %-8s  %s\n", "index", "n_photon", "n_phonon",
                  "delta_rad_s", "verdict", "margin_rad_s");
    out << line;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const auto& r = roots[k];
        table.row({std::to_string(k), fmt(r.n_photon), fmt(r.n_phonon), fmt(r.delta), fmt(r.omega_eff),
                   fmt(r.a0.re), fmt(r.a0.im), fmt(r.b0.re), fmt(r.b0.im), verdict_name(r.verdict), fmt(r.margin),
                   r.routh_hurwitz_stable ? "stable" : "unstable", r.marginal_root ? "1" : "0"});
        list.push_back(root_json(k, r));
        std::snprintf(line, sizeof line, "%5zu  %-24.17g  %-24.17g  %-24.17g  %-8s  %.17g\n", k, r.n_photon,
                      r.n_phonon, r.delta, verdict_name(r.verdict), r.margin);
        out << line;
    }
    json report{{"parameters", params_json(cfg, control_amplitude(cfg))}, {"roots", list}};
    if (cfg.format == OutputFormat::Csv)
        write_atomic(cfg.out_dir, "roots.csv", table.str());
    write_json(cfg, "roots.json", report);
    return kExitOk;
}

int run_spectrum(const RunConfig& cfg, std::ostream& out) {
    const Model model = make_model(cfg);
    const double wm = cfg.system.omega_m;
    const auto grid = linspace(cfg.spectrum.delta_p_min, cfg.spectrum.delta_p_max,
                               static_cast<std::size_t>(cfg.spectrum.points));
    const auto opts = response_of(cfg);
    optokerr_spectrum* raw = nullptr;
    check(optokerr_spectrum_compute(model.get(), grid.data(), grid.size(), opts, &raw), "spectrum");
    const std::unique_ptr<optokerr_spectrum, SpectrumDeleter> spectrum(raw);

    CsvTable table({"delta_p_over_omega_m", "re_eps_t", "im_eps_t"});
    json rows = json::array();
    for (std::size_t i = 0; i < optokerr_spectrum_size(spectrum.get()); ++i) {
        double d = 0.0;
        optokerr_complex e{};
        check(optokerr_spectrum_point(spectrum.get(), i, &d, &e), "spectrum point");
        table.row({fmt(d), fmt(e.re), fmt(e.im)});
        rows.push_back({d, e.re, e.im});
    }

    size_t op_index = 0;
    optokerr_root op{};
    check(optokerr_spectrum_operating_point(spectrum.get(), &op_index, &op), "operating point");
    optokerr_consistency c{};
    check(optokerr_spectrum_consistency(spectrum.get(), &c), "consistency");

    json zero;
    double dp0 = 0.0;
    const optokerr_status zs = optokerr_zero_absorption(model.get(), opts, cfg.spectrum.zero_half_window,
                                                        static_cast<size_t>(cfg.spectrum.zero_points), &dp0);
    if (zs == OPTOKERR_OK)
        zero = {{"delta_p0_over_omega_m", dp0 / wm}, {"delta_p0_rad_s", dp0}};
    else if (zs == OPTOKERR_E_NOT_FOUND)
        zero = {{"delta_p0_over_omega_m", nullptr}, {"reason", optokerr_last_error()}};
    else
        check(zs, "zero absorption");

    json peaks = json::array();
    if (grid.size() >= 3) {
        size_t count = 0;
        optokerr_status ps =
            optokerr_absorption_peaks(model.get(), opts, grid.data(), grid.size(), nullptr, 0, &count);
        if (ps != OPTOKERR_E_BUFFER)
            check(ps, "absorption peaks");
        std::vector<optokerr_peak> found(count);
        check(optokerr_absorption_peaks(model.get(), opts, grid.data(), grid.size(), found.data(), found.size(),
                                        &count),
              "absorption peaks");
        for (const auto& p : found)
            peaks.push_back({{"center_over_omega_m", p.center / wm},
                             {"height", p.height},
                             {"left_over_omega_m", p.left / wm},
                             {"right_over_omega_m", p.right / wm},
                             {"width_over_omega_m", p.width / wm},
                             {"bounded", p.bounded != 0}});
    }

    json report{{"parameters", params_json(cfg, control_amplitude(cfg))},
                {"aminus_probe_term", cfg.spectrum.aminus_probe_term},
                {"operating_point", root_json(op_index, op)},
                {"zero_absorption", zero},
                {"peaks", peaks},
                {"consistency",
                 {{"points", c.points},
                  {"max_relative_difference", c.max_relative_difference},
                  {"worst_delta_p_over_omega_m", c.worst_delta_p_reduced},
                  {"max_residual", c.max_residual},
                  {"tolerance", c.tolerance},
                  {"agrees", c.agrees != 0}}}};
    if (cfg.format == OutputFormat::Json)
        report["spectrum"] = {{"columns", {"delta_p_over_omega_m", "re_eps_t", "im_eps_t"}}, {"rows", rows}};
    else
        write_atomic(cfg.out_dir, "spectrum.csv", table.str());
    write_json(cfg, "spectrum.json", report);

    out << "points: " << grid.size() << "  operating root: " << op_index << " (n_photon " << fmt(op.n_photon)
        << ")\n";
    if (zs == OPTOKERR_OK)
        out << "delta_p0/omega_m = " << fmt(dp0 / wm) << "\n";
    else
        out << "no zero-absorption point: " << zero["reason"].get<std::string>() << "\n";
    if (!c.agrees)
        out << "closed form and linear system differ by up to " << fmt(c.max_relative_difference)
            << " (relative)\n";
    return kExitOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
    switch (cfg.sweep.mode) {
    case SweepMode::Power:
        return sweep_power(cfg, out);
    case SweepMode::CkShift:
        return sweep_ck_shift(cfg, out);
    case SweepMode::Robustness:
        return sweep_robustness(cfg, out);
    case SweepMode::Phonon:
        return sweep_phonon(cfg, out);
    }
    return kExitConfig;
}

int run_settle(const RunConfig& cfg, std::ostream& out) {
    return cfg.settle.mode == SettleMode::Single ? settle_single(cfg, out) : settle_ensemble(cfg, out);
}

} // namespace optokerr::cli
