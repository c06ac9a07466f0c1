#include "optokerr/optokerr.h"

#include "optokerr/dynamics.hpp"
#include "optokerr/error.hpp"
#include "optokerr/model.hpp"
#include "optokerr/response.hpp"
#include "optokerr/stability.hpp"
#include "optokerr/steadystate.hpp"
#include "optokerr/sweep.hpp"

#include <new>
#include <string>

using namespace optokerr;

struct optokerr_model {
    SystemParams sys;
    DriveParams drive;
};

struct optokerr_spectrum {
    ResponseSpectrum data;
    SystemParams sys;
};

struct optokerr_sweep {
    PowerSweep data;
};

struct optokerr_trajectory {
    Trajectory data;
};

namespace {

thread_local std::string last_error;

optokerr_status fail(optokerr_status s, const char* what) {
    last_error = what;
    return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
optokerr_status guarded(Fn&& fn) {
    try {
        last_error.clear();
        return fn();
    } catch (const DomainError& e) {
        return fail(OPTOKERR_E_DOMAIN, e.what());
    } catch (const NotFoundError& e) {
        return fail(OPTOKERR_E_NOT_FOUND, e.what());
    } catch (const StructuralError& e) {
        return fail(OPTOKERR_E_STRUCTURAL, e.what());
    } catch (const SolverError& e) {
        return fail(OPTOKERR_E_SOLVER, e.what());
    } catch (const RejectedRootError& e) {
        return fail(OPTOKERR_E_SOLVER, e.what());
    } catch (const std::bad_alloc&) {
        return fail(OPTOKERR_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(OPTOKERR_E_INTERNAL, e.what());
    } catch (...) {
        return fail(OPTOKERR_E_INTERNAL, "unknown error");
    }
}

optokerr_status null_argument() {
    return fail(OPTOKERR_E_ARGUMENT, "null argument");
}

optokerr_status out_of_range() {
    return fail(OPTOKERR_E_ARGUMENT, "index out of range");
}

optokerr_complex to_c(complex z) {
    return {z.real(), z.imag()};
}

complex from_c(optokerr_complex z) {
    return {z.re, z.im};
}

optokerr_verdict to_c(Verdict v) {
    switch (v) {
    case Verdict::Stable:
        return OPTOKERR_STABLE;
    case Verdict::Unstable:
        return OPTOKERR_UNSTABLE;
    case Verdict::Marginal:
        break;
    }
    return OPTOKERR_MARGINAL;
}

BranchSelect branch_of(const optokerr_response_options& o) {
    BranchSelect b;
    if (o.branch >= 0)
        b.index = static_cast<std::size_t>(o.branch);
    return b;
}

ResponseOptions response_of(const optokerr_response_options& o) {
    ResponseOptions r;
    r.aminus_probe_term = o.aminus_probe_term != 0;
    return r;
}

IntegratorOptions integrator_of(const optokerr_integrator_options& o) {
    IntegratorOptions r;
    r.rtol = o.rtol;
    r.atol = o.atol;
    r.max_step = o.max_step;
    r.max_steps = o.max_steps;
    return r;
}

void fill_root(optokerr_root& out, const PhotonRoot& r, const SteadyState& ss, const StabilityReport& rep) {
    out.n_photon = r.x;
    out.n_phonon = ss.n_phonon;
    out.delta = ss.Delta;
    out.omega_eff = ss.Omega_m;
    out.a0 = to_c(ss.A0);
    out.b0 = to_c(ss.B0);
    out.residual = r.residual;
    out.marginal_root = r.marginal ? 1 : 0;
    out.verdict = to_c(rep.verdict);
    out.margin = rep.margin;
    out.routh_hurwitz_stable = rep.rh_verdict ? 1 : 0;
    out.c[0] = rep.coeffs.c3;
    out.c[1] = rep.coeffs.c2;
    out.c[2] = rep.coeffs.c1;
    out.c[3] = rep.coeffs.c0;
    for (std::size_t k = 0; k < 4; ++k)
        out.eigenvalues[k] = to_c(rep.eigenvalues[k]);
}

} // namespace

extern "C" {

const char* optokerr_version(void) {
    return "0.1.0";
}

const char* optokerr_last_error(void) {
    return last_error.c_str();
}

const char* optokerr_status_name(optokerr_status status) {
    switch (status) {
    case OPTOKERR_OK:
        return "ok";
    case OPTOKERR_E_DOMAIN:
        return "domain error";
    case OPTOKERR_E_SOLVER:
        return "solver error";
    case OPTOKERR_E_STRUCTURAL:
        return "structural error";
    case OPTOKERR_E_NOT_FOUND:
        return "not found";
    case OPTOKERR_E_NOT_CONVERGED:
        return "not converged";
    case OPTOKERR_E_BUFFER:
        return "buffer too small";
    case OPTOKERR_E_ARGUMENT:
        return "invalid argument";
    case OPTOKERR_E_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

optokerr_status optokerr_rabi_from_power(double power, double kappa, double omega_field, double* out) {
    if (!out)
        return null_argument();
    return guarded([&] {
        *out = rabi_from_power(power, kappa, omega_field);
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_thermal_occupancy(double omega_m, double temperature, double* out) {
    if (!out)
        return null_argument();
    return guarded([&] {
        *out = thermal_occupancy(omega_m, temperature);
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_model_create(const optokerr_system_params* sys, const optokerr_drive_params* drive,
                                      optokerr_model** out) {
    if (!sys || !drive || !out)
        return null_argument();
    return guarded([&] {
        *out = new optokerr_model{
            SystemParams({sys->omega_a, sys->omega_m, sys->g0, sys->g_ck, sys->kappa, sys->gamma}),
            DriveParams({drive->delta_a, drive->eps_c, drive->eps_p, drive->delta_p})};
        return OPTOKERR_OK;
    });
}

void optokerr_model_destroy(optokerr_model* model) {
    delete model;
}

optokerr_status optokerr_model_system(const optokerr_model* model, optokerr_system_params* out) {
    if (!model || !out)
        return null_argument();
    const auto& v = model->sys.values();
    *out = {v.omega_a, v.omega_m, v.g0, v.g_ck, v.kappa, v.gamma};
    return OPTOKERR_OK;
}

optokerr_status optokerr_model_drive(const optokerr_model* model, optokerr_drive_params* out) {
    if (!model || !out)
        return null_argument();
    const auto& v = model->drive.values();
    *out = {v.delta_a, v.eps_c, v.eps_p, v.delta_p};
    return OPTOKERR_OK;
}

optokerr_status optokerr_quintic(const optokerr_model* model, double coefficients[6], int* degree) {
    if (!model || !coefficients)
        return null_argument();
    return guarded([&] {
        const auto q = quintic_coefficients(model->sys, model->drive.delta_a(), model->drive.eps_c());
        const auto a = q.physical_all();
        for (std::size_t i = 0; i < 6; ++i)
            coefficients[i] = a[i];
        if (degree)
            *degree = q.degree;
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_roots(const optokerr_model* model, optokerr_root* roots, size_t capacity, size_t* count) {
    if (!model || !count || (capacity > 0 && !roots))
        return null_argument();
    return guarded([&] {
        const auto& sys = model->sys;
        const auto& d = model->drive;
        const auto found = steady_photon_roots(sys, d.delta_a(), d.eps_c());
        *count = found.size();
        if (capacity < found.size())
            return fail(OPTOKERR_E_BUFFER, "root buffer too small");
        for (std::size_t k = 0; k < found.size(); ++k) {
            const SteadyState ss = steady_state_from_photon(found[k].x, sys, d.delta_a(), d.eps_c());
            fill_root(roots[k], found[k], ss, classify(ss, sys));
        }
        return OPTOKERR_OK;
    });
}

optokerr_response_options optokerr_response_defaults(void) {
    return {-1, 1};
}

optokerr_status optokerr_spectrum_compute(const optokerr_model* model, const double* grid, size_t n,
                                          optokerr_response_options opts, optokerr_spectrum** out) {
    if (!model || !out || (n > 0 && !grid))
        return null_argument();
    return guarded([&] {
        auto spec = absorption_spectrum(model->sys, model->drive, branch_of(opts), {grid, n}, response_of(opts));
        *out = new optokerr_spectrum{std::move(spec), model->sys};
        return OPTOKERR_OK;
    });
}

void optokerr_spectrum_destroy(optokerr_spectrum* spectrum) {
    delete spectrum;
}

size_t optokerr_spectrum_size(const optokerr_spectrum* spectrum) {
    return spectrum ? spectrum->data.points.size() : 0;
}

optokerr_status optokerr_spectrum_point(const optokerr_spectrum* spectrum, size_t i, double* delta_p_reduced,
                                        optokerr_complex* eps_t) {
    if (!spectrum)
        return null_argument();
    if (i >= spectrum->data.points.size())
        return out_of_range();
    const auto& p = spectrum->data.points[i];
    if (delta_p_reduced)
        *delta_p_reduced = p.delta_p_reduced;
    if (eps_t)
        *eps_t = to_c(p.eps_T);
    return OPTOKERR_OK;
}

optokerr_status optokerr_spectrum_operating_point(const optokerr_spectrum* spectrum, size_t* index,
                                                  optokerr_root* root) {
    if (!spectrum)
        return null_argument();
    const auto& op = spectrum->data.operating_point;
    if (index)
        *index = op.index;
    if (root)
        fill_root(*root, op.roots[op.index], op.state, op.stability);
    return OPTOKERR_OK;
}

optokerr_status optokerr_spectrum_consistency(const optokerr_spectrum* spectrum, optokerr_consistency* out) {
    if (!spectrum || !out)
        return null_argument();
    const auto& c = spectrum->data.consistency;
    *out = {c.points, c.max_relative_difference, c.worst_delta_p_reduced, c.max_residual, c.tolerance,
            c.agrees ? 1 : 0};
    return OPTOKERR_OK;
}

optokerr_status optokerr_zero_absorption(const optokerr_model* model, optokerr_response_options opts,
                                         double half_window, size_t points, double* delta_p0) {
    if (!model || !delta_p0)
        return null_argument();
    return guarded([&] {
        ZeroScanOptions scan;
        if (half_window > 0.0)
            scan.half_window = half_window;
        if (points > 0)
            scan.points = points;
        *delta_p0 = zero_absorption_point(model->sys, model->drive, branch_of(opts), response_of(opts), scan);
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_absorption_peaks(const optokerr_model* model, optokerr_response_options opts,
                                          const double* grid, size_t n, optokerr_peak* peaks, size_t capacity,
                                          size_t* count) {
    if (!model || !count || (n > 0 && !grid) || (capacity > 0 && !peaks))
        return null_argument();
    return guarded([&] {
        const OperatingPoint op = select_branch(model->sys, model->drive, branch_of(opts));
        const ProbeResponse response(model->sys, model->drive, op.state, response_of(opts));
        const auto found = absorption_peaks(response, {grid, n});
        *count = found.size();
        if (capacity < found.size())
            return fail(OPTOKERR_E_BUFFER, "peak buffer too small");
        for (std::size_t k = 0; k < found.size(); ++k) {
            const auto& p = found[k];
            peaks[k] = {p.center, p.height, p.left, p.right, p.width, p.bounded ? 1 : 0};
        }
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_power_sweep(const optokerr_model* model, const double* powers, size_t n, double omega_c,
                                     optokerr_sweep** out) {
    if (!model || !out || (n > 0 && !powers))
        return null_argument();
    return guarded([&] {
        auto sw = power_sweep(model->sys, model->drive.delta_a(), {powers, n}, omega_c);
        *out = new optokerr_sweep{std::move(sw)};
        return OPTOKERR_OK;
    });
}

void optokerr_sweep_destroy(optokerr_sweep* sweep) {
    delete sweep;
}

size_t optokerr_sweep_branch_count(const optokerr_sweep* sweep) {
    return sweep ? sweep->data.branches.size() : 0;
}

optokerr_status optokerr_sweep_branch(const optokerr_sweep* sweep, size_t branch, int* id,
                                      optokerr_verdict* stability, size_t* points) {
    if (!sweep)
        return null_argument();
    if (branch >= sweep->data.branches.size())
        return out_of_range();
    const auto& b = sweep->data.branches[branch];
    if (id)
        *id = b.id;
    if (stability)
        *stability = to_c(b.stability);
    if (points)
        *points = b.x.size();
    return OPTOKERR_OK;
}

optokerr_status optokerr_sweep_branch_point(const optokerr_sweep* sweep, size_t branch, size_t k, double* power,
                                            double* n_photon) {
    if (!sweep)
        return null_argument();
    if (branch >= sweep->data.branches.size() || k >= sweep->data.branches[branch].x.size())
        return out_of_range();
    const auto& b = sweep->data.branches[branch];
    if (power)
        *power = b.sweep_values[k];
    if (n_photon)
        *n_photon = b.x[k];
    return OPTOKERR_OK;
}

size_t optokerr_sweep_fold_count(const optokerr_sweep* sweep) {
    return sweep ? sweep->data.folds.size() : 0;
}

optokerr_status optokerr_sweep_fold(const optokerr_sweep* sweep, size_t i, optokerr_fold* out) {
    if (!sweep || !out)
        return null_argument();
    if (i >= sweep->data.folds.size())
        return out_of_range();
    const auto& f = sweep->data.folds[i];
    *out = {f.power, f.lower, f.upper, f.roots_below, f.roots_above};
    return OPTOKERR_OK;
}

size_t optokerr_sweep_stability_change_count(const optokerr_sweep* sweep) {
    return sweep ? sweep->data.stability_changes.size() : 0;
}

optokerr_status optokerr_sweep_stability_change(const optokerr_sweep* sweep, size_t i, double* power) {
    if (!sweep || !power)
        return null_argument();
    if (i >= sweep->data.stability_changes.size())
        return out_of_range();
    *power = sweep->data.stability_changes[i];
    return OPTOKERR_OK;
}

size_t optokerr_sweep_point_count(const optokerr_sweep* sweep) {
    return sweep ? sweep->data.powers.size() : 0;
}

optokerr_status optokerr_sweep_point(const optokerr_sweep* sweep, size_t i, double* power, size_t* roots) {
    if (!sweep)
        return null_argument();
    if (i >= sweep->data.powers.size())
        return out_of_range();
    if (power)
        *power = sweep->data.powers[i];
    if (roots)
        *roots = sweep->data.root_counts[i];
    return OPTOKERR_OK;
}

optokerr_status optokerr_phonon_curve(const optokerr_model* model, const double* x, size_t n, double* plain,
                                      double* ck) {
    if (!model || (n > 0 && (!x || !plain || !ck)))
        return null_argument();
    return guarded([&] {
        const auto rows = phonon_photon_curve(model->sys, {x, n});
        for (std::size_t k = 0; k < rows.size(); ++k) {
            plain[k] = rows[k].n_phonon_plain;
            ck[k] = rows[k].n_phonon_ck;
        }
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_ck_shift_scan(const optokerr_model* model, const double* g_ck, size_t n,
                                       optokerr_response_options opts, double* delta_p0, int* monotone) {
    if (!model || (n > 0 && (!g_ck || !delta_p0)))
        return null_argument();
    return guarded([&] {
        const auto scan = ck_shift_scan(model->sys, model->drive, {g_ck, n}, branch_of(opts), response_of(opts));
        for (std::size_t k = 0; k < scan.rows.size(); ++k)
            delta_p0[k] = scan.rows[k].delta_p0;
        if (monotone)
            *monotone = scan.direction;
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_detuning_robustness(const optokerr_model* model, const double* powers, size_t n,
                                             double delta_first, double delta_second, optokerr_robustness* out) {
    if (!model || !out || (n > 0 && !powers))
        return null_argument();
    return guarded([&] {
        const auto r = detuning_robustness(model->sys, {powers, n}, delta_first, delta_second);
        auto conv = [](const RobustnessEntry& e) {
            return optokerr_robustness_entry{e.g_ck,     e.fold_power_first, e.fold_power_second,
                                             e.x_first,  e.x_second,         e.displacement,
                                             e.absolute_displacement};
        };
        *out = {conv(r.plain), conv(r.ck), r.ck_more_robust ? 1 : 0};
        return OPTOKERR_OK;
    });
}

optokerr_integrator_options optokerr_integrator_defaults(void) {
    const IntegratorOptions d;
    return {d.rtol, d.atol, d.max_step, d.max_steps};
}

optokerr_status optokerr_integrate(const optokerr_model* model, optokerr_complex a0, optokerr_complex b0,
                                   double t_end, const double* sample_times, size_t n,
                                   optokerr_integrator_options opts, optokerr_trajectory** out) {
    if (!model || !out || (n > 0 && !sample_times))
        return null_argument();
    return guarded([&] {
        auto traj = integrate_mean_field(model->sys, model->drive, {from_c(a0), from_c(b0)}, t_end,
                                         {sample_times, n}, integrator_of(opts));
        *out = new optokerr_trajectory{std::move(traj)};
        return OPTOKERR_OK;
    });
}

void optokerr_trajectory_destroy(optokerr_trajectory* traj) {
    delete traj;
}

size_t optokerr_trajectory_size(const optokerr_trajectory* traj) {
    return traj ? traj->data.times.size() : 0;
}

optokerr_status optokerr_trajectory_sample(const optokerr_trajectory* traj, size_t i, double* t,
                                           optokerr_complex* a, optokerr_complex* b) {
    if (!traj)
        return null_argument();
    if (i >= traj->data.times.size())
        return out_of_range();
    if (t)
        *t = traj->data.times[i];
    if (a)
        *a = to_c(traj->data.a[i]);
    if (b)
        *b = to_c(traj->data.b[i]);
    return OPTOKERR_OK;
}

optokerr_settle_options optokerr_settle_defaults(void) {
    const SettleOptions d;
    return {d.t_end, d.threshold, d.window_periods, d.match_tolerance, optokerr_integrator_defaults()};
}

optokerr_status optokerr_settle(const optokerr_model* model, optokerr_complex a0, optokerr_complex b0,
                                optokerr_settle_options opts, optokerr_settle_result* out) {
    if (!model || !out)
        return null_argument();
    return guarded([&] {
        SettleOptions o;
        o.t_end = opts.t_end;
        o.threshold = opts.threshold;
        o.window_periods = opts.window_periods;
        o.match_tolerance = opts.match_tolerance;
        o.integrator = integrator_of(opts.integrator);
        const SettleOutcome r = settle(model->sys, model->drive, {from_c(a0), from_c(b0)}, o);
        out->converged = r.converged ? 1 : 0;
        out->matched = r.root_index ? 1 : 0;
        out->root_index = r.root_index.value_or(0);
        out->a = to_c(r.final_state.a);
        out->b = to_c(r.final_state.b);
        out->criterion = r.criterion;
        out->match_distance = r.match_distance;
        out->t_final = r.t_final;
        if (!r.converged)
            return fail(OPTOKERR_E_NOT_CONVERGED, "settling criterion not met before t_end");
        return OPTOKERR_OK;
    });
}

optokerr_status optokerr_random_initial_states(size_t n, double a_max, double b_max, uint64_t seed,
                                               optokerr_complex* a, optokerr_complex* b) {
    if (n > 0 && (!a || !b))
        return null_argument();
    return guarded([&] {
        const auto states = random_initial_states(n, a_max, b_max, seed);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = to_c(states[k].a);
            b[k] = to_c(states[k].b);
        }
        return OPTOKERR_OK;
    });
}

uint64_t optokerr_default_seed(void) {
    return kDefaultEnsembleSeed;
}

} // extern "C"
