#include "optokerr/dynamics.hpp"

#include "optokerr/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace optokerr {

namespace {

// Extended precision: near a fixed point |db/dt| / (gamma |b|) has to resolve
// relative changes of b of order gamma/omega_m below the settle threshold,
// which double rounding of the strongly hybridized modes cannot deliver.
using real = long double;
using cplx = std::complex<real>;
using State = std::array<cplx, 2>;

constexpr cplx I{0.0L, 1.0L};
constexpr real kCriterionFloor = 1e-12; // eps in the settle criterion, units of omega_m
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dormand-Prince 5(4) tableau.
constexpr real c2 = 1.0L / 5.0L, c3 = 3.0L / 10.0L, c4 = 4.0L / 5.0L, c5 = 8.0L / 9.0L;
constexpr real a21 = 1.0L / 5.0L;
constexpr real a31 = 3.0L / 40.0L, a32 = 9.0L / 40.0L;
constexpr real a41 = 44.0L / 45.0L, a42 = -56.0L / 15.0L, a43 = 32.0L / 9.0L;
constexpr real a51 = 19372.0L / 6561.0L, a52 = -25360.0L / 2187.0L, a53 = 64448.0L / 6561.0L, a54 = -212.0L / 729.0L;
constexpr real a61 = 9017.0L / 3168.0L, a62 = -355.0L / 33.0L, a63 = 46732.0L / 5247.0L, a64 = 49.0L / 176.0L,
                 a65 = -5103.0L / 18656.0L;
constexpr real a71 = 35.0L / 384.0L, a73 = 500.0L / 1113.0L, a74 = 125.0L / 192.0L, a75 = -2187.0L / 6784.0L,
                 a76 = 11.0L / 84.0L;
constexpr real e1 = 71.0L / 57600.0L, e3 = -71.0L / 16695.0L, e4 = 71.0L / 1920.0L, e5 = -17253.0L / 339200.0L,
                 e6 = 22.0L / 525.0L, e7 = -1.0L / 40.0L;
// Dense output (Hairer & Wanner).
constexpr real d1 = -12715105075.0L / 11282082432.0L, d3 = 87487479700.0L / 32700410799.0L,
                 d4 = -10690763975.0L / 1880347072.0L, d5 = 701980252875.0L / 199316789632.0L,
                 d6 = -1453857185.0L / 822651844.0L, d7 = 69997945.0L / 29380423.0L;

// Mean-field equations with rates in units of omega_m and time tau = omega_m t.
struct ScaledModel {
    real delta_a, kappa, gamma, g0, g_ck, eps_c, eps_p, delta_p;

    ScaledModel(const SystemParams& sys, const DriveParams& drive) {
        const real w = sys.omega_m();
        delta_a = drive.delta_a() / w;
        kappa = sys.kappa() / w;
        gamma = sys.gamma() / w;
        g0 = sys.g0() / w;
        g_ck = sys.g_ck() / w;
        eps_c = drive.eps_c() / w;
        eps_p = drive.eps_p() / w;
        delta_p = drive.delta_p() / w;
    }

    State operator()(real tau, const State& y) const {
        const cplx a = y[0];
        const cplx b = y[1];
        const real na = std::norm(a);
        cplx da = -cplx{kappa, delta_a} * a + I * g0 * a * (2 * b.real()) + I * g_ck * a * std::norm(b) + eps_c;
        if (eps_p > 0)
            da += eps_p * std::exp(-I * delta_p * tau);
        const cplx db = -cplx{gamma, 1} * b + I * g0 * na + I * g_ck * na * b;
        return {da, db};
    }

    double criterion(const State& y, const State& dy) const {
        const real ra = std::abs(dy[0]) / (kappa * std::abs(y[0]) + kCriterionFloor);
        const real rb = std::abs(dy[1]) / (gamma * std::abs(y[1]) + kCriterionFloor);
        return static_cast<double>(std::max(ra, rb));
    }
};

State axpy(const State& y, real h, std::initializer_list<std::pair<real, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

class Dopri5 {
public:
    Dopri5(const ScaledModel& f, const State& y0, real tau0, real direction, real rtol, real atol, real h_max,
           std::size_t max_steps)
        : f_(f), y_(y0), tau_(tau0), dir_(direction), rtol_(rtol), atol_(atol), h_max_(h_max),
          max_steps_(max_steps) {
        k1_ = f_(tau_, y_);
        h_ = std::min(h_max_, 1e-3L);
    }

    real tau() const { return tau_; }
    const State& y() const { return y_; }
    const State& rate() const { return k1_; }
    std::size_t steps() const { return steps_; }

    // One accepted step that does not pass tau_limit. Returns false, without
    // moving, once the step budget is spent.
    bool step(real tau_limit) {
        real h = std::min(h_, std::abs(tau_limit - tau_));
        for (;;) {
            const bool to_limit = h >= std::abs(tau_limit - tau_);
            if (steps_ >= max_steps_)
                return false;
            ++steps_;
            const real floor = 16 * std::numeric_limits<real>::epsilon() * std::max(real{1}, std::abs(tau_));
            // A short final leg up to the limit is not a sign of stiffness.
            if (h < floor && !to_limit) {
                std::ostringstream msg;
                msg << "step size underflow: h = " << h << " at omega_m t = " << tau_ << ", |a| = "
                    << std::abs(y_[0]) << ", |b| = " << std::abs(y_[1]);
                throw StiffnessError(msg.str());
            }
            const real s = dir_ * h;
            const State& k1 = k1_;
            const State k2 = f_(tau_ + c2 * s, axpy(y_, s, {{a21, &k1}}));
            const State k3 = f_(tau_ + c3 * s, axpy(y_, s, {{a31, &k1}, {a32, &k2}}));
            const State k4 = f_(tau_ + c4 * s, axpy(y_, s, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 = f_(tau_ + c5 * s, axpy(y_, s, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State k6 =
                f_(tau_ + s, axpy(y_, s, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State y1 = axpy(y_, s, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            const State k7 = f_(tau_ + s, y1);

            real err = 0;
            for (std::size_t i = 0; i < 2; ++i) {
                const cplx e = s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const real sc = atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(y1[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) {
                h *= 0.1;
                continue;
            }
            const real grow = err == 0 ? real{5} : std::clamp(real{0.9} * std::pow(err, real{-0.2}), real{0.2}, real{5});
            if (err <= 1) {
                for (std::size_t i = 0; i < 2; ++i) {
                    const cplx diff = y1[i] - y_[i];
                    const cplx bspl = s * k1[i] - diff;
                    dense_[0][i] = y_[i];
                    dense_[1][i] = diff;
                    dense_[2][i] = bspl;
                    dense_[3][i] = diff - s * k7[i] - bspl;
                    dense_[4][i] = s * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                tau_old_ = tau_;
                step_ = s;
                tau_ = to_limit ? tau_limit : tau_ + s;
                y_ = y1;
                k1_ = k7;
                h_ = std::min(h_max_, h * (rejected_ ? std::min(grow, real{1}) : grow));
                rejected_ = false;
                return true;
            }
            rejected_ = true;
            h *= grow;
        }
    }

    // Dense output inside the last accepted step.
    State interpolate(real tau) const {
        const real th = (tau - tau_old_) / step_;
        const real th1 = 1 - th;
        State out;
        for (std::size_t i = 0; i < 2; ++i)
            out[i] = dense_[0][i] +
                     th * (dense_[1][i] + th1 * (dense_[2][i] + th * (dense_[3][i] + th1 * dense_[4][i])));
        return out;
    }

private:
    ScaledModel f_;
    State y_;
    State k1_;
    real tau_;
    real tau_old_ = 0;
    real step_ = 0;
    real dir_;
    real rtol_, atol_, h_max_;
    real h_ = 0;
    std::size_t max_steps_;
    std::size_t steps_ = 0;
    bool rejected_ = false;
    std::array<State, 5> dense_{};
};

void check_options(const IntegratorOptions& o) {
    if (!(o.rtol > 0.0) || !(o.atol > 0.0) || !std::isfinite(o.rtol) || !std::isfinite(o.atol))
        throw DomainError("integrator tolerances must be finite and > 0");
    if (!(o.max_step >= 0.0) || !std::isfinite(o.max_step))
        throw DomainError("max_step must be finite and >= 0");
}

void check_state(const MeanFieldState& s) {
    if (!std::isfinite(s.a.real()) || !std::isfinite(s.a.imag()) || !std::isfinite(s.b.real()) ||
        !std::isfinite(s.b.imag()))
        throw DomainError("initial state must be finite");
}

State to_state(const MeanFieldState& s) {
    return {cplx(s.a), cplx(s.b)};
}

complex narrow(const cplx& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

MeanFieldState to_public(const State& y) {
    return {narrow(y[0]), narrow(y[1])};
}

double scaled_max_step(const SystemParams& sys, const IntegratorOptions& o) {
    return o.max_step > 0.0 ? o.max_step * sys.omega_m() : kTwoPi / 8.0;
}

} // namespace

MeanFieldState mean_field_rate(const SystemParams& sys, const DriveParams& drive, double t,
                               const MeanFieldState& s) {
    const ScaledModel f(sys, drive);
    const State d = f(static_cast<real>(t) * sys.omega_m(), to_state(s));
    return {narrow(d[0] * static_cast<real>(sys.omega_m())), narrow(d[1] * static_cast<real>(sys.omega_m()))};
}

Trajectory integrate_mean_field(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& initial,
                                double t_end, std::span<const double> sample_times, IntegratorOptions opts) {
    check_options(opts);
    check_state(initial);
    if (!std::isfinite(t_end) || t_end == 0.0)
        throw DomainError("t_end must be finite and non-zero");
    const double w = sys.omega_m();
    const double dir = t_end > 0.0 ? 1.0 : -1.0;
    double previous = 0.0;
    for (double t : sample_times) {
        if (!std::isfinite(t) || dir * t < 0.0 || dir * t > dir * t_end || dir * (t - previous) < 0.0)
            throw DomainError("sample times must lie in [0, t_end] in integration order");
        previous = t;
    }

    Trajectory traj;
    auto record = [&](double t, const State& y) {
        traj.times.push_back(t);
        traj.a.push_back(narrow(y[0]));
        traj.b.push_back(narrow(y[1]));
    };

    const real tau_end = static_cast<real>(t_end) * w;
    Dopri5 stepper(ScaledModel(sys, drive), to_state(initial), 0, dir, opts.rtol, opts.atol,
                   scaled_max_step(sys, opts), opts.max_steps);
    std::size_t next = 0;
    if (sample_times.empty())
        record(0.0, stepper.y());
    while (next < sample_times.size() && sample_times[next] == 0.0)
        record(sample_times[next++], stepper.y());

    while (dir * (tau_end - stepper.tau()) > 0) {
        if (!stepper.step(tau_end)) {
            std::ostringstream msg;
            msg << "step budget of " << opts.max_steps << " exhausted at t = " << stepper.tau() / w << " s";
            throw SolverError(msg.str());
        }
        const bool last = stepper.tau() == tau_end;
        while (next < sample_times.size() &&
               (last || dir * (static_cast<real>(sample_times[next]) * w - stepper.tau()) <= 0)) {
            const real tau = static_cast<real>(sample_times[next]) * w;
            record(sample_times[next], dir * (tau - stepper.tau()) >= 0 ? stepper.y() : stepper.interpolate(tau));
            ++next;
        }
        if (last)
            break;
    }
    if (sample_times.empty())
        record(t_end, stepper.y());
    traj.converged = true;
    traj.final_state = to_public(stepper.y());
    return traj;
}

double settle_criterion(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& s) {
    const ScaledModel f(sys, drive);
    const State y = to_state(s);
    return f.criterion(y, f(0, y));
}

SettleOutcome settle(const SystemParams& sys, const DriveParams& drive, const MeanFieldState& initial,
                     SettleOptions opts) {
    check_options(opts.integrator);
    check_state(initial);
    if (drive.eps_p() != 0.0)
        throw DomainError("settle requires eps_p = 0");
    if (!(opts.t_end >= 0.0) || !std::isfinite(opts.t_end) || !(opts.threshold > 0.0) ||
        !(opts.window_periods >= 0.0) || !(opts.match_tolerance > 0.0))
        throw DomainError("invalid settle options");

    const double w = sys.omega_m();
    const real tau_end = opts.t_end > 0.0 ? static_cast<real>(opts.t_end) * w : real{20000} * kTwoPi;
    const real window = static_cast<real>(opts.window_periods) * kTwoPi;
    const ScaledModel model(sys, drive);

    SettleOutcome out;
    Dopri5 stepper(model, to_state(initial), 0, 1, opts.integrator.rtol, opts.integrator.atol,
                   scaled_max_step(sys, opts.integrator), opts.integrator.max_steps);
    out.criterion = model.criterion(stepper.y(), stepper.rate());

    if (out.criterion == 0.0) {
        // Exact fixed point: nothing will move.
        out.converged = true;
    } else {
        std::optional<real> quiet_since;
        while (stepper.tau() < tau_end) {
            if (!stepper.step(tau_end))
                break;
            out.criterion = model.criterion(stepper.y(), stepper.rate());
            if (out.criterion < opts.threshold) {
                if (!quiet_since)
                    quiet_since = stepper.tau();
                if (stepper.tau() - *quiet_since >= window) {
                    out.converged = true;
                    break;
                }
            } else {
                quiet_since.reset();
            }
        }
    }
    out.final_state = to_public(stepper.y());
    out.t_final = static_cast<double>(stepper.tau() / w);
    if (!out.converged)
        return out;

    const auto roots = steady_photon_roots(sys, drive.delta_a(), drive.eps_c());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < roots.size(); ++k) {
        SteadyState ss;
        try {
            ss = steady_state_from_photon(roots[k].x, sys, drive.delta_a(), drive.eps_c());
        } catch (const RejectedRootError&) {
            continue;
        }
        const double diff = std::sqrt(std::norm(out.final_state.a - ss.A0) + std::norm(out.final_state.b - ss.B0));
        const double ref = std::sqrt(std::norm(ss.A0) + std::norm(ss.B0));
        const double dist = ref > 0.0 ? diff / ref : diff;
        if (dist < best) {
            best = dist;
            out.root_index = k;
            out.state = ss;
        }
    }
    out.match_distance = best;
    if (best > opts.match_tolerance) {
        out.root_index.reset();
        out.state.reset();
    }
    return out;
}

std::vector<SettleOutcome> ramp_settle(const SystemParams& sys, const DriveParams& drive,
                                       std::span<const double> eps_c_values, const MeanFieldState& initial,
                                       SettleOptions opts) {
    std::vector<SettleOutcome> out;
    out.reserve(eps_c_values.size());
    MeanFieldState current = initial;
    for (double eps : eps_c_values) {
        out.push_back(settle(sys, drive.with_eps_c(eps), current, opts));
        current = out.back().final_state;
    }
    return out;
}

std::vector<MeanFieldState> random_initial_states(std::size_t n, double a_max, double b_max, std::uint64_t seed) {
    if (!(a_max >= 0.0) || !(b_max >= 0.0) || !std::isfinite(a_max) || !std::isfinite(b_max))
        throw DomainError("amplitude bounds must be finite and >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<MeanFieldState> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ra = a_max * unit(rng);
        const double pa = kTwoPi * unit(rng);
        const double rb = b_max * unit(rng);
        const double pb = kTwoPi * unit(rng);
        out.push_back({std::polar(ra, pa), std::polar(rb, pb)});
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t_s,re_a,im_a,re_b,im_b\n";
    char line[160];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[k], traj.a[k].real(),
                      traj.a[k].imag(), traj.b[k].real(), traj.b[k].imag());
        out << line;
    }
}

} // namespace optokerr
