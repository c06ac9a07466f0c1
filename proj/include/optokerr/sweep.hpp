#pragma once

// Parameter sweeps and branch tracking over the steady-state solutions.

#include "optokerr/model.hpp"
#include "optokerr/response.hpp"
#include "optokerr/stability.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace optokerr {

struct PhononPhotonRow {
    double x = 0.0;
    double n_phonon_plain = 0.0; // g_ck = 0
    double n_phonon_ck = 0.0;    // g_ck of the system
};

// |B0|^2 against |A0|^2 with and without the cross-Kerr term. x_grid must be
// sorted and non-negative.
std::vector<PhononPhotonRow> phonon_photon_curve(const SystemParams& sys, std::span<const double> x_grid);

// A run of roots followed continuously through the sweep with one stability
// verdict. Branches start and end at folds, at a stability change or at the
// ends of the sweep.
struct SweepBranch {
    int id = 0;
    std::vector<double> sweep_values; // control power [W], in sweep order
    std::vector<double> x;
    Verdict stability = Verdict::Stable;
    std::vector<double> fold_points; // powers at which the branch is born or dies at a fold
};

struct FoldPoint {
    double power = 0.0;        // centre of the final bracket
    double lower = 0.0;        // bracket, ascending power
    double upper = 0.0;
    std::size_t roots_below = 0;
    std::size_t roots_above = 0;
};

struct SweepOptions {
    double max_jump = 0.1;        // relative change of x allowed along a branch
    double fold_tolerance = 1e-4; // relative bracket width in power
};

struct PowerSweep {
    // Every evaluated power in sweep order: the requested ones plus those
    // inserted while refining folds and steep stretches.
    std::vector<double> powers;
    std::vector<std::size_t> root_counts;
    std::vector<SweepBranch> branches;
    std::vector<FoldPoint> folds;     // ascending power
    std::vector<double> stability_changes; // ascending power, midpoint of the bracket
};

// powers: strictly monotone (ascending or descending); non-positive powers
// are skipped. omega_c converts power to the control amplitude.
PowerSweep power_sweep(const SystemParams& sys, double delta_a, std::span<const double> powers, double omega_c,
                       SweepOptions opts = {});

// Lowest fold at which the number of roots increases with power.
std::optional<FoldPoint> first_fold(const PowerSweep& sweep);

// 0 to max_power in n points, the default scan being 0-50 nW with 2001 points.
std::vector<double> power_grid(double max_power = 50e-9, std::size_t n = 2001);

struct ShiftRow {
    double g_ck = 0.0;
    double delta_p0 = 0.0; // rad/s
};

struct ShiftScan {
    std::vector<ShiftRow> rows;
    bool monotone = false;  // strictly, in either direction
    int direction = 0;      // +1 increasing, -1 decreasing, 0 neither
};

ShiftScan ck_shift_scan(const SystemParams& sys, const DriveParams& drive, std::span<const double> g_ck_values,
                        BranchSelect branch = {}, ResponseOptions opts = {}, ZeroScanOptions scan = {});

struct RobustnessEntry {
    double g_ck = 0.0;
    double fold_power_first = 0.0;  // first fold at delta_first
    double fold_power_second = 0.0;
    double x_first = 0.0;           // upper root born at that fold
    double x_second = 0.0;
    double displacement = 0.0;      // |x_first - x_second| / max(x_first, x_second)
    double absolute_displacement = 0.0;
};

struct RobustnessReport {
    RobustnessEntry plain; // g_ck = 0
    RobustnessEntry ck;    // g_ck of the system
    bool ck_more_robust = false; // ck.displacement < plain.displacement
};

// Compares where the upper branch is born at the first fold for two control
// detunings, with and without the cross-Kerr term. The control frequency is
// omega_a - delta_a for each detuning. Throws NotFoundError if either sweep
// has no fold.
RobustnessReport detuning_robustness(const SystemParams& sys, std::span<const double> powers, double delta_first,
                                     double delta_second, SweepOptions opts = {});

} // namespace optokerr
