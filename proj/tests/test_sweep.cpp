#include <doctest.h>

#include "oracle.hpp"

#include <optokerr/error.hpp>
#include <optokerr/sweep.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace optokerr;
using oracle::Reference;

namespace {

PowerSweep reference_sweep(double g_ck, double delta_a_over_wm, std::span<const double> powers) {
    const double da = delta_a_over_wm * Reference::omega_m;
    return power_sweep(oracle::reference_system(g_ck), da, powers, Reference::omega_a - da);
}

std::size_t max_count(const PowerSweep& s) {
    return *std::max_element(s.root_counts.begin(), s.root_counts.end());
}

double analytic_plain_fold(double delta_a_over_wm) {
    const double da = delta_a_over_wm * Reference::omega_m;
    const auto e2 = oracle::plain_fold_eps2(Reference::omega_m, Reference::g0, Reference::kappa, Reference::gamma, da);
    return e2 > 0 ? oracle::power_of_eps(std::sqrt(static_cast<double>(e2)), da) : 0.0;
}

} // namespace

TEST_CASE("phonon curves") {
    const double g_ck = 1e-3 * Reference::g0;
    const auto sys = oracle::reference_system(g_ck);
    const double x_end = 2.0 * Reference::omega_m / g_ck;
    std::vector<double> grid;
    for (int k = 0; k <= 20000; ++k)
        grid.push_back(x_end * k / 20000.0);
    const auto rows = phonon_photon_curve(sys, grid);
    REQUIRE(rows.size() == grid.size());
    CHECK(rows[0].x == 0.0);
    CHECK(rows[0].n_phonon_plain == 0.0);
    CHECK(rows[0].n_phonon_ck == 0.0);
    std::size_t argmax = 0, plain_drops = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].x == grid[k]);
        CHECK(rows[k].n_phonon_ck == doctest::Approx(phonon_of_photon(grid[k], sys)).epsilon(1e-15));
        CHECK(rows[k].n_phonon_plain ==
              doctest::Approx(phonon_of_photon(grid[k], sys.with_g_ck(0.0))).epsilon(1e-15));
        if (k > 0 && rows[k].n_phonon_plain <= rows[k - 1].n_phonon_plain)
            ++plain_drops;
        if (rows[k].n_phonon_ck > rows[argmax].n_phonon_ck)
            argmax = k;
    }
    CHECK(plain_drops == 0);
    CHECK(argmax > 0);
    CHECK(argmax + 1 < rows.size());
    CHECK(std::abs(rows[argmax].x - Reference::omega_m / g_ck) <= 2.0 * Reference::gamma / g_ck + x_end / 20000.0);

    CHECK_THROWS_AS(phonon_photon_curve(sys, std::vector<double>{1.0, 0.5}), DomainError);
    CHECK_THROWS_AS(phonon_photon_curve(sys, std::vector<double>{-1.0}), DomainError);
}

TEST_CASE("sweep keeps every root and links them consistently") {
    const auto grid = power_grid();
    for (double g_ck : {0.0, 1e-3 * Reference::g0}) {
        const auto sys = oracle::reference_system(g_ck);
        const auto sw = reference_sweep(g_ck, 1.0, grid);
        REQUIRE(sw.powers.size() == sw.root_counts.size());
        CHECK(sw.powers.size() >= grid.size() - 1); // P = 0 is skipped
        for (std::size_t k = 0; k < sw.powers.size(); ++k) {
            const double eps = oracle::eps_of_power(sw.powers[k]);
            CHECK(sw.root_counts[k] == steady_photon_numbers(sys, Reference::delta_a, eps).size());
        }
        // Every (power, root) appears in exactly one branch.
        std::size_t members = 0;
        for (const auto& b : sw.branches) {
            REQUIRE(b.x.size() == b.sweep_values.size());
            members += b.x.size();
            std::set<double> seen(b.sweep_values.begin(), b.sweep_values.end());
            CHECK(seen.size() == b.sweep_values.size());
            for (std::size_t k = 1; k < b.x.size(); ++k) {
                CHECK(b.sweep_values[k] > b.sweep_values[k - 1]);
                CHECK(std::abs(b.x[k] - b.x[k - 1]) < 0.1 * std::max(b.x[k], b.x[k - 1]));
            }
            for (std::size_t k = 0; k < b.x.size(); ++k) {
                const double eps = oracle::eps_of_power(b.sweep_values[k]);
                const auto ss = steady_state_from_photon(b.x[k], sys, Reference::delta_a, eps);
                CHECK(classify(ss, sys).verdict == b.stability);
            }
        }
        std::size_t total = 0;
        for (auto c : sw.root_counts)
            total += c;
        CHECK(members == total);
    }
}

TEST_CASE("sweeping down gives the same branches as sweeping up") {
    auto up = power_grid(50e-9, 401);
    std::vector<double> down(up.rbegin(), up.rend());
    for (double g_ck : {0.0, 1e-3 * Reference::g0}) {
        const auto a = reference_sweep(g_ck, 1.0, up);
        const auto b = reference_sweep(g_ck, 1.0, down);
        REQUIRE(a.folds.size() == b.folds.size());
        for (std::size_t k = 0; k < a.folds.size(); ++k) {
            CHECK(a.folds[k].power == doctest::Approx(b.folds[k].power).epsilon(1e-4));
            CHECK(a.folds[k].roots_below == b.folds[k].roots_below);
            CHECK(a.folds[k].roots_above == b.folds[k].roots_above);
        }
        REQUIRE(a.branches.size() == b.branches.size());
        // Compare as sets of (power, x, verdict) triples.
        auto triples = [](const PowerSweep& s) {
            std::set<std::tuple<double, double, int>> out;
            for (const auto& br : s.branches)
                for (std::size_t k = 0; k < br.x.size(); ++k)
                    out.insert({br.sweep_values[k], br.x[k], static_cast<int>(br.stability)});
            return out;
        };
        CHECK(triples(a) == triples(b));
        REQUIRE(a.stability_changes.size() == b.stability_changes.size());
    }
}

TEST_CASE("without cross-Kerr: bistability at Delta_a = omega_m, folds match the cubic") {
    const auto sw = reference_sweep(0.0, 1.0, power_grid());
    CHECK(max_count(sw) == 3);
    const auto fold = first_fold(sw);
    REQUIRE(fold.has_value());
    const double analytic = analytic_plain_fold(1.0);
    CHECK(fold->lower <= analytic);
    CHECK(fold->upper >= analytic);
    CHECK((fold->upper - fold->lower) <= 1e-4 * fold->power);
    CHECK(fold->power == doctest::Approx(3.3754882812499999e-09).epsilon(1e-12));
}

TEST_CASE("without cross-Kerr at Delta_a = 0.1 omega_m the cubic still folds inside the scan") {
    // The S-curve needs Delta_a > sqrt(3) kappa; at 0.1 omega_m that holds.
    REQUIRE(0.1 * Reference::omega_m > std::sqrt(3.0) * Reference::kappa);
    const double analytic = analytic_plain_fold(0.1);
    CHECK(analytic > 0.0);
    CHECK(analytic < 50e-9);
    const auto sw = reference_sweep(0.0, 0.1, power_grid());
    CHECK(max_count(sw) == 3);
    const auto fold = first_fold(sw);
    REQUIRE(fold.has_value());
    CHECK(fold->lower <= analytic);
    CHECK(fold->upper >= analytic);
}

TEST_CASE("below sqrt(3) kappa the cavity is monostable") {
    REQUIRE(0.01 * Reference::omega_m < std::sqrt(3.0) * Reference::kappa);
    CHECK(analytic_plain_fold(0.01) == 0.0);
    const auto sw = reference_sweep(0.0, 0.01, power_grid());
    CHECK(max_count(sw) == 1);
    CHECK(sw.folds.empty());
    CHECK_FALSE(first_fold(sw).has_value());
    std::size_t spanning = 0;
    for (const auto& b : sw.branches)
        spanning += b.x.size();
    CHECK(spanning == sw.powers.size());
}

TEST_CASE("cross-Kerr coupling lowers the onset and opens a five-root window") {
    const auto plain = reference_sweep(0.0, 1.0, power_grid());
    const auto ck = reference_sweep(1e-3 * Reference::g0, 1.0, power_grid());
    CHECK(max_count(ck) == 5);
    const auto f0 = first_fold(plain);
    const auto f1 = first_fold(ck);
    REQUIRE(f0.has_value());
    REQUIRE(f1.has_value());
    CHECK(f1->power < f0->power);
    REQUIRE(ck.folds.size() == 2);
    CHECK(ck.folds[0].roots_below == 1);
    CHECK(ck.folds[0].roots_above == 3);
    CHECK(ck.folds[1].roots_below == 3);
    CHECK(ck.folds[1].roots_above == 5);
    CHECK(ck.folds[0].power == doctest::Approx(3.926239013671875e-11).epsilon(1e-12));
    CHECK(ck.folds[1].power == doctest::Approx(4.601898193359374e-11).epsilon(1e-12));
}

TEST_CASE("power sweep input handling") {
    const auto sys = oracle::reference_system(0.0);
    const double wc = Reference::omega_a - Reference::delta_a;
    CHECK_THROWS_AS(power_sweep(sys, Reference::delta_a, std::vector<double>{1e-9, 2e-9, 1.5e-9}, wc), DomainError);
    const auto one = power_sweep(sys, Reference::delta_a, std::vector<double>{0.0, 1e-9}, wc);
    REQUIRE(one.powers.size() == 1);
    CHECK(one.powers[0] == 1e-9);
    CHECK_THROWS_AS(power_grid(10.0, 1), DomainError);
    const auto g = power_grid(1.0, 5);
    CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("detuning robustness") {
    const auto sys = oracle::reference_system(1e-3 * Reference::g0);
    const auto grid = power_grid();
    SUBCASE("identical detunings give no displacement") {
        const auto r = detuning_robustness(sys, grid, Reference::omega_m, Reference::omega_m);
        CHECK(r.plain.displacement == 0.0);
        CHECK(r.ck.displacement == 0.0);
        CHECK_FALSE(r.ck_more_robust);
    }
    SUBCASE("cross-Kerr branch moves less between omega_m and 0.8 omega_m") {
        const auto r = detuning_robustness(sys, grid, Reference::omega_m, 0.8 * Reference::omega_m);
        CHECK(r.ck_more_robust);
        CHECK(r.ck.displacement < r.plain.displacement);
        CHECK(r.plain.g_ck == 0.0);
        CHECK(r.ck.g_ck == sys.g_ck());
        CHECK(r.plain.displacement == doctest::Approx(0.19998239583173938).epsilon(1e-9));
        CHECK(r.ck.displacement == doctest::Approx(0.010076943425851245).epsilon(1e-9));
        CHECK(r.plain.x_first == doctest::Approx(12534361185.334608).epsilon(1e-9));
        CHECK(r.ck.x_first == doctest::Approx(145793256.66004145).epsilon(1e-9));
    }
    SUBCASE("no fold at one detuning is an error") {
        CHECK_THROWS_AS(detuning_robustness(sys, grid, Reference::omega_m, 0.01 * Reference::omega_m),
                        NotFoundError);
    }
}

TEST_CASE("zero-absorption shift scan") {
    const auto sys = oracle::reference_system(0.0);
    const DriveParams d({Reference::delta_a, oracle::eps_of_power(9.6e-9), 0.0, 0.0});
    const std::vector<double> values{0.0, 0.1, 0.1, 0.2, 0.25};
    const auto scan = ck_shift_scan(sys, d, values);
    REQUIRE(scan.rows.size() == values.size());
    CHECK(scan.rows[1].delta_p0 == scan.rows[2].delta_p0);
    CHECK(scan.rows[1].g_ck == 0.1);
    // A repeated value is not strictly monotone.
    CHECK_FALSE(scan.monotone);
    CHECK(scan.direction == 0);

    const std::vector<double> distinct{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    const auto strict = ck_shift_scan(sys, d, distinct);
    CHECK(strict.monotone);
    CHECK(strict.direction == -1);
    for (const auto& r : strict.rows) {
        const double direct = zero_absorption_point(sys.with_g_ck(r.g_ck), d);
        CHECK(r.delta_p0 == direct);
    }
    CHECK_THROWS_AS(ck_shift_scan(sys, d, std::vector<double>{0.2, 0.1}), DomainError);
}
