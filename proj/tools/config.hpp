#pragma once

// Run configuration for the command-line tool.
//
// Plain-text `key = value` lines grouped under [section] headers; `#` starts
// a comment. Rates are in rad/s unless the key carries a unit marker:
//   name_over_2pi_hz   value in Hz, multiplied by 2 pi
//   name_over_omega_m  value in units of the mechanical frequency
//   g_ck_over_g0       cross-Kerr coupling relative to g0
// Unknown keys, duplicate keys and unknown sections are errors.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace optokerr::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, int column, const std::string& message);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

enum class OutputFormat { Csv, Json };

struct SystemBlock {
    double omega_a = 0.0;
    double omega_m = 0.0;
    double g0 = 0.0;
    double g_ck = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    bool operator==(const SystemBlock&) const = default;
};

struct DriveBlock {
    double delta_a = 0.0;
    std::optional<double> power_w; // control power; converted at omega_c = omega_a - delta_a
    std::optional<double> eps_c;    // control amplitude, 1/s
    double eps_p = 0.0;
    bool operator==(const DriveBlock&) const = default;
};

struct SpectrumBlock {
    double delta_p_min = 0.0; // rad/s, offset from omega_m
    double delta_p_max = 0.0;
    std::int64_t points = 1001;
    std::optional<std::int64_t> branch; // none: lowest stable root
    bool aminus_probe_term = true;
    double zero_half_window = 0.5; // units of omega_m
    std::int64_t zero_points = 2001;
    bool operator==(const SpectrumBlock&) const = default;
};

enum class SweepMode { Power, CkShift, Robustness, Phonon };

struct SweepBlock {
    SweepMode mode = SweepMode::Power;
    double power_min_w = 0.0;
    double power_max_w = 50e-9;
    std::int64_t points = 2001;
    std::vector<double> g_ck_values; // rad/s
    std::optional<double> delta_a_second;
    std::optional<double> photon_max;
    std::int64_t photon_points = 2001;
    bool operator==(const SweepBlock&) const = default;
};

enum class SettleMode { Single, Ensemble };

struct SettleBlock {
    SettleMode mode = SettleMode::Single;
    double t_end_s = 0.0;            // 0: library default
    double a0_re = 0.0, a0_im = 0.0; // single run start
    double b0_re = 0.0, b0_im = 0.0;
    std::int64_t ensemble_size = 50;
    std::uint64_t seed = 20240611;
    std::int64_t samples = 1001;     // trajectory samples, single mode
    double rtol = 1e-10;
    double atol = 1e-13;
    double threshold = 1e-8;
    std::int64_t max_steps = 20'000'000;
    bool operator==(const SettleBlock&) const = default;
};

struct RunConfig {
    SystemBlock system;
    DriveBlock drive;
    SpectrumBlock spectrum;
    SweepBlock sweep;
    SettleBlock settle;
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    bool operator==(const RunConfig&) const = default;
};

// source names the text in diagnostics (usually the file path).
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

// Canonical form: rad/s keys, 17 significant digits. Parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

} // namespace optokerr::cli
