#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace optokerr::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
    int key_column = 0;
    int value_column = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string trim(const std::string& s, std::size_t& offset) {
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t'))
        ++b;
    std::size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
        --e;
    offset = b;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty())
        return false;
    for (char c : k)
        if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Parser {
public:
    Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, int column, const std::string& msg) const {
        throw ConfigError(source_, line, column, msg);
    }

    std::vector<Section> split(const std::string& text) const {
        std::vector<Section> sections;
        std::set<std::string> seen;
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
            std::size_t off = 0;
            const std::string t = trim(body, off);
            if (t.empty())
                continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    fail(line, static_cast<int>(off + t.size()), "expected ']' to close the section header");
                std::size_t inner_off = 0;
                const std::string name = trim(t.substr(1, t.size() - 2), inner_off);
                static const std::set<std::string> known{"system", "drive", "spectrum", "sweep", "settle", "output"};
                if (!known.count(name))
                    fail(line, static_cast<int>(off + 2 + inner_off), "unknown section [" + name + "]");
                if (!seen.insert(name).second)
                    fail(line, static_cast<int>(off + 1), "section [" + name + "] appears twice");
                sections.push_back({name, line, {}});
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                fail(line, static_cast<int>(off + 1), "expected 'key = value'");
            if (sections.empty())
                fail(line, static_cast<int>(off + 1), "key outside of any [section]");
            std::size_t koff = 0;
            std::size_t voff = 0;
            const std::string key = trim(t.substr(0, eq), koff);
            const std::string value = trim(t.substr(eq + 1), voff);
            if (!valid_key(key))
                fail(line, static_cast<int>(off + koff + 1), "malformed key '" + key + "'");
            if (value.empty())
                fail(line, static_cast<int>(off + eq + 2), "missing value for '" + key + "'");
            for (const auto& e : sections.back().entries)
                if (e.key == key)
                    fail(line, static_cast<int>(off + koff + 1), "duplicate key '" + key + "'");
            sections.back().entries.push_back(
                {key, value, line, static_cast<int>(off + koff + 1), static_cast<int>(off + eq + 2 + voff)});
        }
        return sections;
    }

    double number(const Entry& e) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            fail(e.line, e.value_column, "'" + e.value + "' is not a number");
        if (errno == ERANGE || !std::isfinite(v))
            fail(e.line, e.value_column, "'" + e.value + "' is out of range");
        return v;
    }

    std::int64_t integer(const Entry& e, std::int64_t min_value) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(begin, &end, 10);
        if (end == begin || *end != '\0' || errno == ERANGE)
            fail(e.line, e.value_column, "'" + e.value + "' is not an integer");
        if (v < min_value)
            fail(e.line, e.value_column, "'" + e.key + "' must be >= " + std::to_string(min_value));
        return v;
    }

    std::uint64_t unsigned_integer(const Entry& e) const {
        const char* begin = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        if (e.value.front() == '-')
            fail(e.line, e.value_column, "'" + e.key + "' must be non-negative");
        const unsigned long long v = std::strtoull(begin, &end, 10);
        if (end == begin || *end != '\0' || errno == ERANGE)
            fail(e.line, e.value_column, "'" + e.value + "' is not an unsigned integer");
        return v;
    }

    bool boolean(const Entry& e) const {
        static const std::map<std::string, bool> words{{"true", true},  {"false", false}, {"yes", true},
                                                       {"no", false},   {"on", true},     {"off", false},
                                                       {"1", true},     {"0", false}};
        const auto it = words.find(e.value);
        if (it == words.end())
            fail(e.line, e.value_column, "'" + e.value + "' is not a boolean");
        return it->second;
    }

    std::vector<double> numbers(const Entry& e) const {
        std::vector<double> out;
        std::size_t start = 0;
        while (start <= e.value.size()) {
            const auto comma = e.value.find(',', start);
            const std::string piece = e.value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            std::size_t poff = 0;
            Entry sub = e;
            sub.value = trim(piece, poff);
            sub.value_column = e.value_column + static_cast<int>(start + poff);
            if (sub.value.empty())
                fail(e.line, sub.value_column, "empty list element");
            out.push_back(number(sub));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        return out;
    }

private:
    std::string source_;
};

// Resolves the keys of one section. Each quantity may be given in one of
// several unit forms; giving two forms of the same quantity is an error.
class SectionReader {
public:
    SectionReader(const Parser& p, const Section* s) : p_(p), s_(s) {}

    const Entry* take(const std::string& key) {
        if (!s_)
            return nullptr;
        for (const auto& e : s_->entries) {
            if (e.key == key) {
                used_.insert(key);
                return &e;
            }
        }
        return nullptr;
    }

    // First present form wins; a second present form is an error.
    const Entry* one_of(std::initializer_list<std::string> keys) {
        const Entry* found = nullptr;
        for (const auto& k : keys) {
            const Entry* e = take(k);
            if (e && found)
                p_.fail(e->line, e->key_column, "'" + e->key + "' conflicts with '" + found->key + "'");
            if (e)
                found = e;
        }
        return found;
    }

    // Rate given as name (rad/s) or name_over_2pi_hz.
    std::optional<double> rate(const std::string& name) {
        const Entry* e = one_of({name, name + "_over_2pi_hz"});
        if (!e)
            return std::nullopt;
        const double v = p_.number(*e);
        return e->key == name ? v : kTwoPi * v;
    }

    void finish() const {
        if (!s_)
            return;
        for (const auto& e : s_->entries)
            if (!used_.count(e.key))
                p_.fail(e.line, e.key_column, "unknown key '" + e.key + "' in [" + s_->name + "]");
    }

    [[noreturn]] void missing(const std::string& what) const {
        p_.fail(s_ ? s_->line : 1, 1, "[" + (s_ ? s_->name : std::string("?")) + "] is missing " + what);
    }

    const Section* section() const { return s_; }

private:
    const Parser& p_;
    const Section* s_;
    std::set<std::string> used_;
};

const Section* find_section(const std::vector<Section>& sections, const std::string& name) {
    for (const auto& s : sections)
        if (s.name == name)
            return &s;
    return nullptr;
}

} // namespace

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

RunConfig parse_config(const std::string& text, const std::string& source) {
    const Parser p(source);
    const auto sections = p.split(text);
    RunConfig cfg;

    SectionReader sys(p, find_section(sections, "system"));
    if (!sys.section())
        throw ConfigError(source, 1, 1, "missing [system] section");
    auto required = [&](SectionReader& r, const std::string& name) {
        const auto v = r.rate(name);
        if (!v)
            r.missing("'" + name + "' (or '" + name + "_over_2pi_hz')");
        return *v;
    };
    cfg.system.omega_a = required(sys, "omega_a");
    cfg.system.omega_m = required(sys, "omega_m");
    cfg.system.g0 = required(sys, "g0");
    cfg.system.kappa = required(sys, "kappa");
    cfg.system.gamma = required(sys, "gamma");
    if (const Entry* e = sys.one_of({"g_ck", "g_ck_over_2pi_hz", "g_ck_over_g0"})) {
        const double v = p.number(*e);
        cfg.system.g_ck = e->key == "g_ck" ? v : e->key == "g_ck_over_g0" ? v * cfg.system.g0 : kTwoPi * v;
    }
    sys.finish();
    const double wm = cfg.system.omega_m;

    // name (rad/s), name_over_2pi_hz or name_over_omega_m.
    auto detuning = [&](SectionReader& r, const std::string& name) -> std::optional<double> {
        const Entry* e = r.one_of({name, name + "_over_2pi_hz", name + "_over_omega_m"});
        if (!e)
            return std::nullopt;
        const double v = p.number(*e);
        if (e->key == name)
            return v;
        return e->key == name + "_over_omega_m" ? v * wm : kTwoPi * v;
    };

    SectionReader drive(p, find_section(sections, "drive"));
    if (!drive.section())
        throw ConfigError(source, 1, 1, "missing [drive] section");
    const auto delta_a = detuning(drive, "delta_a");
    if (!delta_a)
        drive.missing("'delta_a' (or '_over_2pi_hz' / '_over_omega_m')");
    cfg.drive.delta_a = *delta_a;
    if (const Entry* e = drive.one_of({"power_w", "eps_c"})) {
        const double v = p.number(*e);
        if (e->key == "power_w")
            cfg.drive.power_w = v;
        else
            cfg.drive.eps_c = v;
    }
    if (const Entry* e = drive.take("eps_p"))
        cfg.drive.eps_p = p.number(*e);
    drive.finish();

    SectionReader spec(p, find_section(sections, "spectrum"));
    cfg.spectrum.delta_p_min = detuning(spec, "delta_p_min").value_or(-0.15 * wm);
    cfg.spectrum.delta_p_max = detuning(spec, "delta_p_max").value_or(0.15 * wm);
    if (const Entry* e = spec.take("points"))
        cfg.spectrum.points = p.integer(*e, 1);
    if (const Entry* e = spec.take("branch")) {
        if (e->value != "auto")
            cfg.spectrum.branch = p.integer(*e, 0);
    }
    if (const Entry* e = spec.take("aminus_probe_term"))
        cfg.spectrum.aminus_probe_term = p.boolean(*e);
    if (const Entry* e = spec.take("zero_half_window_over_omega_m"))
        cfg.spectrum.zero_half_window = p.number(*e);
    if (const Entry* e = spec.take("zero_points"))
        cfg.spectrum.zero_points = p.integer(*e, 2);
    spec.finish();
    if (spec.section() && cfg.spectrum.delta_p_max < cfg.spectrum.delta_p_min)
        p.fail(spec.section()->line, 1, "delta_p_max must not be below delta_p_min");

    SectionReader sweep(p, find_section(sections, "sweep"));
    if (const Entry* e = sweep.take("mode")) {
        static const std::map<std::string, SweepMode> modes{{"power", SweepMode::Power},
                                                            {"ck_shift", SweepMode::CkShift},
                                                            {"robustness", SweepMode::Robustness},
                                                            {"phonon", SweepMode::Phonon}};
        const auto it = modes.find(e->value);
        if (it == modes.end())
            p.fail(e->line, e->value_column, "sweep mode must be power, ck_shift, robustness or phonon");
        cfg.sweep.mode = it->second;
    }
    if (const Entry* e = sweep.take("power_min_w"))
        cfg.sweep.power_min_w = p.number(*e);
    if (const Entry* e = sweep.take("power_max_w"))
        cfg.sweep.power_max_w = p.number(*e);
    if (const Entry* e = sweep.take("points"))
        cfg.sweep.points = p.integer(*e, 2);
    if (const Entry* e = sweep.one_of({"g_ck_values", "g_ck_over_g0_values"})) {
        cfg.sweep.g_ck_values = p.numbers(*e);
        if (e->key == "g_ck_over_g0_values")
            for (auto& v : cfg.sweep.g_ck_values)
                v *= cfg.system.g0;
    }
    cfg.sweep.delta_a_second = detuning(sweep, "delta_a_second");
    if (const Entry* e = sweep.take("photon_max"))
        cfg.sweep.photon_max = p.number(*e);
    if (const Entry* e = sweep.take("photon_points"))
        cfg.sweep.photon_points = p.integer(*e, 2);
    sweep.finish();

    SectionReader settle(p, find_section(sections, "settle"));
    if (const Entry* e = settle.take("mode")) {
        if (e->value == "single")
            cfg.settle.mode = SettleMode::Single;
        else if (e->value == "ensemble")
            cfg.settle.mode = SettleMode::Ensemble;
        else
            p.fail(e->line, e->value_column, "settle mode must be single or ensemble");
    }
    if (const Entry* e = settle.one_of({"t_end_s", "t_end_periods"})) {
        const double v = p.number(*e);
        cfg.settle.t_end_s = e->key == "t_end_s" ? v : v * kTwoPi / wm;
    }
    const std::pair<const char*, double*> amplitudes[] = {{"a0_re", &cfg.settle.a0_re},
                                                          {"a0_im", &cfg.settle.a0_im},
                                                          {"b0_re", &cfg.settle.b0_re},
                                                          {"b0_im", &cfg.settle.b0_im},
                                                          {"rtol", &cfg.settle.rtol},
                                                          {"atol", &cfg.settle.atol},
                                                          {"threshold", &cfg.settle.threshold}};
    for (const auto& [key, target] : amplitudes)
        if (const Entry* e = settle.take(key))
            *target = p.number(*e);
    if (const Entry* e = settle.take("ensemble_size"))
        cfg.settle.ensemble_size = p.integer(*e, 1);
    if (const Entry* e = settle.take("seed"))
        cfg.settle.seed = p.unsigned_integer(*e);
    if (const Entry* e = settle.take("samples"))
        cfg.settle.samples = p.integer(*e, 2);
    if (const Entry* e = settle.take("max_steps"))
        cfg.settle.max_steps = p.integer(*e, 1);
    settle.finish();

    SectionReader output(p, find_section(sections, "output"));
    if (const Entry* e = output.take("dir"))
        cfg.out_dir = e->value;
    if (const Entry* e = output.take("format")) {
        if (e->value == "csv")
            cfg.format = OutputFormat::Csv;
        else if (e->value == "json")
            cfg.format = OutputFormat::Json;
        else
            p.fail(e->line, e->value_column, "format must be csv or json");
    }
    output.finish();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path, 0, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream o;
    auto kv = [&](const char* key, double v) { o << key << " = " << format_double(v) << "\n"; };
    auto ki = [&](const char* key, long long v) { o << key << " = " << v << "\n"; };

    o << "[system]\n";
    kv("omega_a", cfg.system.omega_a);
    kv("omega_m", cfg.system.omega_m);
    kv("g0", cfg.system.g0);
    kv("g_ck", cfg.system.g_ck);
    kv("kappa", cfg.system.kappa);
    kv("gamma", cfg.system.gamma);

    o << "\n[drive]\n";
    kv("delta_a", cfg.drive.delta_a);
    if (cfg.drive.power_w)
        kv("power_w", *cfg.drive.power_w);
    if (cfg.drive.eps_c)
        kv("eps_c", *cfg.drive.eps_c);
    kv("eps_p", cfg.drive.eps_p);

    o << "\n[spectrum]\n";
    kv("delta_p_min", cfg.spectrum.delta_p_min);
    kv("delta_p_max", cfg.spectrum.delta_p_max);
    ki("points", cfg.spectrum.points);
    if (cfg.spectrum.branch)
        ki("branch", *cfg.spectrum.branch);
    else
        o << "branch = auto\n";
    o << "aminus_probe_term = " << (cfg.spectrum.aminus_probe_term ? "true" : "false") << "\n";
    kv("zero_half_window_over_omega_m", cfg.spectrum.zero_half_window);
    ki("zero_points", cfg.spectrum.zero_points);

    o << "\n[sweep]\n";
    static const char* mode_names[] = {"power", "ck_shift", "robustness", "phonon"};
    o << "mode = " << mode_names[static_cast<int>(cfg.sweep.mode)] << "\n";
    kv("power_min_w", cfg.sweep.power_min_w);
    kv("power_max_w", cfg.sweep.power_max_w);
    ki("points", cfg.sweep.points);
    if (!cfg.sweep.g_ck_values.empty()) {
        o << "g_ck_values = ";
        for (std::size_t i = 0; i < cfg.sweep.g_ck_values.size(); ++i)
            o << (i ? ", " : "") << format_double(cfg.sweep.g_ck_values[i]);
        o << "\n";
    }
    if (cfg.sweep.delta_a_second)
        kv("delta_a_second", *cfg.sweep.delta_a_second);
    if (cfg.sweep.photon_max)
        kv("photon_max", *cfg.sweep.photon_max);
    ki("photon_points", cfg.sweep.photon_points);

    o << "\n[settle]\n";
    o << "mode = " << (cfg.settle.mode == SettleMode::Single ? "single" : "ensemble") << "\n";
    kv("t_end_s", cfg.settle.t_end_s);
    kv("a0_re", cfg.settle.a0_re);
    kv("a0_im", cfg.settle.a0_im);
    kv("b0_re", cfg.settle.b0_re);
    kv("b0_im", cfg.settle.b0_im);
    ki("ensemble_size", cfg.settle.ensemble_size);
    o << "seed = " << cfg.settle.seed << "\n";
    ki("samples", cfg.settle.samples);
    kv("rtol", cfg.settle.rtol);
    kv("atol", cfg.settle.atol);
    kv("threshold", cfg.settle.threshold);
    ki("max_steps", cfg.settle.max_steps);

    o << "\n[output]\n";
    o << "dir = " << cfg.out_dir << "\n";
    o << "format = " << (cfg.format == OutputFormat::Csv ? "csv" : "json") << "\n";
    return o.str();
}

} // namespace optokerr::cli
