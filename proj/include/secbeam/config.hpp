#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "secbeam/units.hpp"

namespace secbeam {

// Thrown on malformed config text or an out-of-range value; `key` names the
// offending entry.
struct ConfigError : std::runtime_error {
    ConfigError(std::string key_, const std::string& what_)
        : std::runtime_error(what_), key(std::move(key_)) {}
    std::string key;
};

// All scenario constants. Powers/variances are stored in watts, rates in
// nats/s/Hz; the text format also accepts "_dbm"-suffixed variants for the
// power/noise keys.
struct NetworkConfig {
    // Topology.
    int K = 3;     // cells
    int N_k = 4;   // UEs per cell
    int N1_k = 2;  // zone-1 (inner-disc, energy-harvesting) UEs per cell
    int M = 4;     // BS antennas
    int N_ev = 2;  // eavesdropper antennas

    // Power budgets and receiver model.
    double Pk_max = dbm_to_watt(26.0);    // per-BS budget
    double P_max = dbm_to_watt(30.0);     // network budget
    double e_min = dbm_to_watt(-20.0);    // harvested-energy threshold per zone-1 UE
    double zeta = 0.5;                    // energy conversion efficiency, in (0,1)
    double sigma_a2 = dbm_to_watt(-90.0); // antenna noise variance

    // Channel uncertainty levels (dimensionless, scale the squared norms).
    double eps0 = 0.005; // cross-cell UE links and eavesdropper links
    double eps1 = 1e-3;  // serving-cell UE links

    // Geometry and fading.
    double cell_radius = 40.0;
    double inner_radius = 15.0;
    double pathloss_exp = 3.0;
    double rician_K = 10.0; // linear Rician factor

    // Energy-efficiency power model.
    double xi = 0.2;  // amplifier efficiency, in (0,1]
    double P_A = 0.6; // per-antenna dissipation (watts)
    double P_c = 2.5; // circuit power (watts)

    // Rate thresholds (nats/s/Hz).
    double r_qos = 0.1 * 0.6931471805599453; // per-UE secrecy QoS floor (0.1 bits)
    double r_min = 0.1;                      // per-UE rate target used by the initializer

    // Selects the index set of the inner energy-beam sums in the worst-case
    // eavesdropper noise floor: 0 = the eavesdropper's own cell zone-1 set,
    // 1 = each transmitting cell's zone-1 set. The two coincide under the
    // uniform per-cell zone-1 count used here; the knob is kept documented.
    int jam_sum_source_cell = 0;

    std::uint64_t seed = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "config parse error: key '" + key + "' has non-numeric value '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(key, "config parse error: trailing characters in value '" + text + "' for key '" + key + "'");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "config parse error: key '" + key + "' has non-integer value '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(key, "config parse error: trailing characters in value '" + text + "' for key '" + key + "'");
    return v;
}

} // namespace detail

// Checks every documented invariant; throws ConfigError naming the first
// violated key.
inline void validate_config(const NetworkConfig& cfg) {
    auto fail = [](const char* key, const std::string& why) {
        throw ConfigError(key, std::string("invariant violation (") + key + "): " + why);
    };
    if (cfg.K < 1) fail("K", "cell count must be >= 1");
    if (cfg.M < 1) fail("M", "antenna count must be >= 1");
    if (cfg.N_ev < 1) fail("N_ev", "eavesdropper antenna count must be >= 1");
    if (cfg.N_k < 1) fail("N_k", "UE count per cell must be >= 1");
    if (cfg.N1_k < 1 || cfg.N1_k > cfg.N_k) fail("N1_k", "zone-1 count must satisfy 0 < N1_k <= N_k");
    if (!(cfg.Pk_max > 0.0)) fail("Pk_max", "per-BS power budget must be > 0");
    if (!(cfg.P_max > 0.0)) fail("P_max", "network power budget must be > 0");
    if (!(cfg.e_min > 0.0)) fail("e_min", "harvested-energy threshold must be > 0");
    if (!(cfg.sigma_a2 > 0.0)) fail("sigma_a2", "noise variance must be > 0");
    if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0)) fail("zeta", "energy conversion efficiency must lie in (0,1)");
    if (!(cfg.xi > 0.0 && cfg.xi <= 1.0)) fail("xi", "amplifier efficiency must lie in (0,1]");
    if (!(cfg.eps0 >= 0.0)) fail("eps0", "uncertainty level must be >= 0");
    if (!(cfg.eps1 >= 0.0)) fail("eps1", "uncertainty level must be >= 0");
    if (!(cfg.cell_radius > 0.0)) fail("cell_radius", "radius must be > 0");
    if (!(cfg.inner_radius > 0.0)) fail("inner_radius", "radius must be > 0");
    if (!(cfg.inner_radius < cfg.cell_radius)) fail("inner_radius", "inner radius must be < cell radius");
    if (!(cfg.pathloss_exp > 0.0)) fail("pathloss_exp", "path loss exponent must be > 0");
    if (!(cfg.rician_K >= 0.0)) fail("rician_K", "Rician factor must be >= 0");
    if (!(cfg.P_A > 0.0)) fail("P_A", "per-antenna dissipation must be > 0");
    if (!(cfg.P_c > 0.0)) fail("P_c", "circuit power must be > 0");
    if (!(cfg.r_qos >= 0.0)) fail("r_qos", "QoS threshold must be >= 0");
    if (!(cfg.r_min >= 0.0)) fail("r_min", "initializer rate target must be >= 0");
    if (cfg.jam_sum_source_cell != 0 && cfg.jam_sum_source_cell != 1)
        fail("jam_sum_source_cell", "flag must be 0 or 1");
}

// Applies one key=value assignment to cfg (no validation). Throws ConfigError
// on unknown keys or malformed numbers.
inline void apply_config_entry(NetworkConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "K") cfg.K = static_cast<int>(parse_int(key, value));
    else if (key == "N_k") cfg.N_k = static_cast<int>(parse_int(key, value));
    else if (key == "N1_k") cfg.N1_k = static_cast<int>(parse_int(key, value));
    else if (key == "M") cfg.M = static_cast<int>(parse_int(key, value));
    else if (key == "N_ev") cfg.N_ev = static_cast<int>(parse_int(key, value));
    else if (key == "Pk_max") cfg.Pk_max = parse_double(key, value);
    else if (key == "Pk_max_dbm") cfg.Pk_max = dbm_to_watt(parse_double(key, value));
    else if (key == "P_max") cfg.P_max = parse_double(key, value);
    else if (key == "P_max_dbm") cfg.P_max = dbm_to_watt(parse_double(key, value));
    else if (key == "e_min") cfg.e_min = parse_double(key, value);
    else if (key == "e_min_dbm") cfg.e_min = dbm_to_watt(parse_double(key, value));
    else if (key == "zeta") cfg.zeta = parse_double(key, value);
    else if (key == "sigma_a2") cfg.sigma_a2 = parse_double(key, value);
    else if (key == "sigma_a2_dbm") cfg.sigma_a2 = dbm_to_watt(parse_double(key, value));
    else if (key == "eps0") cfg.eps0 = parse_double(key, value);
    else if (key == "eps1") cfg.eps1 = parse_double(key, value);
    else if (key == "cell_radius") cfg.cell_radius = parse_double(key, value);
    else if (key == "inner_radius") cfg.inner_radius = parse_double(key, value);
    else if (key == "pathloss_exp") cfg.pathloss_exp = parse_double(key, value);
    else if (key == "rician_K") cfg.rician_K = parse_double(key, value);
    else if (key == "xi") cfg.xi = parse_double(key, value);
    else if (key == "P_A") cfg.P_A = parse_double(key, value);
    else if (key == "P_c") cfg.P_c = parse_double(key, value);
    else if (key == "r_qos") cfg.r_qos = parse_double(key, value);
    else if (key == "r_min") cfg.r_min = parse_double(key, value);
    else if (key == "jam_sum_source_cell") cfg.jam_sum_source_cell = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else throw ConfigError(key, "config parse error: unknown key '" + key + "'");
}

// Parses flat key=value text ('#' starts a comment; '=' or whitespace
// separates key and value) on top of the defaults, then validates.
inline NetworkConfig parse_config_text(const std::string& text) {
    NetworkConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::string key, value;
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            key = detail::trim(line.substr(0, eq));
            value = detail::trim(line.substr(eq + 1));
        } else {
            const auto sp = line.find_first_of(" \t");
            if (sp == std::string::npos)
                throw ConfigError(line, "config parse error: line " + std::to_string(lineno) +
                                            " has no value: '" + line + "'");
            key = detail::trim(line.substr(0, sp));
            value = detail::trim(line.substr(sp + 1));
        }
        if (key.empty() || value.empty())
            throw ConfigError(key, "config parse error: line " + std::to_string(lineno) +
                                       " is malformed: '" + line + "'");
        apply_config_entry(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

inline NetworkConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, "config parse error: cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

// Uncertainty radius attached to a channel with squared norm `norm_sq`:
// serving links scale by eps1, all others (including eavesdropper links,
// where norm_sq is the squared Frobenius norm) by eps0.
inline double uncertainty_radius(const NetworkConfig& cfg, double norm_sq, bool serving) {
    return (serving ? cfg.eps1 : cfg.eps0) * norm_sq;
}

} // namespace secbeam
