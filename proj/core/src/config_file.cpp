#include "mimo/config_file.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mimo/errors.hpp"

namespace mimo {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
    if (pos != value.size()) {
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
    return v;
}

} // namespace

NetworkConfig parse_config_text(const std::string& text) {
    NetworkConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        if (key == "L") {
            config.L = static_cast<int>(parse_int(key, value));
        } else if (key == "K") {
            config.K = static_cast<int>(parse_int(key, value));
        } else if (key == "M") {
            config.M = static_cast<int>(parse_int(key, value));
        } else if (key == "tau_c") {
            config.tau_c = static_cast<int>(parse_int(key, value));
        } else if (key == "r") {
            config.r = parse_real(key, value);
        } else if (key == "rho_db") {
            config.rho_db = parse_real(key, value);
        } else if (key == "rho_tr_factor") {
            config.rho_tr_factor = parse_real(key, value);
        } else if (key == "cell_side_km") {
            config.cell_side_km = parse_real(key, value);
        } else if (key == "shadow_var_db2") {
            config.shadow_param_db2 = parse_real(key, value);
        } else if (key == "min_dist_m") {
            config.min_dist_m = parse_real(key, value);
        } else if (key == "seed") {
            config.seed = parse_u64(key, value);
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

NetworkConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_text(const NetworkConfig& config) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "L = %d\nK = %d\nM = %d\ntau_c = %d\nr = %.17g\nrho_db = %.17g\n"
                  "rho_tr_factor = %.17g\ncell_side_km = %.17g\nshadow_var_db2 = %.17g\n"
                  "min_dist_m = %.17g\nseed = %llu\n",
                  config.L, config.K, config.M, config.tau_c, config.r, config.rho_db,
                  config.rho_tr_factor, config.cell_side_km, config.shadow_param_db2,
                  config.min_dist_m, static_cast<unsigned long long>(config.seed));
    return buf;
}

} // namespace mimo
