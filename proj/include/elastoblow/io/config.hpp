#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "elastoblow/core_types.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/initdata.hpp"
#include "elastoblow/solver.hpp"

namespace elastoblow::io {

enum class InitialKind { Equilibrium, Bump, Checkpoint };

struct InitialSpec {
    InitialKind kind = InitialKind::Equilibrium;
    BumpSpec bump;
    std::filesystem::path checkpoint;
};

/// Parsed run configuration. Sections:
///   [physics]     A gamma mu lambda rho_bar R
///   [grid]        n (one or three integers) half_width
///   [scheme]      order dissipation_coeff cfl
///   [run]         mode t_end output_stride rho_floor gradu_ceiling front_tolerance
///   [initial]     type = equilibrium | bump | checkpoint, velocity_amplitude,
///                 density_bump or diagonal_shrink, F_potential_amplitude, path
///   [convergence] resolutions (three integers)
struct Config {
    PhysParams physics;
    Grid grid;
    StencilConfig scheme;
    RunConfig run;
    InitialSpec initial;
    std::vector<int> resolutions;
};

namespace detail {

inline auto trim(std::string s) -> std::string {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline auto config_error(const std::string& key, const std::string& msg) -> Error {
    return Error(ErrorCode::ConfigError, key + ": " + msg);
}

inline auto parse_double(const std::string& key, const std::string& v) -> double {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (...) {
        throw config_error(key, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) throw config_error(key, "expected a number, got '" + v + "'");
    return out;
}

inline auto parse_ints(const std::string& key, const std::string& v) -> std::vector<int> {
    std::istringstream in(v);
    std::vector<int> out;
    std::string tok;
    while (in >> tok) {
        std::size_t pos = 0;
        int x = 0;
        try {
            x = std::stoi(tok, &pos);
        } catch (...) {
            throw config_error(key, "expected integers, got '" + v + "'");
        }
        if (pos != tok.size()) throw config_error(key, "expected integers, got '" + v + "'");
        out.push_back(x);
    }
    return out;
}

using Table = std::map<std::string, std::map<std::string, std::string>>;

inline auto parse_table(const std::string& text) -> Table {
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"physics", {"A", "gamma", "mu", "lambda", "rho_bar", "R"}},
        {"grid", {"n", "half_width"}},
        {"scheme", {"order", "dissipation_coeff", "cfl"}},
        {"run", {"mode", "t_end", "output_stride", "rho_floor", "gradu_ceiling", "front_tolerance"}},
        {"initial", {"type", "velocity_amplitude", "density_bump", "diagonal_shrink", "F_potential_amplitude", "path"}},
        {"convergence", {"resolutions"}},
    };
    Table table;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!allowed.contains(section)) throw config_error(section, "unknown section");
            table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw config_error(key, "key outside of any section");
        if (!allowed.at(section).contains(key)) throw config_error(section + "." + key, "unknown key");
        if (table[section].contains(key)) throw config_error(section + "." + key, "duplicate key");
        table[section][key] = value;
    }
    return table;
}

} // namespace detail

/// Parses configuration text; relative checkpoint paths resolve against base_dir.
inline auto parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) -> Config {
    using detail::config_error;
    using detail::parse_double;
    const detail::Table t = detail::parse_table(text);
    auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
        const auto s = t.find(sec);
        if (s == t.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto num = [&](const std::string& sec, const std::string& key, double fallback) {
        const std::string* v = get(sec, key);
        return v ? parse_double(sec + "." + key, *v) : fallback;
    };

    Config cfg;
    PhysParams& p = cfg.physics;
    p.A = num("physics", "A", p.A);
    p.gamma = num("physics", "gamma", p.gamma);
    p.mu = num("physics", "mu", p.mu);
    p.lambda = num("physics", "lambda", p.lambda);
    p.rho_bar = num("physics", "rho_bar", p.rho_bar);
    p.R = num("physics", "R", p.R);
    try {
        p.validate();
    } catch (const Error& e) {
        throw config_error("physics", e.what());
    }

    const std::string* n_str = get("grid", "n");
    if (!n_str) throw config_error("grid.n", "missing");
    const std::vector<int> n = detail::parse_ints("grid.n", *n_str);
    if (n.size() != 1 && n.size() != 3) throw config_error("grid.n", "expected one or three integers");
    const std::string* hw = get("grid", "half_width");
    if (!hw) throw config_error("grid.half_width", "missing");
    const double half_width = parse_double("grid.half_width", *hw);
    try {
        cfg.grid = n.size() == 1 ? Grid(n[0], half_width) : Grid({n[0], n[1], n[2]}, half_width);
    } catch (const Error& e) {
        throw config_error("grid", e.what());
    }

    cfg.scheme.order = static_cast<int>(num("scheme", "order", cfg.scheme.order));
    cfg.scheme.dissipation_coeff = num("scheme", "dissipation_coeff", cfg.scheme.dissipation_coeff);
    try {
        cfg.scheme.validate();
        stencil::check_grid(cfg.grid, cfg.scheme);
    } catch (const Error& e) {
        throw config_error("scheme", e.what());
    }

    RunConfig rc = RunConfig::defaults_for(p);
    rc.cfl = num("scheme", "cfl", rc.cfl);
    if (const std::string* mode = get("run", "mode")) {
        if (*mode == "inviscid") {
            rc.mode = Mode::Inviscid;
        } else if (*mode == "viscous") {
            rc.mode = Mode::Viscous;
        } else {
            throw config_error("run.mode", "expected inviscid or viscous, got '" + *mode + "'");
        }
    }
    rc.t_end = num("run", "t_end", rc.t_end);
    rc.output_stride = static_cast<int>(num("run", "output_stride", rc.output_stride));
    rc.rho_floor = num("run", "rho_floor", rc.rho_floor);
    rc.gradu_ceiling = num("run", "gradu_ceiling", rc.gradu_ceiling);
    rc.front_tolerance = num("run", "front_tolerance", rc.front_tolerance);
    try {
        rc.validate();
    } catch (const Error& e) {
        throw config_error("run", e.what());
    }
    if (rc.mode == Mode::Viscous) {
        try {
            p.validate_viscous();
        } catch (const Error& e) {
            throw config_error("physics", e.what());
        }
    }
    cfg.run = rc;

    InitialSpec& init = cfg.initial;
    const std::string type = get("initial", "type") ? *get("initial", "type") : "equilibrium";
    if (type == "equilibrium") {
        init.kind = InitialKind::Equilibrium;
    } else if (type == "bump") {
        init.kind = InitialKind::Bump;
        init.bump.velocity_amplitude = num("initial", "velocity_amplitude", 0.0);
        init.bump.F_potential_amplitude = num("initial", "F_potential_amplitude", 0.0);
        if (get("initial", "density_bump") && get("initial", "diagonal_shrink")) {
            throw config_error("initial.diagonal_shrink", "give either density_bump or diagonal_shrink, not both");
        }
        if (get("initial", "diagonal_shrink")) {
            try {
                init.bump.density_bump =
                    initdata::density_bump_for_shrink(num("initial", "diagonal_shrink", 0.0), p.rho_bar);
            } catch (const Error& e) {
                throw config_error("initial.diagonal_shrink", e.what());
            }
        } else {
            init.bump.density_bump = num("initial", "density_bump", 0.0);
        }
        if (init.bump.density_bump <= -p.rho_bar) {
            throw config_error("initial.density_bump", "drives the density nonpositive");
        }
        if (!(p.R < cfg.grid.half_width())) {
            throw config_error("physics.R", "support radius must be smaller than grid.half_width");
        }
    } else if (type == "checkpoint") {
        init.kind = InitialKind::Checkpoint;
        const std::string* path = get("initial", "path");
        if (!path) throw config_error("initial.path", "missing for checkpoint initial data");
        init.checkpoint = std::filesystem::path(*path);
        if (init.checkpoint.is_relative() && !base_dir.empty()) init.checkpoint = base_dir / init.checkpoint;
    } else {
        throw config_error("initial.type", "expected equilibrium, bump or checkpoint, got '" + type + "'");
    }

    if (const std::string* res = get("convergence", "resolutions")) {
        cfg.resolutions = detail::parse_ints("convergence.resolutions", *res);
        if (cfg.resolutions.size() != 3) throw config_error("convergence.resolutions", "expected three integers");
    } else {
        const int base = cfg.grid.n(0);
        cfg.resolutions = {base, (3 * base / 2 + 1) / 2 * 2, 2 * base};
    }
    for (std::size_t i = 0; i < cfg.resolutions.size(); ++i) {
        if (cfg.resolutions[i] < 2 * cfg.scheme.collar() + 1 || (i > 0 && cfg.resolutions[i] <= cfg.resolutions[i - 1])) {
            throw config_error("convergence.resolutions", "must be increasing and large enough for the stencil");
        }
    }
    return cfg;
}

inline auto load_config(const std::filesystem::path& path) -> Config {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

} // namespace elastoblow::io
