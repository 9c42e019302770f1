#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "elastoblow/convergence.hpp"
#include "elastoblow/diagnostics.hpp"
#include "elastoblow/initdata.hpp"
#include "elastoblow/io/checkpoint.hpp"
#include "elastoblow/io/config.hpp"
#include "elastoblow/io/csv.hpp"
#include "elastoblow/solver.hpp"

namespace elastoblow::io {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitBreakdown = 2,
    kExitCheckFailed = 3,
};

inline auto make_initial_state(const Config& cfg) -> State {
    switch (cfg.initial.kind) {
    case InitialKind::Equilibrium: return initdata::make_equilibrium(cfg.physics, cfg.grid);
    case InitialKind::Bump: return initdata::make_bump(cfg.initial.bump, cfg.physics, cfg.grid);
    case InitialKind::Checkpoint: {
        checkpoint::Header header;
        const ConservedState c = read_checkpoint(cfg.initial.checkpoint, header);
        if (!(header.grid == cfg.grid)) {
            throw Error(ErrorCode::ConfigError, "initial.path: checkpoint grid does not match [grid]");
        }
        return to_primitive(c);
    }
    }
    throw Error(ErrorCode::ConfigError, "initial.type: unsupported");
}

namespace detail {

inline auto fmt(double v) -> std::string { return format_double(v); }

inline auto hypotheses_json(const HypothesisReport& r) -> nlohmann::ordered_json {
    nlohmann::ordered_json j;
    j["m0"] = r.m0;
    j["F0"] = r.F0_functional;
    j["E0"] = r.E0;
    j["trace0"] = r.trace0;
    j["rho0_sup"] = r.rho0_sup;
    j["sigma"] = r.sigma;
    j["threshold"] = r.threshold;
    j["cond_FF1"] = r.cond_FF1;
    j["cond_FF"] = r.cond_FF;
    j["cond_a2"] = r.cond_a2;
    j["T_upper"] = r.T_upper ? nlohmann::ordered_json(*r.T_upper) : nlohmann::ordered_json(nullptr);
    j["div_residual0"] = r.div_residual0;
    return j;
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create output directory " + dir.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << text;
}

template <typename Body>
auto guarded(std::ostream& err, Body&& body) -> int {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

} // namespace detail

/// Runs a simulation; writes series.csv, final.ckpt, summary.txt and summary.json into out_dir.
inline auto cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
                    std::ostream& err) -> int {
    return detail::guarded(err, [&] {
        const Config cfg = load_config(config_path);
        const State s0 = make_initial_state(cfg);
        const RunOutcome res = solver::run(s0, cfg.physics, cfg.grid, cfg.scheme, cfg.run);
        detail::ensure_dir(out_dir);
        write_series(out_dir / "series.csv", res.series);
        write_checkpoint(res.final, cfg.physics, cfg.grid, out_dir / "final.ckpt");

        double max_front = 0.0;
        for (const auto& r : res.series) max_front = std::max(max_front, r.front);
        const bool broke = res.status == RunStatus::Breakdown;

        std::ostringstream s;
        s << "status: " << (broke ? "breakdown" : "completed") << '\n';
        if (broke) {
            s << "reason: " << to_string(*res.reason) << '\n';
            s << "breakdown_time: " << detail::fmt(res.breakdown_time) << '\n';
        }
        s << "mode: " << to_string(cfg.run.mode) << '\n';
        s << "steps: " << res.steps << '\n';
        s << "final_time: " << detail::fmt(res.final.t) << '\n';
        s << "rows: " << res.series.size() << '\n';
        s << "bkm: " << detail::fmt(res.series.back().bkm) << '\n';
        s << "max_front: " << detail::fmt(max_front) << '\n';
        s << "half_width: " << detail::fmt(cfg.grid.half_width()) << '\n';
        s << "hypotheses_hold: " << (res.hypotheses.all_hold() ? "yes" : "no") << '\n';
        if (res.hypotheses.T_upper) s << "T_upper: " << detail::fmt(*res.hypotheses.T_upper) << '\n';
        detail::write_text(out_dir / "summary.txt", s.str());

        nlohmann::ordered_json j;
        j["status"] = broke ? "breakdown" : "completed";
        j["reason"] = broke ? nlohmann::ordered_json(std::string(to_string(*res.reason))) : nlohmann::ordered_json(nullptr);
        j["breakdown_time"] = broke ? nlohmann::ordered_json(res.breakdown_time) : nlohmann::ordered_json(nullptr);
        j["steps"] = res.steps;
        j["final_time"] = res.final.t;
        j["hypotheses"] = detail::hypotheses_json(res.hypotheses);
        detail::write_text(out_dir / "summary.json", j.dump(2) + "\n");

        out << s.str();
        return broke ? kExitBreakdown : kExitOk;
    });
}

/// Evaluates the initial-data conditions and prints each with its margin.
/// Inviscid configs require the three blowup hypotheses; viscous configs require the
/// viscosity conditions and the compatibility condition.
inline auto cmd_check_data(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                           std::ostream& out, std::ostream& err) -> int {
    return detail::guarded(err, [&] {
        const Config cfg = load_config(config_path);
        const State s0 = make_initial_state(cfg);
        const PhysParams& p = cfg.physics;
        const HypothesisReport rep = initdata::check_hypotheses(s0, p, cfg.grid, cfg.scheme);
        const bool viscous = cfg.run.mode == Mode::Viscous;

        auto mark = [](bool ok) { return ok ? "PASS" : "FAIL"; };
        std::ostringstream s;
        s << "mode: " << to_string(cfg.run.mode) << '\n';
        s << "sigma: " << detail::fmt(rep.sigma) << '\n';
        s << "m(0): " << detail::fmt(rep.m0) << '\n';
        s << "F(0): " << detail::fmt(rep.F0_functional) << '\n';
        s << "E(0): " << detail::fmt(rep.E0) << '\n';
        s << "int rho0 tr(I - F0): " << detail::fmt(rep.trace0) << '\n';
        s << "sup rho0: " << detail::fmt(rep.rho0_sup) << '\n';
        s << "max |div(rho0 F0^T)|: " << detail::fmt(rep.div_residual0) << '\n';
        s << "FF1  m(0) >= 0                          margin " << detail::fmt(rep.m0) << "  " << mark(rep.cond_FF1) << '\n';
        s << "FF   F(0) > (16 pi/3) sigma R^4 |rho0|  margin " << detail::fmt(rep.F0_functional - rep.threshold)
          << "  " << mark(rep.cond_FF) << '\n';
        s << "a2   int rho0 tr(I - F0) >= 2 E(0)      margin " << detail::fmt(rep.trace0 - 2.0 * rep.E0) << "  "
          << mark(rep.cond_a2) << '\n';
        s << "T_upper: " << (rep.T_upper ? detail::fmt(*rep.T_upper) : std::string("none")) << '\n';

        nlohmann::ordered_json j;
        j["mode"] = std::string(to_string(cfg.run.mode));
        j["hypotheses"] = detail::hypotheses_json(rep);

        bool ok = true;
        if (viscous) {
            const bool v2 = p.viscosity_admissible();
            const bool va = p.viscous_gate();
            const CompatibilityReport comp =
                initdata::check_compatibility(s0, p, cfg.grid, cfg.scheme, cfg.run.rho_floor);
            s << "v2   mu >= 0, 3 lambda + 2 mu >= 0      margin " << detail::fmt(std::min(p.mu, 3 * p.lambda + 2 * p.mu))
              << "  " << mark(v2) << '\n';
            s << "va   7 mu > lambda                      margin " << detail::fmt(7 * p.mu - p.lambda) << "  " << mark(va)
              << '\n';
            s << "v4   compatibility |g|_L2 " << detail::fmt(comp.g_l2) << "  |grad g|_L2 " << detail::fmt(comp.g_h1_seminorm)
              << "  |sqrt(rho0) g|_L2 " << detail::fmt(comp.sqrt_rho_g_l2) << "  flagged " << comp.flagged_cells << "  "
              << mark(comp.pass) << '\n';
            ok = v2 && va && comp.pass;
            j["viscosity"] = {{"v2", v2}, {"va", va}};
            j["compatibility"] = {{"g_l2", comp.g_l2},
                                  {"g_h1_seminorm", comp.g_h1_seminorm},
                                  {"sqrt_rho_g_l2", comp.sqrt_rho_g_l2},
                                  {"flagged_cells", comp.flagged_cells},
                                  {"pass", comp.pass}};
        } else {
            ok = rep.all_hold();
        }
        s << "result: " << (ok ? "all requested conditions hold" : "some requested condition fails") << '\n';
        j["pass"] = ok;

        detail::ensure_dir(out_dir);
        detail::write_text(out_dir / "hypotheses.json", j.dump(2) + "\n");
        out << s.str();
        return ok ? kExitOk : kExitCheckFailed;
    });
}

inline auto format_order(const convergence::OrderEntry& e) -> std::string {
    if (e.exact) return "exact";
    if (!e.order) return "undetermined";
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << *e.order;
    return s.str();
}

/// Refinement study at the configured three resolutions.
inline auto cmd_convergence(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) -> int {
    return detail::guarded(err, [&] {
        const Config cfg = load_config(config_path);
        if (cfg.initial.kind == InitialKind::Checkpoint) {
            throw Error(ErrorCode::ConfigError, "initial.type: convergence studies need builtin initial data");
        }
        const auto make = [&](const PhysParams& p, const Grid& g) {
            return cfg.initial.kind == InitialKind::Bump ? initdata::make_bump(cfg.initial.bump, p, g)
                                                          : initdata::make_equilibrium(p, g);
        };
        const convergence::Study st =
            convergence::run_study(cfg.physics, cfg.grid.half_width(), cfg.scheme, cfg.run, cfg.resolutions, make);

        std::ostringstream s;
        s << "n,h,status,energy_drift,div_res0,div_res_end\n";
        bool broke = false;
        for (const auto& r : st.runs) {
            broke = broke || r.status != RunStatus::Completed;
            s << r.n << ',' << detail::fmt(r.h) << ',' << (r.status == RunStatus::Completed ? "completed" : "breakdown")
              << ',' << detail::fmt(r.energy_drift) << ',' << detail::fmt(r.div_res0) << ','
              << detail::fmt(r.div_res_end) << '\n';
        }
        s << "design order: " << st.design_order << '\n';
        s << "solution (Richardson vs finest): " << format_order(st.solution) << '\n';
        s << "energy drift: " << format_order(st.energy) << '\n';
        s << "div residual: " << format_order(st.div_residual) << '\n';
        s << "result: " << (st.passes() ? "PASS" : "FAIL") << '\n';
        out << s.str();
        if (broke) return kExitBreakdown;
        return st.passes() ? kExitOk : kExitCheckFailed;
    });
}

/// Writes a gnuplot script plotting out_dir/series.csv; it only formats, never computes.
inline auto cmd_plot(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& err) -> int {
    return detail::guarded(err, [&] {
        const Config cfg = load_config(config_path);
        std::ostringstream s;
        s << "# gnuplot script for " << config_path.filename().string() << "\n";
        s << "set datafile separator ','\n";
        s << "set key autotitle columnhead\n";
        s << "set terminal pngcairo size 1200,900\n";
        s << "set output 'series.png'\n";
        s << "set multiplot layout 2,2\n";
        s << "set xlabel 't'\n";
        s << "plot 'series.csv' using 1:3 with lines, '' using 1:12 with lines\n";
        s << "plot 'series.csv' using 1:4 with lines\n";
        s << "plot 'series.csv' using 1:7 with lines, '' using 1:8 with lines\n";
        s << "plot 'series.csv' using 1:9 with lines, '' using 1:10 with lines\n";
        s << "unset multiplot\n";
        detail::ensure_dir(out_dir);
        detail::write_text(out_dir / "plot.gp", s.str());
        out << "wrote " << (out_dir / "plot.gp").string() << " (mode " << to_string(cfg.run.mode) << ")\n";
        return kExitOk;
    });
}

} // namespace elastoblow::io
