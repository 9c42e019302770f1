// Acceptance checks: one PASS/FAIL line per criterion.
// Exit status is nonzero when a criterion fails that is not listed with --expected-fail,
// or when a listed criterion unexpectedly passes.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "elastoblow/elastoblow.hpp"
#include "support/analytic_field.hpp"

using namespace elastoblow;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

auto seconds_since(Clock::time_point t0) -> double {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

auto fmt(double v) -> std::string {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

auto scratch(const std::string& name) -> fs::path {
    const fs::path d = fs::temp_directory_path() / "elastoblow_acceptance" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

auto slurp(const fs::path& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

auto pulse_params() -> PhysParams {
    PhysParams p;
    p.A = 0.5;
    p.gamma = 2.0;
    return p;
}

constexpr BumpSpec kPulse{0.05, 0.05, 0.05};
constexpr double kPulseHalfWidth = 2.6;
constexpr double kPulseEnd = 0.3;

// Shared by criteria 3, 4 and 5: one 48^3 run with frequent samples and a 32/48/64 study.
struct PulseData {
    Grid grid{48, kPulseHalfWidth};
    RunOutcome run;
    convergence::Study study;
    double momentum_scale = 0.0;
    double seconds = 0.0;
};

auto pulse_data() -> const PulseData& {
    static const PulseData data = [] {
        PulseData d;
        const auto t0 = Clock::now();
        const PhysParams p = pulse_params();
        const StencilConfig sc;
        RunConfig rc = RunConfig::defaults_for(p);
        rc.t_end = kPulseEnd;
        rc.output_stride = 1;
        const State s0 = initdata::make_bump(kPulse, p, d.grid);
        d.momentum_scale = diagnostics::momentum_magnitude(s0, d.grid);
        d.run = solver::run(s0, p, d.grid, sc, rc);
        d.study = convergence::run_study(p, kPulseHalfWidth, sc, rc, {32, 48, 64},
                                         [](const PhysParams& pp, const Grid& g) { return initdata::make_bump(kPulse, pp, g); });
        d.seconds = seconds_since(t0);
        return d;
    }();
    return data;
}

auto criterion1() -> Verdict {
    const PhysParams p = pulse_params();
    const Grid g(32, 2.0);
    const StencilConfig sc;
    const ConservedState c0 = to_conserved(initdata::make_equilibrium(p, g));
    ConservedState c = c0;
    const auto t0 = Clock::now();
    solver::Stepper stepper(p, g, sc, Mode::Inviscid);
    const double dt = solver::stable_dt(c, p, g, Mode::Inviscid, 0.4);
    bool ok = true;
    for (int n = 0; n < 200; ++n) ok = ok && !stepper.advance(c, dt);
    const double secs = seconds_since(t0);
    const State a = to_primitive(c0);
    const State b = to_primitive(c);
    double dev = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        dev = std::max(dev, std::abs(a.rho[x] - b.rho[x]));
        for (int i = 0; i < 3; ++i) dev = std::max(dev, std::abs(a.u[i][x] - b.u[i][x]));
        for (int q = 0; q < 9; ++q) dev = std::max(dev, std::abs(a.F[q][x] - b.F[q][x]));
    }
    return {ok && dev <= 1e-13 && secs <= 10.0,
            "200 steps at 32^3: max deviation " + fmt(dev) + " (<= 1e-13), " + fmt(secs) + " s (<= 10 s)"};
}

auto criterion2() -> Verdict {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(0.05, 5.0);
    std::uniform_real_distribution<double> any(-3.0, 3.0);
    PhysParams p;
    p.A = 0.8;
    p.gamma = 1.7;
    int good = 0;
    double worst_defect = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 1000; ++n) {
        symhyp::PointState ps;
        ps.rho = pos(rng);
        for (auto& v : ps.u) v = any(rng);
        for (auto& v : ps.F) v = any(rng);
        const auto r = symhyp::check_hyperbolicity(ps, p);
        good += r.pass ? 1 : 0;
        worst_defect = std::max(worst_defect, r.symmetry_defect);
        min_diag = std::min(min_diag, r.a0_min_diag);
    }
    const testing_support::AnalyticField f(17);
    bool orders_ok = true;
    std::string orders;
    for (int order : {2, 4}) {
        StencilConfig sc;
        sc.order = order;
        const double e1 = testing_support::equivalence_error(f, 12, sc, p);
        const double e2 = testing_support::equivalence_error(f, 24, sc, p);
        const double e3 = testing_support::equivalence_error(f, 48, sc, p);
        const double r1 = std::log2(e1 / e2);
        const double r2 = std::log2(e2 / e3);
        orders_ok = orders_ok && r1 >= order - 0.5 && r2 >= order - 0.5;
        orders += " order" + std::to_string(order) + " rates " + fmt(r1) + "/" + fmt(r2);
    }
    return {good == 1000 && orders_ok,
            std::to_string(good) + "/1000 states pass, symmetry defect " + fmt(worst_defect) + ", A0 min diag " +
                fmt(min_diag) + ";" + orders};
}

auto max_rel_drift(const std::vector<double>& v, double scale) -> double {
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()) / scale);
    return d;
}

auto criterion3() -> Verdict {
    const PulseData& d = pulse_data();
    const PhysParams p = pulse_params();
    std::vector<double> m;
    std::vector<double> trace;
    for (const auto& row : d.run.series) {
        m.push_back(row.m);
        trace.push_back(row.trace);
    }
    // Total momentum is recomputed from the final state; it starts at zero by symmetry.
    const Vec3 P1 = diagnostics::total_momentum(to_primitive(d.run.final), d.grid);
    const Vec3 P0 = diagnostics::total_momentum(initdata::make_bump(kPulse, p, d.grid), d.grid);
    const double dP = norm({P1[0] - P0[0], P1[1] - P0[1], P1[2] - P0[2]}) / d.momentum_scale;
    const double dm = max_rel_drift(m, std::abs(m.front()));
    const double dtr = max_rel_drift(trace, std::abs(trace.front()));
    double front = 0.0;
    for (const auto& row : d.run.series) front = std::max(front, row.front);
    const double front_limit = kPulseHalfWidth - 5.0 * d.grid.h(0);
    const auto& e = d.study.energy;
    const bool order_ok = e.passes(2);
    const bool ok = d.run.status == RunStatus::Completed && front <= front_limit && dm <= 1e-11 && dtr <= 1e-10 &&
                    dP <= 1e-11 && order_ok && d.seconds <= 300.0;
    return {ok, "48^3 to t=" + fmt(kPulseEnd) + ": front " + fmt(front) + " (<= " + fmt(front_limit) + "), m drift " +
                    fmt(dm) + ", trace drift " + fmt(dtr) + ", momentum drift " + fmt(dP) + "; energy drift " +
                    fmt(e.errors[0]) + "/" + fmt(e.errors[1]) + "/" + fmt(e.errors[2]) + " order " +
                    (e.order ? fmt(*e.order) : std::string("undetermined")) + " (>= 1.5); " + fmt(d.seconds) +
                    " s (<= 300 s)"};
}

auto criterion4() -> Verdict {
    const PulseData& d = pulse_data();
    bool bounded = true;
    std::vector<double> h;
    std::vector<double> r0;
    std::string ratios;
    for (const auto& r : d.study.runs) {
        bounded = bounded && r.div_res_end <= 10.0 * r.div_res0;
        ratios += " " + std::to_string(r.n) + "^3 " + fmt(r.div_res_end / r.div_res0);
        h.push_back(r.h);
        r0.push_back(r.div_res0);
    }
    const auto initial = convergence::ordered_entry(h, r0);
    return {bounded && initial.passes(2),
            "end/start ratio" + ratios + " (<= 10); initial residual order " +
                (initial.order ? fmt(*initial.order) : std::string("undetermined")) + " (>= 1.5)"};
}

auto criterion5() -> Verdict {
    const PulseData& d = pulse_data();
    const double h = d.grid.h(0);
    double worst = -std::numeric_limits<double>::infinity();
    double at = 0.0;
    int violations = 0;
    for (const auto& row : d.run.series) {
        const double excess = row.front - (row.front_bound + 3.0 * h);
        if (excess > 0.0) ++violations;
        if (excess > worst) {
            worst = excess;
            at = row.t;
        }
    }
    return {violations == 0, std::to_string(violations) + "/" + std::to_string(d.run.series.size()) +
                                 " samples beyond sigma t + R + 3h at tolerance 1e-8; worst excess " + fmt(worst) +
                                 " at t=" + fmt(at)};
}

auto criterion6() -> Verdict {
    const diagnostics::RiccatiConstants k{1.0, 1.0, 1.0};
    const double F0 = 32.0 * std::numbers::pi / 3.0;
    const double expected = std::pow(2.0, 0.25) - 1.0;
    const auto T = diagnostics::blowup_time_upper_bound(F0, k);
    const double rel = T ? std::abs(*T - expected) / expected : 1.0;
    // Divergence time of the lower bound, by bisection on finiteness.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::isfinite(diagnostics::riccati_lower_bound(mid, F0, k)) ? lo : hi) = mid;
    }
    const double div_rel = T ? std::abs(hi - *T) / *T : 1.0;
    const bool none_at_threshold = !diagnostics::blowup_time_upper_bound(diagnostics::ff_threshold(k), k).has_value();

    // Comparison equation y' = y^2 / ((4 pi / 3)(sigma t + R)^5 rho0) by RK4 with fine steps.
    double ode_err = 0.0;
    for (const diagnostics::RiccatiConstants kk : {k, diagnostics::RiccatiConstants{0.5, 2.0, 1.4}}) {
        const double y0 = 2.0 * diagnostics::ff_threshold(kk);
        const double Tk = *diagnostics::blowup_time_upper_bound(y0, kk);
        auto rhs = [&](double t, double y) {
            return y * y / (4.0 * std::numbers::pi / 3.0 * std::pow(kk.sigma * t + kk.R, 5) * kk.rho0_sup);
        };
        const int steps = 40000;
        const double t_stop = 0.9 * Tk;
        const double dt = t_stop / steps;
        double y = y0;
        for (int i = 0; i < steps; ++i) {
            const double t = i * dt;
            const double k1 = rhs(t, y);
            const double k2 = rhs(t + dt / 2, y + dt / 2 * k1);
            const double k3 = rhs(t + dt / 2, y + dt / 2 * k2);
            const double k4 = rhs(t + dt, y + dt * k3);
            y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            if ((i + 1) % 4000 == 0) {
                const double closed = diagnostics::riccati_lower_bound((i + 1) * dt, y0, kk);
                ode_err = std::max(ode_err, std::abs(closed - y) / std::abs(y));
            }
        }
    }
    return {rel <= 1e-12 && div_rel <= 1e-12 && none_at_threshold && ode_err <= 1e-8,
            "T = " + (T ? fmt(*T) : std::string("none")) + ", rel err " + fmt(rel) + ", divergence rel err " +
                fmt(div_rel) + ", threshold gives " + (none_at_threshold ? "none" : "a value") +
                ", ODE rel err " + fmt(ode_err)};
}

auto criterion7() -> Verdict {
    PhysParams p;
    p.A = 2e-6;
    p.gamma = 2.0;
    const Grid g(32, 2.5);
    const StencilConfig sc;
    RunConfig rc = RunConfig::defaults_for(p);
    rc.t_end = 0.5;
    rc.output_stride = 2;
    const State s0 = initdata::make_bump({1.0, 1.0, 0.0}, p, g);
    const RunOutcome out = solver::run(s0, p, g, sc, rc);
    const HypothesisReport& h = out.hypotheses;
    const double F0 = h.F0_functional;
    const double cap = rc.gradu_ceiling / 10.0;
    int checked = 0;
    int bad_mono = 0;
    int bad_bound = 0;
    double prev = F0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (const auto& row : out.series) {
        if (!(row.gradu_max < cap)) break;
        ++checked;
        if (row.Ffun < prev - 1e-3 * F0) ++bad_mono;
        prev = std::max(prev, row.Ffun);
        if (row.riccati_lb) {
            worst_ratio = std::min(worst_ratio, row.Ffun / *row.riccati_lb);
            if (row.Ffun < 0.95 * *row.riccati_lb) ++bad_bound;
        }
    }
    const bool ok = h.all_hold() && checked >= 2 && bad_mono == 0 && bad_bound == 0;
    return {ok, std::string("hypotheses ") + (h.all_hold() ? "hold" : "fail") + ", " + std::to_string(checked) +
                    " samples below ceiling/10, " + std::to_string(bad_mono) + " monotonicity and " +
                    std::to_string(bad_bound) + " bound violations, min F/lower bound " + fmt(worst_ratio)};
}

auto criterion8() -> Verdict {
    PhysParams p = pulse_params();
    p.mu = 0.1;
    p.lambda = 0.0;
    const StencilConfig sc;
    RunConfig rc = RunConfig::defaults_for(p);
    rc.mode = Mode::Viscous;
    rc.t_end = 0.3;
    rc.output_stride = 1 << 30;
    std::vector<double> h;
    std::vector<double> residual;
    bool completed = true;
    for (int n : {32, 48, 64}) {
        const Grid g(n, 3.0);
        const RunOutcome out = solver::run(initdata::make_bump(kPulse, p, g), p, g, sc, rc);
        completed = completed && out.status == RunStatus::Completed;
        h.push_back(g.h(0));
        residual.push_back(std::abs(out.series.back().E + out.dissipation.back() - out.series.front().E));
    }
    const auto entry = convergence::ordered_entry(h, residual);
    return {completed && entry.passes(2), "balance residual " + fmt(residual[0]) + "/" + fmt(residual[1]) + "/" +
                                              fmt(residual[2]) + " at 32/48/64, order " +
                                              (entry.order ? fmt(*entry.order) : std::string("undetermined")) +
                                              " (>= 1.5)"};
}

auto criterion9() -> Verdict {
    const fs::path dir = scratch("breakdown");
    const fs::path cfg = dir / "supersonic.ini";
    std::ofstream(cfg) << "[physics]\nA = 0.5\ngamma = 2\n[grid]\nn = 32\nhalf_width = 2.5\n"
                          "[run]\nt_end = 2\noutput_stride = 1\ngradu_ceiling = 60\n"
                          "[initial]\ntype = bump\nvelocity_amplitude = -20\ndensity_bump = 0.5\n";
    std::ostringstream out;
    std::ostringstream err;
    const int code1 = io::cmd_run(cfg, dir / "a", out, err);
    const int code2 = io::cmd_run(cfg, dir / "b", out, err);
    if (!fs::exists(dir / "a" / "summary.json")) return {false, "run produced no summary: " + err.str()};
    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    const bool broke = summary["status"] == "breakdown";
    const double t_star = summary["breakdown_time"].is_number() ? summary["breakdown_time"].get<double>() : NAN;
    const auto series = io::read_series(dir / "a" / "series.csv");
    bool monotone = true;
    for (std::size_t i = 1; i < series.size(); ++i) monotone = monotone && series[i].bkm >= series[i - 1].bkm;
    const bool identical = slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv") &&
                           slurp(dir / "a" / "final.ckpt") == slurp(dir / "b" / "final.ckpt");
    const std::string reason = summary["reason"].is_string() ? summary["reason"].get<std::string>() : "none";
    return {code1 == io::kExitBreakdown && code2 == io::kExitBreakdown && broke && std::isfinite(t_star) && monotone &&
                identical,
            "exit " + std::to_string(code1) + ", status " + summary["status"].get<std::string>() + " (" + reason +
                ") at t=" + fmt(t_star) + ", bkm " + (monotone ? "monotone" : "not monotone") + ", rerun " +
                (identical ? "bit-identical" : "differs")};
}

auto criterion10() -> Verdict {
    // Checkpoint round trip.
    const Grid g({7, 6, 5}, 1.25);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ConservedState c(g.size());
    for (auto& f : c.comp) {
        for (double& v : f) v = u(rng) * std::exp(30.0 * u(rng));
    }
    c.t = 1.0 / 3.0;
    const fs::path dir = scratch("io");
    io::write_checkpoint(c, PhysParams{}, g, dir / "state.ckpt");
    io::checkpoint::Header header;
    const ConservedState back = io::read_checkpoint(dir / "state.ckpt", header);
    bool ckpt = std::memcmp(&back.t, &c.t, sizeof(double)) == 0 && header.grid == g;
    for (int q = 0; q < 13; ++q) {
        ckpt = ckpt && std::memcmp(back.comp[q].data(), c.comp[q].data(), c.comp[q].size() * sizeof(double)) == 0;
    }

    // CSV round trip.
    std::vector<DiagnosticsRow> rows;
    for (int i = 0; i < 100; ++i) {
        DiagnosticsRow r;
        for (double* v : {&r.t, &r.m, &r.Ffun, &r.E, &r.trace, &r.div_res, &r.front, &r.front_bound, &r.bkm,
                          &r.gradu_max, &r.rho_min}) {
            *v = u(rng) * std::pow(10.0, 200.0 * u(rng));
        }
        if (i % 2) r.riccati_lb = u(rng);
        rows.push_back(r);
    }
    io::write_series(dir / "series.csv", rows);
    const auto rows_back = io::read_series(dir / "series.csv");
    bool csv = rows_back.size() == rows.size();
    for (std::size_t i = 0; csv && i < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = rows_back[i];
        csv = a.t == b.t && a.m == b.m && a.Ffun == b.Ffun && a.E == b.E && a.trace == b.trace &&
              a.div_res == b.div_res && a.front == b.front && a.front_bound == b.front_bound && a.bkm == b.bkm &&
              a.gradu_max == b.gradu_max && a.rho_min == b.rho_min && a.riccati_lb == b.riccati_lb;
    }

    // Validation names the offending field.
    const std::string grid = "[grid]\nn = 12\nhalf_width = 2\n";
    auto rejects_naming = [](const std::string& text, const std::string& field) {
        try {
            (void)io::parse_config(text);
        } catch (const Error& e) {
            return e.code() == ErrorCode::ConfigError && std::string(e.what()).find(field) != std::string::npos;
        }
        return false;
    };
    const bool v2 = rejects_naming("[physics]\nmu = 0.1\nlambda = -0.2\n" + grid, "lambda");
    const bool va = rejects_naming("[physics]\nmu = 0.25\nlambda = 1.75\n" + grid + "[run]\nmode = viscous\n", "lambda");
    const bool gam = rejects_naming("[physics]\ngamma = 1\n" + grid, "gamma");
    auto yn = [](bool b) { return b ? std::string("ok") : std::string("FAILED"); };
    return {ckpt && csv && v2 && va && gam, "checkpoint " + yn(ckpt) + ", csv " + yn(csv) + ", viscosity sign " +
                                                yn(v2) + ", viscous gate " + yn(va) + ", gamma " + yn(gam)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastoblow acceptance checks"};
    std::vector<int> expected_fail;
    std::vector<int> only;
    app.add_option("--expected-fail", expected_fail, "criteria known to fail; the exit status ignores them");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);
    configure_threads();

    const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8,
                                                            criterion9, criterion10};
    const std::set<int> xfail(expected_fail.begin(), expected_fail.end());
    const std::set<int> selected(only.begin(), only.end());
    int passed = 0;
    int ran = 0;
    bool status_ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        ++ran;
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        passed += v.pass ? 1 : 0;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << v.detail << std::endl;
        if (v.pass == xfail.contains(id)) status_ok = false;
    }
    std::cout << passed << "/" << ran << " criteria passed" << std::endl;
    return status_ok ? 0 : 1;
}
