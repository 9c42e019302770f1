#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "elastoblow/core_types.hpp"
#include "elastoblow/diagnostics.hpp"
#include "elastoblow/initdata.hpp"
#include "elastoblow/solver.hpp"

namespace elastoblow::convergence {

/// Tricubic Lagrange interpolation of a cell-centred field at x (fourth-order accurate).
inline auto interpolate_cubic(const ScalarField& f, const Grid& g, const Vec3& x) -> double {
    std::array<int, 3> base{};
    std::array<std::array<double, 4>, 3> w{};
    for (int d = 0; d < 3; ++d) {
        const double s = (x[d] - g.origin()[d]) / g.h(d);
        int i0 = static_cast<int>(std::floor(s)) - 1;
        i0 = std::clamp(i0, 0, g.n(d) - 4);
        base[d] = i0;
        for (int a = 0; a < 4; ++a) {
            double l = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (b != a) l *= (s - (i0 + b)) / static_cast<double>(a - b);
            }
            w[d][a] = l;
        }
    }
    double out = 0.0;
    for (int c = 0; c < 4; ++c) {
        for (int b = 0; b < 4; ++b) {
            for (int a = 0; a < 4; ++a) {
                out += w[0][a] * w[1][b] * w[2][c] * f[g.index(base[0] + a, base[1] + b, base[2] + c)];
            }
        }
    }
    return out;
}

/// Least-squares slope of log(err) against log(h).
inline auto fitted_order(const std::vector<double>& h, const std::vector<double>& err) -> double {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(h[i]);
        const double ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/// Order p with (h1^p - h3^p) / (h2^p - h3^p) = e1 / e2, where e_i are differences
/// against the finest solution. None when the ratio admits no root in (0, 12].
inline auto richardson_order(double h1, double h2, double h3, double e1, double e2) -> std::optional<double> {
    if (!(e1 > 0.0 && e2 > 0.0)) return std::nullopt;
    const double target = e1 / e2;
    auto ratio = [&](double p) { return (std::pow(h1, p) - std::pow(h3, p)) / (std::pow(h2, p) - std::pow(h3, p)); };
    double lo = 1e-6, hi = 12.0;
    if (target < ratio(lo) || target > ratio(hi)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ResolutionResult {
    int n = 0;
    double h = 0.0;
    RunStatus status = RunStatus::Completed;
    double energy0 = 0.0;
    double energy_drift = 0.0;
    double div_res0 = 0.0;
    double div_res_end = 0.0;
    std::vector<double> probes;
};

struct OrderEntry {
    std::vector<double> errors;
    std::optional<double> order;
    bool exact = false;

    [[nodiscard]] auto passes(double design_order) const -> bool {
        return exact || (order && *order >= design_order - 0.5);
    }
};

struct Study {
    std::vector<ResolutionResult> runs;
    OrderEntry solution;
    OrderEntry energy;
    OrderEntry div_residual;
    int design_order = 2;

    [[nodiscard]] auto passes() const -> bool {
        bool completed = true;
        for (const auto& r : runs) completed = completed && r.status == RunStatus::Completed;
        return completed && solution.passes(design_order) && energy.passes(design_order) &&
               div_residual.passes(design_order);
    }
};

/// Probe points along a fixed oblique ray inside the region reached by the disturbance.
inline auto probe_points(double reach, double half_width, double h_coarse) -> std::vector<Vec3> {
    const Vec3 dir{0.48, 0.36, 0.8};
    const double limit = std::min(reach, half_width - 3.0 * h_coarse);
    std::vector<Vec3> pts;
    for (int i = 1; i <= 16; ++i) {
        const double r = limit * (i - 0.5) / 16.0;
        pts.push_back({r * dir[0], r * dir[1], r * dir[2]});
    }
    return pts;
}

inline auto ordered_entry(const std::vector<double>& h, const std::vector<double>& err) -> OrderEntry {
    OrderEntry e;
    e.errors = err;
    bool all_zero = true;
    bool all_positive = true;
    for (double v : err) {
        all_zero = all_zero && v == 0.0;
        all_positive = all_positive && v > 0.0 && std::isfinite(v);
    }
    if (all_zero) {
        e.exact = true;
    } else if (all_positive) {
        e.order = fitted_order(h, err);
    }
    return e;
}

/// Runs the same problem on three cubic grids of the given sizes over a fixed half-width
/// and measures observed orders of the solution (Richardson against the finest grid),
/// of the energy drift, and of the final constraint residual.
template <typename MakeInitial>
auto run_study(const PhysParams& p, double half_width, const StencilConfig& sc, RunConfig rc,
               const std::vector<int>& resolutions, MakeInitial&& make_initial) -> Study {
    Study study;
    study.design_order = sc.order;
    rc.output_stride = 1 << 30;
    const double reach = p.R + std::sqrt(std::pow(eos::sound_speed_inf(p), 2) + 1.0) * rc.t_end;
    const std::vector<Vec3> probes = probe_points(reach, half_width, 2.0 * half_width / resolutions.front());
    std::vector<double> hs;
    for (int n : resolutions) {
        const Grid g(n, half_width);
        const State s0 = make_initial(p, g);
        const RunOutcome out = solver::run(s0, p, g, sc, rc);
        ResolutionResult r;
        r.n = n;
        r.h = g.h(0);
        r.status = out.status;
        r.energy0 = out.series.front().E;
        const State s1 = to_primitive(out.final);
        r.energy_drift = std::abs(diagnostics::energy(s1, p, g) - r.energy0);
        r.div_res0 = out.series.front().div_res;
        r.div_res_end = diagnostics::div_residual(s1, g, sc);
        for (const Vec3& x : probes) {
            r.probes.push_back(interpolate_cubic(s1.rho, g, x) - p.rho_bar);
            for (int i = 0; i < 3; ++i) r.probes.push_back(interpolate_cubic(s1.u[i], g, x));
        }
        hs.push_back(r.h);
        study.runs.push_back(std::move(r));
    }

    std::vector<double> drift;
    std::vector<double> div;
    for (const auto& r : study.runs) {
        drift.push_back(r.energy_drift);
        div.push_back(r.div_res_end);
    }
    study.energy = ordered_entry(hs, drift);
    study.div_residual = ordered_entry(hs, div);

    const auto& fine = study.runs.back().probes;
    std::vector<double> diff;
    for (std::size_t i = 0; i + 1 < study.runs.size(); ++i) {
        double e = 0.0;
        for (std::size_t q = 0; q < fine.size(); ++q) e = std::max(e, std::abs(study.runs[i].probes[q] - fine[q]));
        diff.push_back(e);
    }
    study.solution.errors = diff;
    if (diff[0] == 0.0 && diff[1] == 0.0) {
        study.solution.exact = true;
    } else {
        study.solution.order = richardson_order(hs[0], hs[1], hs[2], diff[0], diff[1]);
    }
    return study;
}

} // namespace elastoblow::convergence
