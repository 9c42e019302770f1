#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "elastoblow/core_types.hpp"
#include "elastoblow/diagnostics.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/eos.hpp"

namespace elastoblow {

/// Compactly supported radial initial disturbance around the origin.
///
/// Profile phi(r) = (1 - r^2/R^2)^4 on r < R. The velocity is the outward field
/// velocity_amplitude * phi(r) * x / R and the density rho_bar + density_bump * phi(r).
/// The deformation gradient comes from rows of rho0 F0^T = rho_bar e_j + curl(Psi_j),
/// with Psi_j = F_potential_amplitude * R * (1 - r^2/R^2)^8 e_{j+1}, so every row is
/// divergence free at the continuum level.
struct BumpSpec {
    double velocity_amplitude = 0.0;
    double density_bump = 0.0;
    double F_potential_amplitude = 0.0;
};

struct HypothesisReport {
    double m0 = 0.0;
    double F0_functional = 0.0;
    double E0 = 0.0;
    /// integral of rho0 tr(I - F0).
    double trace0 = 0.0;
    double rho0_sup = 0.0;
    double sigma = 0.0;
    double threshold = 0.0;
    bool cond_FF1 = false;
    bool cond_FF = false;
    bool cond_a2 = false;
    std::optional<double> T_upper;
    double div_residual0 = 0.0;

    [[nodiscard]] auto all_hold() const noexcept -> bool { return cond_FF1 && cond_FF && cond_a2; }
};

struct CompatibilityReport {
    double g_l2 = 0.0;
    double g_h1_seminorm = 0.0;
    double sqrt_rho_g_l2 = 0.0;
    std::size_t flagged_cells = 0;
    bool pass = false;
};

namespace initdata {

inline auto profile(double r, double R) noexcept -> double {
    if (r >= R) {
        return 0.0;
    }
    const double s = 1.0 - (r * r) / (R * R);
    return s * s * s * s;
}

/// Shrink d of the diagonal of F0 = (rho_bar / rho0) I at the bump centre, expressed as a density bump.
inline auto density_bump_for_shrink(double d, double rho_bar) -> double {
    if (!(d >= 0.0 && d < 1.0)) {
        throw Error(ErrorCode::InvalidParameters, "diagonal shrink must lie in [0, 1)");
    }
    return rho_bar * d / (1.0 - d);
}

inline auto make_equilibrium(const PhysParams& p, const Grid& g) -> State {
    State s(g);
    std::fill(s.rho.begin(), s.rho.end(), p.rho_bar);
    for (int j = 0; j < 3; ++j) {
        std::fill(s.F[mat_index(j, j)].begin(), s.F[mat_index(j, j)].end(), 1.0);
    }
    return s;
}

/// Analytic curl(Psi_j) at x for unit potential amplitude.
inline auto potential_curl_row(const Vec3& x, double R, int j) -> Vec3 {
    const double r2 = dot(x, x);
    if (r2 >= R * R) {
        return {0.0, 0.0, 0.0};
    }
    const double s = 1.0 - r2 / (R * R);
    const double s7 = s * s * s * s * s * s * s;
    // curl(psi(r) e) = grad(psi) x e, grad psi = -16 R^-2 s^7 x times the factor R.
    const double scale = -16.0 / R * s7;
    const int m = (j + 1) % 3;
    Vec3 e{0.0, 0.0, 0.0};
    e[m] = 1.0;
    return {scale * (x[1] * e[2] - x[2] * e[1]), scale * (x[2] * e[0] - x[0] * e[2]),
            scale * (x[0] * e[1] - x[1] * e[0])};
}

inline auto make_bump(const BumpSpec& spec, const PhysParams& p, const Grid& g) -> State {
    p.validate();
    if (!std::isfinite(spec.velocity_amplitude) || !std::isfinite(spec.density_bump) ||
        !std::isfinite(spec.F_potential_amplitude)) {
        throw Error(ErrorCode::InvalidInitialData, "bump amplitudes must be finite");
    }
    if (spec.density_bump <= -p.rho_bar) {
        throw Error(ErrorCode::NonPositiveDensity,
                    "density_bump " + std::to_string(spec.density_bump) + " drives the density nonpositive");
    }
    if (!(p.R < g.half_width())) {
        throw Error(ErrorCode::InvalidInitialData, "support radius R must be smaller than the grid half-width");
    }
    State s = make_equilibrium(p, g);
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const Vec3 x = g.center(i, j, k);
                const double r = norm(x);
                if (r >= p.R) {
                    continue;
                }
                const std::size_t c = g.index(i, j, k);
                const double phi = profile(r, p.R);
                const double rho = p.rho_bar + spec.density_bump * phi;
                s.rho[c] = rho;
                for (int d = 0; d < 3; ++d) {
                    s.u[d][c] = spec.velocity_amplitude * phi * x[d] / p.R;
                }
                for (int row = 0; row < 3; ++row) {
                    const Vec3 curl = potential_curl_row(x, p.R, row);
                    for (int col = 0; col < 3; ++col) {
                        const double q = (row == col ? p.rho_bar : 0.0) + spec.F_potential_amplitude * curl[col];
                        // Q(row, col) = rho F(col, row)
                        s.F[mat_index(col, row)][c] = q / rho;
                    }
                }
            }
        }
    }
    return s;
}

/// Preconditions of the finite-time blowup result, by midpoint quadrature.
inline auto check_hypotheses(const State& s0, const PhysParams& p, const Grid& g,
                             const StencilConfig& sc = {}) -> HypothesisReport {
    HypothesisReport r;
    r.m0 = diagnostics::mass_deviation(s0, p, g);
    r.F0_functional = diagnostics::radial_momentum(s0, p, g);
    r.E0 = diagnostics::energy(s0, p, g);
    r.trace0 = -diagnostics::trace_integral(s0, g);
    r.rho0_sup = reduce_max(g, [&](int, int, int, std::size_t c) { return s0.rho[c]; });
    const diagnostics::RiccatiConstants k = diagnostics::riccati_constants(p, r.rho0_sup);
    r.sigma = k.sigma;
    r.threshold = diagnostics::ff_threshold(k);
    r.cond_FF1 = r.m0 >= 0.0;
    r.cond_FF = r.F0_functional > r.threshold;
    r.cond_a2 = r.trace0 >= 2.0 * r.E0;
    if (r.cond_FF) {
        r.T_upper = diagnostics::blowup_time_upper_bound(r.F0_functional, k);
    }
    r.div_residual0 = diagnostics::div_residual(s0, g, sc);
    return r;
}

/// 7 mu > lambda together with mu >= 0, 3 lambda + 2 mu >= 0.
inline auto check_viscosity(const PhysParams& p) noexcept -> bool { return p.viscosity_admissible() && p.viscous_gate(); }

/// Evaluates g = (-mu lap u0 - (lambda + mu) grad div u0 + A grad rho0^gamma) / rho0.
/// Cells with rho0 <= floor are flagged when the numerator exceeds tol there.
inline auto check_compatibility(const State& s0, const PhysParams& p, const Grid& g, const StencilConfig& sc,
                                double rho_floor, double tol = 1e-10) -> CompatibilityReport {
    const std::size_t n = s0.size();
    const VectorField lap = laplacian(s0.u, g, sc);
    const VectorField grad_div = grad(div_vec(s0.u, g, sc), g, sc);
    ScalarField pressure(n);
    for (std::size_t c = 0; c < n; ++c) {
        pressure[c] = p.A * std::pow(std::max(s0.rho[c], 0.0), p.gamma);
    }
    const VectorField grad_p = grad(pressure, g, sc);

    CompatibilityReport r;
    VectorField gfield = make_vector_field(n);
    for (std::size_t c = 0; c < n; ++c) {
        double num_sq = 0.0;
        Vec3 num{};
        for (int i = 0; i < 3; ++i) {
            num[i] = -p.mu * lap[i][c] - (p.lambda + p.mu) * grad_div[i][c] + grad_p[i][c];
            num_sq += num[i] * num[i];
        }
        if (s0.rho[c] > rho_floor) {
            for (int i = 0; i < 3; ++i) {
                gfield[i][c] = num[i] / s0.rho[c];
            }
        } else if (std::sqrt(num_sq) > tol) {
            ++r.flagged_cells;
        }
    }
    const double vol = g.cell_volume();
    r.g_l2 = std::sqrt(vol * reduce_sum(g, [&](int, int, int, std::size_t c) {
                           return dot({gfield[0][c], gfield[1][c], gfield[2][c]}, {gfield[0][c], gfield[1][c], gfield[2][c]});
                       }));
    r.sqrt_rho_g_l2 = std::sqrt(vol * reduce_sum(g, [&](int, int, int, std::size_t c) {
                                    const Vec3 v{gfield[0][c], gfield[1][c], gfield[2][c]};
                                    return std::max(s0.rho[c], 0.0) * dot(v, v);
                                }));
    const MatrixField dg = velocity_gradient(gfield, g, sc);
    r.g_h1_seminorm = std::sqrt(vol * reduce_sum(g, [&](int, int, int, std::size_t c) {
                                    double f = 0.0;
                                    for (int q = 0; q < 9; ++q) {
                                        f += dg[q][c] * dg[q][c];
                                    }
                                    return f;
                                }));
    r.pass = r.flagged_cells == 0 && std::isfinite(r.g_l2) && std::isfinite(r.g_h1_seminorm) &&
             std::isfinite(r.sqrt_rho_g_l2);
    return r;
}

struct A2SearchResult {
    bool found = false;
    BumpSpec spec;
    double shrink = 0.0;
    /// trace0 - 2 E0 for the returned spec.
    double margin = 0.0;
    HypothesisReport report;
};

/// Scans diagonal shrinks (realised as a density bump with F0 = (rho_bar / rho0) I) and
/// potential amplitudes for data meeting the trace condition, keeping the velocity of
/// `base`. Returns the candidate with the largest margin; found is false when none qualifies.
inline auto search_a2(const BumpSpec& base, const PhysParams& p, const Grid& g, const std::vector<double>& shrinks,
                      const std::vector<double>& potential_amplitudes, const StencilConfig& sc = {})
    -> A2SearchResult {
    A2SearchResult best;
    bool have = false;
    for (double d : shrinks) {
        for (double a : potential_amplitudes) {
            BumpSpec spec = base;
            spec.density_bump = density_bump_for_shrink(d, p.rho_bar);
            spec.F_potential_amplitude = a;
            const HypothesisReport rep = check_hypotheses(make_bump(spec, p, g), p, g, sc);
            const double margin = rep.trace0 - 2.0 * rep.E0;
            if (!have || margin > best.margin) {
                best = {rep.cond_a2, spec, d, margin, rep};
                have = true;
            }
        }
    }
    return best;
}

/// Rejects data that the solver cannot start from: nonfinite or nonpositive density,
/// mismatched field sizes, or a collar that differs from the background state.
inline void validate_initial_data(const State& s0, const PhysParams& p, const Grid& g, const StencilConfig& sc,
                                  double tol = 1e-12) {
    if (s0.rho.size() != g.size()) {
        throw Error(ErrorCode::InvalidInitialData, "field size does not match the grid");
    }
    for (const auto& f : s0.u) {
        if (f.size() != g.size()) throw Error(ErrorCode::InvalidInitialData, "velocity size does not match the grid");
    }
    for (const auto& f : s0.F) {
        if (f.size() != g.size()) throw Error(ErrorCode::InvalidInitialData, "deformation size does not match the grid");
    }
    const int w = sc.collar();
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const std::size_t c = g.index(i, j, k);
                if (!(s0.rho[c] > 0.0) || !std::isfinite(s0.rho[c])) {
                    throw Error(ErrorCode::InvalidInitialData, "initial density must be positive and finite");
                }
                const double dev = diagnostics::deviation_from_background(s0, c, p);
                if (!std::isfinite(dev)) {
                    throw Error(ErrorCode::InvalidInitialData, "initial data contain nonfinite values");
                }
                if (!stencil::in_interior(g, w, i, j, k) && dev > tol) {
                    throw Error(ErrorCode::InvalidInitialData,
                                "initial data differ from the far-field state inside the boundary collar");
                }
            }
        }
    }
}

} // namespace initdata
} // namespace elastoblow
