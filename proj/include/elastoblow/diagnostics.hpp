#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "elastoblow/core_types.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/eos.hpp"

namespace elastoblow {

/// One time sample of every monitored functional.
struct DiagnosticsRow {
    double t = 0.0;
    double m = 0.0;
    double Ffun = 0.0;
    double E = 0.0;
    double trace = 0.0;
    double div_res = 0.0;
    double front = 0.0;
    double front_bound = 0.0;
    double bkm = 0.0;
    double gradu_max = 0.0;
    double rho_min = 0.0;
    std::optional<double> riccati_lb;

    friend auto operator==(const DiagnosticsRow&, const DiagnosticsRow&) -> bool = default;
};

namespace diagnostics {

inline constexpr double kDefaultFrontTolerance = 1e-8;

/// m(t): integral of rho - rho_bar.
inline auto mass_deviation(const State& s, const PhysParams& p, const Grid& g) -> double {
    return g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) { return s.rho[c] - p.rho_bar; });
}

/// F(t): integral of rho x.u.
inline auto radial_momentum(const State& s, const PhysParams& /*p*/, const Grid& g) -> double {
    return g.cell_volume() * reduce_sum(g, [&](int i, int j, int k, std::size_t c) {
               const Vec3 x = g.center(i, j, k);
               return s.rho[c] * (x[0] * s.u[0][c] + x[1] * s.u[1][c] + x[2] * s.u[2][c]);
           });
}

/// Pointwise energy density 1/2 rho|u|^2 + 1/2 rho|F - I|^2 + (P - P0)/(gamma - 1).
inline auto energy_density(const State& s, std::size_t c, const PhysParams& p, double P0) -> double {
    const double r = s.rho[c];
    double ke = 0.0;
    for (int i = 0; i < 3; ++i) {
        ke += s.u[i][c] * s.u[i][c];
    }
    double el = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double d = s.F[mat_index(i, j)][c] - (i == j ? 1.0 : 0.0);
            el += d * d;
        }
    }
    const double P = p.A * std::pow(r, p.gamma);
    return 0.5 * r * ke + 0.5 * r * el + (P - P0) / (p.gamma - 1.0);
}

/// E(t).
inline auto energy(const State& s, const PhysParams& p, const Grid& g) -> double {
    const double P0 = eos::background_pressure(p);
    return g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) { return energy_density(s, c, p, P0); });
}

/// Integral of rho tr(F - I).
inline auto trace_integral(const State& s, const Grid& g) -> double {
    return g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) {
               return s.rho[c] * ((s.F[0][c] - 1.0) + (s.F[4][c] - 1.0) + (s.F[8][c] - 1.0));
           });
}

/// Integral of rho u.
inline auto total_momentum(const State& s, const Grid& g) -> Vec3 {
    Vec3 out{};
    for (int i = 0; i < 3; ++i) {
        out[i] = g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) { return s.rho[c] * s.u[i][c]; });
    }
    return out;
}

/// Integral of rho |u|, a scale for momentum drift when the total is zero by symmetry.
inline auto momentum_magnitude(const State& s, const Grid& g) -> double {
    return g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) { return s.rho[c] * norm(s.velocity(c)); });
}

inline auto rho_min(const State& s, const Grid& g) -> double {
    return -reduce_max(g, [&](int, int, int, std::size_t c) { return -s.rho[c]; }, -std::numeric_limits<double>::infinity());
}

/// rho F^T as a matrix field: entry (j, k) = rho F(k, j).
inline auto rho_F_transpose(const State& s) -> MatrixField {
    MatrixField q = make_matrix_field(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                q[mat_index(j, k)][c] = s.rho[c] * s.F[mat_index(k, j)][c];
            }
        }
    }
    return q;
}

/// Max-norm of the discrete row divergence of Q = rho F^T.
inline auto div_residual(const MatrixField& Q, const Grid& g, const StencilConfig& sc) -> double {
    const VectorField d = div_mat_rows(Q, g, sc);
    return reduce_max(g, [&](int, int, int, std::size_t c) {
        return std::max({std::abs(d[0][c]), std::abs(d[1][c]), std::abs(d[2][c])});
    });
}

inline auto div_residual(const State& s, const Grid& g, const StencilConfig& sc) -> double {
    return div_residual(rho_F_transpose(s), g, sc);
}

inline auto deviation_from_background(const State& s, std::size_t c, const PhysParams& p) -> double {
    double dev = std::abs(s.rho[c] - p.rho_bar);
    auto take = [&dev](double v) {
        if (std::isnan(v) || v > dev) dev = std::isnan(dev) ? dev : v;
    };
    for (int i = 0; i < 3; ++i) {
        take(std::abs(s.u[i][c]));
    }
    for (int q = 0; q < 9; ++q) {
        const double id = (q == 0 || q == 4 || q == 8) ? 1.0 : 0.0;
        take(std::abs(s.F[q][c] - id));
    }
    return std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev;
}

/// Largest |x| over cell centres where the state deviates from (rho_bar, 0, I) by more than tol.
inline auto front_radius(const State& s, const PhysParams& p, const Grid& g,
                         double tol = kDefaultFrontTolerance) -> double {
    return reduce_max(g, [&](int i, int j, int k, std::size_t c) {
        return !(deviation_from_background(s, c, p) <= tol) ? norm(g.center(i, j, k)) : 0.0;
    });
}

struct VelocityGradientStats {
    /// max over cells of |grad u| (Frobenius).
    double gradu_max = 0.0;
    /// sum over cells of [mu |grad u|^2 + (mu + lambda)(div u)^2] h^3.
    double dissipation_rate = 0.0;
};

inline auto velocity_gradient_stats(const State& s, const PhysParams& p, const Grid& g, const StencilConfig& sc)
    -> VelocityGradientStats {
    const MatrixField G = velocity_gradient(s.u, g, sc);
    VelocityGradientStats out;
    out.gradu_max = std::sqrt(reduce_max(g, [&](int, int, int, std::size_t c) {
        double f = 0.0;
        for (int q = 0; q < 9; ++q) {
            f += G[q][c] * G[q][c];
        }
        return f;
    }));
    if (p.mu != 0.0 || p.lambda != 0.0) {
        out.dissipation_rate = g.cell_volume() * reduce_sum(g, [&](int, int, int, std::size_t c) {
                                   double f = 0.0;
                                   for (int q = 0; q < 9; ++q) {
                                       f += G[q][c] * G[q][c];
                                   }
                                   const double dv = G[0][c] + G[4][c] + G[8][c];
                                   return p.mu * f + (p.mu + p.lambda) * dv * dv;
                               });
    }
    return out;
}

/// Trapezoidal increment of the time integral of |grad u|_inf.
inline auto bkm_accumulate(double prev, double gradu_max_now, double gradu_max_prev, double dt) -> double {
    return prev + 0.5 * dt * (gradu_max_now + gradu_max_prev);
}

/// Constants of the Riccati comparison: far-field sound speed, support radius, sup of the initial density.
struct RiccatiConstants {
    double sigma = 1.0;
    double R = 1.0;
    double rho0_sup = 1.0;
};

inline auto riccati_constants(const PhysParams& p, double rho0_sup) -> RiccatiConstants {
    return {eos::sound_speed_inf(p), p.R, rho0_sup};
}

/// (16 pi / 3) sigma R^4 |rho0|_inf: the initial radial momentum must exceed this.
inline auto ff_threshold(const RiccatiConstants& k) -> double {
    return 16.0 * std::numbers::pi / 3.0 * k.sigma * std::pow(k.R, 4) * k.rho0_sup;
}

/// 1/y(t) for the comparison solution; nonpositive once the bound has diverged.
inline auto riccati_inverse(double t, double F0, const RiccatiConstants& k) -> double {
    const double K = 3.0 / (16.0 * std::numbers::pi * k.sigma * k.rho0_sup);
    const double front = k.sigma * t + k.R;
    return 1.0 / F0 - K * (1.0 / std::pow(k.R, 4) - 1.0 / std::pow(front, 4));
}

/// Closed-form solution of y' = y^2 / ((4 pi / 3)(sigma t + R)^5 |rho0|_inf), y(0) = F0.
/// Returns +infinity once the denominator is no longer positive.
inline auto riccati_lower_bound(double t, double F0, const RiccatiConstants& k) -> double {
    if (!(F0 > 0.0)) {
        throw Error(ErrorCode::InvalidFunctional, "Riccati bound needs a positive initial radial momentum");
    }
    const double inv = riccati_inverse(t, F0, k);
    return inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity();
}

/// Upper bound on the lifespan of a smooth solution; none unless F0 exceeds ff_threshold strictly.
inline auto blowup_time_upper_bound(double F0, const RiccatiConstants& k) -> std::optional<double> {
    if (!(F0 > ff_threshold(k))) {
        return std::nullopt;
    }
    const double base = 1.0 / std::pow(k.R, 4) - 16.0 * std::numbers::pi * k.sigma * k.rho0_sup / (3.0 * F0);
    return (std::pow(base, -0.25) - k.R) / k.sigma;
}

/// Running accumulator state carried between samples.
struct BkmCarry {
    double t = 0.0;
    double gradu_max = 0.0;
    double bkm = 0.0;
};

struct RiccatiContext {
    double F0 = 0.0;
    RiccatiConstants constants;
};

struct SampleContext {
    double front_tolerance = kDefaultFrontTolerance;
    std::optional<RiccatiContext> riccati;
};

/// Assembles one row. The BKM integral advances from `prev` by one trapezoid.
inline auto sample(const State& s, const PhysParams& p, const Grid& g, const StencilConfig& sc,
                   const SampleContext& ctx, const std::optional<BkmCarry>& prev) -> DiagnosticsRow {
    DiagnosticsRow row;
    row.t = s.t;
    row.m = mass_deviation(s, p, g);
    row.Ffun = radial_momentum(s, p, g);
    row.E = energy(s, p, g);
    row.trace = trace_integral(s, g);
    row.div_res = div_residual(s, g, sc);
    row.front = front_radius(s, p, g, ctx.front_tolerance);
    row.front_bound = eos::sound_speed_inf(p) * s.t + p.R;
    row.gradu_max = velocity_gradient_stats(s, p, g, sc).gradu_max;
    row.rho_min = rho_min(s, g);
    if (prev) {
        row.bkm = bkm_accumulate(prev->bkm, row.gradu_max, prev->gradu_max, s.t - prev->t);
    }
    if (ctx.riccati) {
        row.riccati_lb = riccati_lower_bound(s.t, ctx.riccati->F0, ctx.riccati->constants);
    }
    return row;
}

} // namespace diagnostics
} // namespace elastoblow
