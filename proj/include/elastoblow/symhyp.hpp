#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "elastoblow/core_types.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/eos.hpp"

namespace elastoblow::symhyp {

inline constexpr int kDim = 13;

using SymVector = Eigen::Matrix<double, kDim, 1>;
using SymMatrix = Eigen::Matrix<double, kDim, kDim>;

/// Slot of F(i, k) in the symmetric vector: columns F_1, F_2, F_3 follow P_hat and u.
constexpr auto f_slot(int i, int k) noexcept -> int { return 4 + 3 * k + i; }
constexpr auto u_slot(int i) noexcept -> int { return 1 + i; }
inline constexpr int kPhatSlot = 0;

struct PointState {
    double rho = 1.0;
    Vec3 u{0.0, 0.0, 0.0};
    Mat3 F = identity3();
};

inline auto point_of(const State& s, std::size_t c) -> PointState { return {s.rho[c], s.velocity(c), s.deformation(c)}; }

/// V = [P_hat; u; F_1; F_2; F_3].
inline auto to_sym_state(const PointState& ps, const PhysParams& p) -> SymVector {
    SymVector v;
    v[kPhatSlot] = eos::p_hat(ps.rho, p);
    for (int i = 0; i < 3; ++i) {
        v[u_slot(i)] = ps.u[i];
        for (int k = 0; k < 3; ++k) {
            v[f_slot(i, k)] = ps.F[mat_index(i, k)];
        }
    }
    return v;
}

struct SymbolMatrices {
    SymMatrix A0;
    std::array<SymMatrix, 3> Ai;
};

/// Leading coefficient 1 / (A gamma rho^(gamma - 1)) of the pressure-potential row.
inline auto pressure_row_coefficient(double rho, const PhysParams& p) -> double {
    return 1.0 / eos::sound_speed_sq(rho, p);
}

/// Builds A0 and A1..A3 of A0 V_t + sum_i Ai V_{x_i} = 0.
inline auto assemble(const PointState& ps, const PhysParams& p) -> SymbolMatrices {
    if (!(ps.rho > 0.0)) {
        throw Error(ErrorCode::DegenerateDensity, "symbol assembly at nonpositive density");
    }
    const double a0 = pressure_row_coefficient(ps.rho, p);
    SymbolMatrices out;
    out.A0.setIdentity();
    out.A0(kPhatSlot, kPhatSlot) = a0;
    for (int d = 0; d < 3; ++d) {
        SymMatrix& a = out.Ai[static_cast<std::size_t>(d)];
        a.setZero();
        const double ud = ps.u[d];
        a(kPhatSlot, kPhatSlot) = a0 * ud;
        a(kPhatSlot, u_slot(d)) = 1.0;
        a(u_slot(d), kPhatSlot) = 1.0;
        for (int l = 0; l < 3; ++l) {
            a(u_slot(l), u_slot(l)) = ud;
            for (int k = 0; k < 3; ++k) {
                const double coupling = -ps.F[mat_index(d, k)];
                a(u_slot(l), f_slot(l, k)) = coupling;
                a(f_slot(l, k), u_slot(l)) = coupling;
                a(f_slot(l, k), f_slot(l, k)) = ud;
            }
        }
    }
    return out;
}

/// Directional symbol A0^{-1} sum_i n_i Ai.
inline auto directional_symbol(const SymbolMatrices& m, const Vec3& n) -> SymMatrix {
    SymMatrix s = n[0] * m.Ai[0] + n[1] * m.Ai[1] + n[2] * m.Ai[2];
    s.row(kPhatSlot) /= m.A0(kPhatSlot, kPhatSlot);
    return s;
}

inline auto operator_norm(const Mat3& F) -> double {
    Eigen::Matrix3d f;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            f(i, j) = F[mat_index(i, j)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(f.transpose() * f, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

/// Upper bound |u| + sqrt(c^2 + |F|_op^2) on the spectral radius of the directional
/// symbol over all unit directions. For a fixed direction n the nonzero symmetrised
/// coupling eigenvalues are +-sqrt(c^2 + |F^T n|^2) and +-|F^T n|.
inline auto max_char_speed(const PointState& ps, const PhysParams& p) -> double {
    const double c2 = eos::sound_speed_sq(ps.rho, p);
    const double f = operator_norm(ps.F);
    return norm(ps.u) + std::sqrt(c2 + f * f);
}

/// Maximum of max_char_speed over every cell of a state.
inline auto max_char_speed(const State& s, const Grid& g, const PhysParams& p) -> double {
    return reduce_max(g, [&](int, int, int, std::size_t c) { return max_char_speed(point_of(s, c), p); });
}

struct HyperbolicityReport {
    double symmetry_defect = 0.0;
    double a0_min_diag = 0.0;
    bool degenerate_density = false;
    bool pass = false;
};

inline auto check_hyperbolicity(const PointState& ps, const PhysParams& p) -> HyperbolicityReport {
    HyperbolicityReport r;
    if (!(ps.rho > 0.0) || !std::isfinite(ps.rho)) {
        r.degenerate_density = true;
        return r;
    }
    const SymbolMatrices m = assemble(ps, p);
    for (const SymMatrix& a : m.Ai) {
        r.symmetry_defect = std::max(r.symmetry_defect, (a - a.transpose()).cwiseAbs().maxCoeff());
    }
    r.a0_min_diag = m.A0.diagonal().minCoeff();
    r.pass = r.symmetry_defect == 0.0 && r.a0_min_diag > 0.0 && std::isfinite(r.a0_min_diag);
    return r;
}

/// V_t = -A0^{-1} sum_i Ai dV_i at one point, given the spatial derivatives of V.
inline auto quasilinear_rhs(const PointState& ps, const std::array<SymVector, 3>& dV, const PhysParams& p)
    -> SymVector {
    const SymbolMatrices m = assemble(ps, p);
    SymVector flux = m.Ai[0] * dV[0] + m.Ai[1] * dV[1] + m.Ai[2] * dV[2];
    flux[kPhatSlot] /= m.A0(kPhatSlot, kPhatSlot);
    return -flux;
}

/// Symmetric-form time derivative of V on every interior cell, using the
/// discrete first-derivative operator for the spatial derivatives of V.
/// Returns the 13 component fields of V_t (zero on the collar).
inline auto symmetric_form_rhs(const State& s, const Grid& g, const StencilConfig& c, const PhysParams& p)
    -> std::array<ScalarField, kDim> {
    stencil::check_grid(g, c);
    const std::size_t n = s.size();
    std::array<ScalarField, kDim> V;
    for (auto& f : V) {
        f.assign(n, 0.0);
    }
    for (std::size_t x = 0; x < n; ++x) {
        const SymVector v = to_sym_state(point_of(s, x), p);
        for (int q = 0; q < kDim; ++q) {
            V[static_cast<std::size_t>(q)][x] = v[q];
        }
    }
    std::array<std::array<ScalarField, kDim>, 3> dV;
    for (int d = 0; d < 3; ++d) {
        for (int q = 0; q < kDim; ++q) {
            dV[d][q] = derivative(V[static_cast<std::size_t>(q)], g, c, d);
        }
    }
    std::array<ScalarField, kDim> out;
    for (auto& f : out) {
        f.assign(n, 0.0);
    }
    stencil::for_interior(g, c.collar(), [&](std::size_t x) {
        std::array<SymVector, 3> local;
        for (int d = 0; d < 3; ++d) {
            for (int q = 0; q < kDim; ++q) {
                local[static_cast<std::size_t>(d)][q] = dV[d][q][x];
            }
        }
        const SymVector r = quasilinear_rhs(point_of(s, x), local, p);
        for (int q = 0; q < kDim; ++q) {
            out[static_cast<std::size_t>(q)][x] = r[q];
        }
    });
    return out;
}

} // namespace elastoblow::symhyp
