#pragma once

#include <cstddef>
#include <string>

#include "elastoblow/core_types.hpp"

namespace elastoblow {

/// Spatial scheme: central differences of the given order plus artificial
/// dissipation of order (order + 2).
struct StencilConfig {
    int order = 2;
    double dissipation_coeff = 0.02;

    void validate() const {
        if (order != 2 && order != 4) {
            throw Error(ErrorCode::InvalidParameters, "order must be 2 or 4 (got " + std::to_string(order) + ")");
        }
        if (!(dissipation_coeff >= 0.0)) {
            throw Error(ErrorCode::InvalidParameters, "dissipation_coeff must be nonnegative");
        }
    }

    /// Half-width of the first-derivative stencil.
    [[nodiscard]] constexpr auto radius() const noexcept -> int { return order / 2; }
    /// Width of the pinned far-field collar; also the dissipation stencil half-width.
    [[nodiscard]] constexpr auto collar() const noexcept -> int { return order / 2 + 1; }
};

namespace stencil {

inline void check_grid(const Grid& g, const StencilConfig& c) {
    c.validate();
    for (int d = 0; d < 3; ++d) {
        if (g.n(d) < 2 * c.collar() + 1) {
            throw Error(ErrorCode::GridTooSmall, "axis " + std::to_string(d) + " has " + std::to_string(g.n(d)) +
                                                     " cells; order " + std::to_string(c.order) + " needs at least " +
                                                     std::to_string(2 * c.collar() + 1));
        }
    }
}

/// Calls kernel(linear_index) for every cell at least `width` cells away from the boundary.
template <typename Kernel>
void for_interior(const Grid& g, int width, Kernel&& kernel) {
    const int nx = g.n(0);
    const int ny = g.n(1);
    const int nz = g.n(2);
    parallel_for(width, nz - width, [&](std::ptrdiff_t kk) {
        const int k = static_cast<int>(kk);
        for (int j = width; j < ny - width; ++j) {
            const std::size_t row = g.index(0, j, k);
            for (int i = width; i < nx - width; ++i) {
                kernel(row + static_cast<std::size_t>(i));
            }
        }
    });
}

inline auto in_interior(const Grid& g, int width, int i, int j, int k) noexcept -> bool {
    return i >= width && i < g.n(0) - width && j >= width && j < g.n(1) - width && k >= width && k < g.n(2) - width;
}

/// out += scale * d(in)/dx_axis on interior cells.
inline void add_derivative(const double* in, double* out, const Grid& g, const StencilConfig& c, int axis,
                           double scale) {
    const std::ptrdiff_t s = g.stride(axis);
    const double a = scale / g.h(axis);
    if (c.order == 2) {
        for_interior(g, c.collar(), [=](std::size_t x) { out[x] += a * 0.5 * (in[x + s] - in[x - s]); });
    } else {
        constexpr double w1 = 2.0 / 3.0;
        constexpr double w2 = -1.0 / 12.0;
        for_interior(g, c.collar(), [=](std::size_t x) {
            out[x] += a * (w1 * (in[x + s] - in[x - s]) + w2 * (in[x + 2 * s] - in[x - 2 * s]));
        });
    }
}

/// out += scale * d2(in)/dx_axis^2 on interior cells (compact second-derivative stencil).
inline void add_second_derivative(const double* in, double* out, const Grid& g, const StencilConfig& c, int axis,
                                  double scale) {
    const std::ptrdiff_t s = g.stride(axis);
    const double h = g.h(axis);
    const double a = scale / (h * h);
    if (c.order == 2) {
        for_interior(g, c.collar(), [=](std::size_t x) { out[x] += a * ((in[x + s] + in[x - s]) - 2.0 * in[x]); });
    } else {
        const double b = a / 12.0;
        for_interior(g, c.collar(), [=](std::size_t x) {
            out[x] += b * (16.0 * (in[x + s] + in[x - s]) - (in[x + 2 * s] + in[x - 2 * s]) - 30.0 * in[x]);
        });
    }
}

/// out += artificial dissipation of `in` along every axis, scaled by speed / h.
/// Order-2 schemes get -(eps s / h) delta^4, order-4 schemes +(eps s / h) delta^6,
/// i.e. -(eps s / h)(-delta^2)^p with p = order/2 + 1. Both are undivided
/// differences, so they annihilate constants and telescope over the grid.
inline void add_dissipation(const double* in, double* out, const Grid& g, const StencilConfig& c, double speed) {
    if (c.dissipation_coeff == 0.0 || speed == 0.0) {
        return;
    }
    for (int axis = 0; axis < 3; ++axis) {
        const std::ptrdiff_t s = g.stride(axis);
        const double a = c.dissipation_coeff * speed / g.h(axis);
        if (c.order == 2) {
            for_interior(g, c.collar(), [=](std::size_t x) {
                const double d4 = (in[x + 2 * s] + in[x - 2 * s]) - 4.0 * (in[x + s] + in[x - s]) + 6.0 * in[x];
                out[x] -= a * d4;
            });
        } else {
            for_interior(g, c.collar(), [=](std::size_t x) {
                const double d6 = (in[x + 3 * s] + in[x - 3 * s]) - 6.0 * (in[x + 2 * s] + in[x - 2 * s]) +
                                  15.0 * (in[x + s] + in[x - s]) - 20.0 * in[x];
                out[x] += a * d6;
            });
        }
    }
}

/// out = -(D_x fx + D_y fy + D_z fz) + dissipation(state) on interior cells, in one sweep.
/// Same arithmetic as add_derivative followed by add_dissipation, fused to cut memory traffic.
inline void assign_divergence_with_dissipation(const std::array<const double*, 3>& flux, const double* state,
                                               double* out, const Grid& g, const StencilConfig& c, double speed) {
    const std::ptrdiff_t s0 = g.stride(0);
    const std::ptrdiff_t s1 = g.stride(1);
    const std::ptrdiff_t s2 = g.stride(2);
    const double a0 = 1.0 / g.h(0);
    const double a1 = 1.0 / g.h(1);
    const double a2 = 1.0 / g.h(2);
    const bool dissipate = c.dissipation_coeff != 0.0 && speed != 0.0;
    const double e0 = dissipate ? c.dissipation_coeff * speed * a0 : 0.0;
    const double e1 = dissipate ? c.dissipation_coeff * speed * a1 : 0.0;
    const double e2 = dissipate ? c.dissipation_coeff * speed * a2 : 0.0;
    const double* fx = flux[0];
    const double* fy = flux[1];
    const double* fz = flux[2];
    if (c.order == 2) {
        auto d4 = [state](std::size_t x, std::ptrdiff_t s) {
            return (state[x + 2 * s] + state[x - 2 * s]) - 4.0 * (state[x + s] + state[x - s]) + 6.0 * state[x];
        };
        for_interior(g, c.collar(), [=](std::size_t x) {
            const double div = a0 * 0.5 * (fx[x + s0] - fx[x - s0]) + a1 * 0.5 * (fy[x + s1] - fy[x - s1]) +
                               a2 * 0.5 * (fz[x + s2] - fz[x - s2]);
            double v = -div;
            if (dissipate) v -= e0 * d4(x, s0) + e1 * d4(x, s1) + e2 * d4(x, s2);
            out[x] = v;
        });
    } else {
        constexpr double w1 = 2.0 / 3.0;
        constexpr double w2 = -1.0 / 12.0;
        auto d1 = [](const double* f, std::size_t x, std::ptrdiff_t s) {
            return w1 * (f[x + s] - f[x - s]) + w2 * (f[x + 2 * s] - f[x - 2 * s]);
        };
        auto d6 = [state](std::size_t x, std::ptrdiff_t s) {
            return (state[x + 3 * s] + state[x - 3 * s]) - 6.0 * (state[x + 2 * s] + state[x - 2 * s]) +
                   15.0 * (state[x + s] + state[x - s]) - 20.0 * state[x];
        };
        for_interior(g, c.collar(), [=](std::size_t x) {
            const double div = a0 * d1(fx, x, s0) + a1 * d1(fy, x, s1) + a2 * d1(fz, x, s2);
            double v = -div;
            if (dissipate) v += e0 * d6(x, s0) + e1 * d6(x, s1) + e2 * d6(x, s2);
            out[x] = v;
        });
    }
}

} // namespace stencil

inline auto derivative(const ScalarField& f, const Grid& g, const StencilConfig& c, int axis) -> ScalarField {
    stencil::check_grid(g, c);
    ScalarField out(f.size(), 0.0);
    stencil::add_derivative(f.data(), out.data(), g, c, axis, 1.0);
    return out;
}

inline auto grad(const ScalarField& f, const Grid& g, const StencilConfig& c) -> VectorField {
    stencil::check_grid(g, c);
    VectorField out = make_vector_field(f.size());
    for (int d = 0; d < 3; ++d) {
        stencil::add_derivative(f.data(), out[d].data(), g, c, d, 1.0);
    }
    return out;
}

inline auto div_vec(const VectorField& v, const Grid& g, const StencilConfig& c) -> ScalarField {
    stencil::check_grid(g, c);
    ScalarField out(v[0].size(), 0.0);
    for (int d = 0; d < 3; ++d) {
        stencil::add_derivative(v[d].data(), out.data(), g, c, d, 1.0);
    }
    return out;
}

/// Row-wise divergence: out_j = sum_k d_k M(j, k).
inline auto div_mat_rows(const MatrixField& m, const Grid& g, const StencilConfig& c) -> VectorField {
    stencil::check_grid(g, c);
    VectorField out = make_vector_field(m[0].size());
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            stencil::add_derivative(m[mat_index(j, k)].data(), out[j].data(), g, c, k, 1.0);
        }
    }
    return out;
}

/// Velocity gradient G(i, k) = d u_i / d x_k.
inline auto velocity_gradient(const VectorField& u, const Grid& g, const StencilConfig& c) -> MatrixField {
    stencil::check_grid(g, c);
    MatrixField out = make_matrix_field(u[0].size());
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            stencil::add_derivative(u[i].data(), out[mat_index(i, k)].data(), g, c, k, 1.0);
        }
    }
    return out;
}

inline auto laplacian(const ScalarField& f, const Grid& g, const StencilConfig& c) -> ScalarField {
    stencil::check_grid(g, c);
    ScalarField out(f.size(), 0.0);
    for (int d = 0; d < 3; ++d) {
        stencil::add_second_derivative(f.data(), out.data(), g, c, d, 1.0);
    }
    return out;
}

inline auto laplacian(const VectorField& v, const Grid& g, const StencilConfig& c) -> VectorField {
    return {laplacian(v[0], g, c), laplacian(v[1], g, c), laplacian(v[2], g, c)};
}

inline auto laplacian(const MatrixField& m, const Grid& g, const StencilConfig& c) -> MatrixField {
    MatrixField out;
    for (int q = 0; q < 9; ++q) {
        out[q] = laplacian(m[q], g, c);
    }
    return out;
}

/// Conservative divergence of a flux triple: sum_d d_d flux_d. Central
/// differences are differences of interface averages, so the cell sum telescopes.
inline auto flux_div(const std::array<ScalarField, 3>& flux, const Grid& g, const StencilConfig& c) -> ScalarField {
    return div_vec(flux, g, c);
}

/// Artificial dissipation applied to one field, for inspection and testing.
inline auto dissipation(const ScalarField& f, const Grid& g, const StencilConfig& c, double speed) -> ScalarField {
    stencil::check_grid(g, c);
    ScalarField out(f.size(), 0.0);
    stencil::add_dissipation(f.data(), out.data(), g, c, speed);
    return out;
}

} // namespace elastoblow
