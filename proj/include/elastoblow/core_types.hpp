#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "elastoblow/error.hpp"
#include "elastoblow/parallel.hpp"

namespace elastoblow {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3 matrix: entry (i, j) lives at 3 * i + j.
using Mat3 = std::array<double, 9>;

constexpr auto mat_index(int i, int j) noexcept -> int { return 3 * i + j; }

constexpr auto identity3() noexcept -> Mat3 { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

inline auto dot(const Vec3& a, const Vec3& b) noexcept -> double {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline auto norm(const Vec3& a) noexcept -> double { return std::sqrt(dot(a, a)); }

inline auto frobenius_sq(const Mat3& a) noexcept -> double {
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return s;
}

inline auto transpose(const Mat3& a) noexcept -> Mat3 {
    return {a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]};
}

/// Physical constants of the gamma-law elastic fluid.
struct PhysParams {
    double A = 1.0;
    double gamma = 2.0;
    double mu = 0.0;
    double lambda = 0.0;
    double rho_bar = 1.0;
    double R = 1.0;

    /// Throws InvalidParameters naming the first offending field.
    void validate() const {
        if (!(A > 0.0) || !std::isfinite(A)) {
            throw Error(ErrorCode::InvalidParameters, "A must be positive (got " + std::to_string(A) + ")");
        }
        if (!(gamma > 1.0) || !std::isfinite(gamma)) {
            throw Error(ErrorCode::InvalidParameters, "gamma must exceed 1 (got " + std::to_string(gamma) + ")");
        }
        if (!(rho_bar > 0.0) || !std::isfinite(rho_bar)) {
            throw Error(ErrorCode::InvalidParameters, "rho_bar must be positive (got " + std::to_string(rho_bar) + ")");
        }
        if (!(R > 0.0) || !std::isfinite(R)) {
            throw Error(ErrorCode::InvalidParameters, "R must be positive (got " + std::to_string(R) + ")");
        }
        if (!(mu >= 0.0) || !std::isfinite(mu)) {
            throw Error(ErrorCode::InvalidParameters, "mu must be nonnegative (got " + std::to_string(mu) + ")");
        }
        if (!(3.0 * lambda + 2.0 * mu >= 0.0) || !std::isfinite(lambda)) {
            throw Error(ErrorCode::InvalidParameters,
                        "lambda violates 3*lambda + 2*mu >= 0 (lambda=" + std::to_string(lambda) +
                            ", mu=" + std::to_string(mu) + ")");
        }
    }

    [[nodiscard]] auto viscosity_admissible() const noexcept -> bool {
        return mu >= 0.0 && 3.0 * lambda + 2.0 * mu >= 0.0;
    }

    [[nodiscard]] auto viscous_gate() const noexcept -> bool { return 7.0 * mu > lambda; }

    /// Additional gate for viscous runs: 7 mu > lambda.
    void validate_viscous() const {
        validate();
        if (!viscous_gate()) {
            throw Error(ErrorCode::InvalidParameters,
                        "lambda violates 7*mu > lambda required for viscous runs (mu=" + std::to_string(mu) +
                            ", lambda=" + std::to_string(lambda) + ")");
        }
    }
};

/// Uniform cell-centred grid covering the cube [-L, L]^3.
class Grid {
public:
    Grid() = default;

    Grid(std::array<int, 3> cells, double half_width) : n_(cells), half_width_(half_width) {
        if (!(half_width > 0.0)) {
            throw Error(ErrorCode::InvalidParameters, "half_width must be positive");
        }
        for (int d = 0; d < 3; ++d) {
            if (cells[d] <= 0) {
                throw Error(ErrorCode::InvalidParameters, "grid cell counts must be positive");
            }
            h_[d] = 2.0 * half_width / cells[d];
            origin_[d] = -half_width + 0.5 * h_[d];
        }
    }

    Grid(int cells, double half_width) : Grid({cells, cells, cells}, half_width) {}

    [[nodiscard]] auto n() const noexcept -> const std::array<int, 3>& { return n_; }
    [[nodiscard]] auto n(int d) const noexcept -> int { return n_[d]; }
    [[nodiscard]] auto h() const noexcept -> const Vec3& { return h_; }
    [[nodiscard]] auto h(int d) const noexcept -> double { return h_[d]; }
    [[nodiscard]] auto origin() const noexcept -> const Vec3& { return origin_; }
    [[nodiscard]] auto half_width() const noexcept -> double { return half_width_; }
    [[nodiscard]] auto cell_volume() const noexcept -> double { return h_[0] * h_[1] * h_[2]; }
    [[nodiscard]] auto min_spacing() const noexcept -> double { return std::min({h_[0], h_[1], h_[2]}); }
    [[nodiscard]] auto max_spacing() const noexcept -> double { return std::max({h_[0], h_[1], h_[2]}); }

    [[nodiscard]] auto size() const noexcept -> std::size_t {
        return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(n_[2]);
    }

    /// x-fastest linear index.
    [[nodiscard]] auto index(int i, int j, int k) const noexcept -> std::size_t {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_[1]) * k);
    }

    [[nodiscard]] auto stride(int d) const noexcept -> std::ptrdiff_t {
        if (d == 0) return 1;
        if (d == 1) return n_[0];
        return static_cast<std::ptrdiff_t>(n_[0]) * n_[1];
    }

    [[nodiscard]] auto center(int i, int j, int k) const noexcept -> Vec3 {
        return {origin_[0] + i * h_[0], origin_[1] + j * h_[1], origin_[2] + k * h_[2]};
    }

    /// Index of the cell whose centre is nearest to x (clamped to the grid).
    [[nodiscard]] auto locate(const Vec3& x) const noexcept -> std::array<int, 3> {
        std::array<int, 3> ijk{};
        for (int d = 0; d < 3; ++d) {
            const long v = std::lround((x[d] - origin_[d]) / h_[d]);
            ijk[d] = static_cast<int>(std::clamp<long>(v, 0, n_[d] - 1));
        }
        return ijk;
    }

    friend auto operator==(const Grid& a, const Grid& b) noexcept -> bool {
        return a.n_ == b.n_ && a.half_width_ == b.half_width_;
    }

private:
    std::array<int, 3> n_{1, 1, 1};
    Vec3 h_{2.0, 2.0, 2.0};
    Vec3 origin_{0.0, 0.0, 0.0};
    double half_width_ = 1.0;
};

using ScalarField = std::vector<double>;
using VectorField = std::array<ScalarField, 3>;
/// Component (i, j) at mat_index(i, j).
using MatrixField = std::array<ScalarField, 9>;

inline auto make_vector_field(std::size_t n, double value = 0.0) -> VectorField {
    return {ScalarField(n, value), ScalarField(n, value), ScalarField(n, value)};
}

inline auto make_matrix_field(std::size_t n, const Mat3& value) -> MatrixField {
    MatrixField out;
    for (int c = 0; c < 9; ++c) {
        out[c].assign(n, value[c]);
    }
    return out;
}

inline auto make_matrix_field(std::size_t n) -> MatrixField { return make_matrix_field(n, Mat3{}); }

/// Primitive fields (density, velocity, deformation gradient) at one time.
struct State {
    double t = 0.0;
    ScalarField rho;
    VectorField u;
    MatrixField F;

    State() = default;
    explicit State(const Grid& g) : rho(g.size(), 0.0), u(make_vector_field(g.size())), F(make_matrix_field(g.size())) {}

    [[nodiscard]] auto size() const noexcept -> std::size_t { return rho.size(); }

    [[nodiscard]] auto velocity(std::size_t c) const noexcept -> Vec3 { return {u[0][c], u[1][c], u[2][c]}; }

    [[nodiscard]] auto deformation(std::size_t c) const noexcept -> Mat3 {
        Mat3 m;
        for (int q = 0; q < 9; ++q) {
            m[q] = F[q][c];
        }
        return m;
    }
};

/// Conserved fields (rho, rho u, Q = rho F^T), stored as 13 component arrays:
/// 0 density, 1..3 momentum, 4..12 Q row-major.
struct ConservedState {
    static constexpr int kComponents = 13;
    static constexpr int kRho = 0;
    static constexpr int kMom = 1;
    static constexpr int kQ = 4;

    double t = 0.0;
    std::array<ScalarField, kComponents> comp;

    ConservedState() = default;
    explicit ConservedState(std::size_t n) {
        for (auto& c : comp) {
            c.assign(n, 0.0);
        }
    }

    [[nodiscard]] auto size() const noexcept -> std::size_t { return comp[0].size(); }

    auto rho() noexcept -> ScalarField& { return comp[kRho]; }
    [[nodiscard]] auto rho() const noexcept -> const ScalarField& { return comp[kRho]; }
    auto m(int i) noexcept -> ScalarField& { return comp[kMom + i]; }
    [[nodiscard]] auto m(int i) const noexcept -> const ScalarField& { return comp[kMom + i]; }
    auto Q(int j, int k) noexcept -> ScalarField& { return comp[kQ + mat_index(j, k)]; }
    [[nodiscard]] auto Q(int j, int k) const noexcept -> const ScalarField& { return comp[kQ + mat_index(j, k)]; }
};

/// Background equilibrium (rho_bar, 0, I) in conserved variables.
inline auto background_conserved(const PhysParams& p) noexcept -> std::array<double, ConservedState::kComponents> {
    std::array<double, ConservedState::kComponents> v{};
    v[ConservedState::kRho] = p.rho_bar;
    for (int j = 0; j < 3; ++j) {
        v[ConservedState::kQ + mat_index(j, j)] = p.rho_bar;
    }
    return v;
}

namespace detail {

inline void require_positive_density(const ScalarField& rho) {
    for (std::size_t c = 0; c < rho.size(); ++c) {
        if (!(rho[c] > 0.0)) {
            throw Error(ErrorCode::DegenerateDensity,
                        "density " + std::to_string(rho[c]) + " at cell " + std::to_string(c) + " is not positive");
        }
    }
}

} // namespace detail

/// m = rho u, Q = rho F^T.
inline auto to_conserved(const State& s) -> ConservedState {
    detail::require_positive_density(s.rho);
    const std::size_t n = s.size();
    ConservedState c(n);
    c.t = s.t;
    for (std::size_t x = 0; x < n; ++x) {
        const double r = s.rho[x];
        c.comp[ConservedState::kRho][x] = r;
        for (int i = 0; i < 3; ++i) {
            c.comp[ConservedState::kMom + i][x] = r * s.u[i][x];
        }
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                c.comp[ConservedState::kQ + mat_index(j, k)][x] = r * s.F[mat_index(k, j)][x];
            }
        }
    }
    return c;
}

/// u = m / rho, F = (Q / rho)^T.
inline auto to_primitive(const ConservedState& c) -> State {
    detail::require_positive_density(c.rho());
    const std::size_t n = c.size();
    State s;
    s.t = c.t;
    s.rho = c.rho();
    s.u = make_vector_field(n);
    s.F = make_matrix_field(n);
    for (std::size_t x = 0; x < n; ++x) {
        const double r = c.comp[ConservedState::kRho][x];
        for (int i = 0; i < 3; ++i) {
            s.u[i][x] = c.comp[ConservedState::kMom + i][x] / r;
        }
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                s.F[mat_index(k, j)][x] = c.comp[ConservedState::kQ + mat_index(j, k)][x] / r;
            }
        }
    }
    return s;
}

/// Compensated (Neumaier) accumulator for field quadratures.
class KahanSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] auto value() const noexcept -> double { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Deterministic sum over all cells of term(i, j, k, linear_index). Partial sums are
/// formed per z-slab and combined serially, so the result does not depend on the
/// worker count.
template <typename Term>
auto reduce_sum(const Grid& g, Term&& term) -> double {
    const int nz = g.n(2);
    std::vector<double> partial(static_cast<std::size_t>(nz), 0.0);
    parallel_for(0, nz, [&](std::ptrdiff_t kk) {
        const int k = static_cast<int>(kk);
        KahanSum acc;
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                acc.add(term(i, j, k, g.index(i, j, k)));
            }
        }
        partial[static_cast<std::size_t>(k)] = acc.value();
    });
    KahanSum total;
    for (double v : partial) {
        total.add(v);
    }
    return total.value();
}

/// Deterministic max over all cells of term(i, j, k, linear_index); NaN propagates.
template <typename Term>
auto reduce_max(const Grid& g, Term&& term, double init = 0.0) -> double {
    const int nz = g.n(2);
    std::vector<double> partial(static_cast<std::size_t>(nz), init);
    parallel_for(0, nz, [&](std::ptrdiff_t kk) {
        const int k = static_cast<int>(kk);
        double m = init;
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const double v = term(i, j, k, g.index(i, j, k));
                if (std::isnan(v) || v > m) {
                    m = v;
                }
                if (std::isnan(m)) {
                    break;
                }
            }
        }
        partial[static_cast<std::size_t>(k)] = m;
    });
    double m = init;
    for (double v : partial) {
        if (std::isnan(v)) {
            return v;
        }
        m = std::max(m, v);
    }
    return m;
}

} // namespace elastoblow
