#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "elastoblow/core_types.hpp"
#include "elastoblow/diagnostics.hpp"
#include "elastoblow/discretization.hpp"
#include "elastoblow/eos.hpp"
#include "elastoblow/initdata.hpp"
#include "elastoblow/symhyp.hpp"

namespace elastoblow {

enum class Mode { Inviscid, Viscous };

constexpr auto to_string(Mode m) noexcept -> std::string_view { return m == Mode::Inviscid ? "inviscid" : "viscous"; }

struct RunConfig {
    double t_end = 1.0;
    double cfl = 0.4;
    Mode mode = Mode::Inviscid;
    double rho_floor = 1e-8;
    double gradu_ceiling = 1e4;
    int output_stride = 10;
    double front_tolerance = diagnostics::kDefaultFrontTolerance;

    /// rho_floor = 1e-8 rho_bar and gradu_ceiling = 1e4 sigma / R.
    static auto defaults_for(const PhysParams& p) -> RunConfig {
        RunConfig rc;
        rc.rho_floor = 1e-8 * p.rho_bar;
        rc.gradu_ceiling = 1e4 * eos::sound_speed_inf(p) / p.R;
        return rc;
    }

    void validate() const {
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidParameters, "t_end must be positive");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw Error(ErrorCode::InvalidParameters, "cfl must lie in (0, 1]");
        if (!(rho_floor > 0.0)) throw Error(ErrorCode::InvalidParameters, "rho_floor must be positive");
        if (!(gradu_ceiling > 0.0)) throw Error(ErrorCode::InvalidParameters, "gradu_ceiling must be positive");
        if (output_stride <= 0) throw Error(ErrorCode::InvalidParameters, "output_stride must be positive");
        if (!(front_tolerance > 0.0)) throw Error(ErrorCode::InvalidParameters, "front_tolerance must be positive");
    }
};

enum class BreakdownReason { NonFinite, DensityFloor, GradientCeiling, TimestepUnderflow };

constexpr auto to_string(BreakdownReason r) noexcept -> std::string_view {
    switch (r) {
    case BreakdownReason::NonFinite: return "nonfinite";
    case BreakdownReason::DensityFloor: return "rho_floor";
    case BreakdownReason::GradientCeiling: return "gradu_ceiling";
    case BreakdownReason::TimestepUnderflow: return "dt_underflow";
    }
    return "unknown";
}

enum class RunStatus { Completed, Breakdown };

struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    std::optional<BreakdownReason> reason;
    /// Time of the last accepted state when the run broke down.
    double breakdown_time = 0.0;
    ConservedState final;
    std::vector<DiagnosticsRow> series;
    /// Accumulated viscous dissipation integral at each row of `series`.
    std::vector<double> dissipation;
    HypothesisReport hypotheses;
    std::size_t steps = 0;
};

namespace solver {

enum class DensityStatus { Ok, NonPositive, NonFinite };

inline auto density_status(const ScalarField& rho, double floor = 0.0) -> DensityStatus {
    DensityStatus st = DensityStatus::Ok;
    for (double r : rho) {
        if (!std::isfinite(r)) {
            return DensityStatus::NonFinite;
        }
        if (!(r > floor)) {
            st = DensityStatus::NonPositive;
        }
    }
    return st;
}

inline auto all_finite(const ConservedState& c) -> bool {
    for (const auto& f : c.comp) {
        for (double v : f) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

/// Overwrites the boundary collar with the far-field state.
inline void pin_collar(ConservedState& c, const PhysParams& p, const Grid& g, const StencilConfig& sc) {
    const auto bg = background_conserved(p);
    const int w = sc.collar();
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            const bool row_inside = j >= w && j < g.n(1) - w && k >= w && k < g.n(2) - w;
            for (int i = 0; i < g.n(0); ++i) {
                if (row_inside && i >= w && i < g.n(0) - w) {
                    i = g.n(0) - w - 1;
                    continue;
                }
                const std::size_t x = g.index(i, j, k);
                for (int q = 0; q < ConservedState::kComponents; ++q) {
                    c.comp[static_cast<std::size_t>(q)][x] = bg[static_cast<std::size_t>(q)];
                }
            }
        }
    }
}

inline auto point_of(const ConservedState& c, std::size_t x) -> symhyp::PointState {
    symhyp::PointState ps;
    ps.rho = c.comp[ConservedState::kRho][x];
    const double inv = 1.0 / ps.rho;
    for (int i = 0; i < 3; ++i) {
        ps.u[i] = c.comp[ConservedState::kMom + i][x] * inv;
    }
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            ps.F[mat_index(k, j)] = c.comp[ConservedState::kQ + mat_index(j, k)][x] * inv;
        }
    }
    return ps;
}

inline auto max_char_speed(const ConservedState& c, const Grid& g, const PhysParams& p) -> double {
    return reduce_max(g, [&](int, int, int, std::size_t x) { return symhyp::max_char_speed(point_of(c, x), p); });
}

/// Largest stable step: hyperbolic cfl h / s_max and, for viscous runs,
/// cfl h^2 rho_min / (2 (2 mu + lambda)).
inline auto stable_dt(const ConservedState& c, const PhysParams& p, const Grid& g, Mode mode, double cfl) -> double {
    const double h = g.min_spacing();
    double dt = cfl * h / max_char_speed(c, g, p);
    if (mode == Mode::Viscous) {
        const double visc = 2.0 * (2.0 * p.mu + p.lambda);
        if (visc > 0.0) {
            const double rmin = *std::min_element(c.rho().begin(), c.rho().end());
            dt = std::min(dt, cfl * h * h * rmin / (visc + std::numeric_limits<double>::min()));
        }
    }
    return dt;
}

/// Scratch storage for tendency evaluation, reused across stages.
class Workspace {
public:
    void resize(std::size_t n) {
        if (n_ == n) return;
        n_ = n;
        for (auto& f : cache_) f.assign(n, 0.0);
        for (auto& f : flux_) f.assign(n, 0.0);
        div_u_.assign(n, 0.0);
    }

    static constexpr int kCache = 10;
    static constexpr int kMaxRow = 4096;

    // u (3), P, S = Q^T Q / rho (upper triangle: 00 01 02 11 12 22)
    std::array<ScalarField, kCache> cache_;
    std::array<ScalarField, 3 * ConservedState::kComponents> flux_;
    ScalarField div_u_;

private:
    std::size_t n_ = 0;
};

constexpr int sym_index(int a, int b) noexcept {
    if (a > b) std::swap(a, b);
    constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[a][b];
}

/// Tendency of the conservative system written into `out` (which must be sized).
///   rho_t = -div(rho u)
///   (rho u)_t = -div(rho u (x) u + P I - rho F F^T) [+ mu lap u + (mu + lambda) grad div u]
///   Q_jk,t = -d_i(u_i Q_jk - u_k Q_ji),     Q = rho F^T
/// plus artificial dissipation scaled by `dissipation_speed`.
inline void compute_tendency(const ConservedState& c, const PhysParams& p, const Grid& g, const StencilConfig& sc,
                             Mode mode, double dissipation_speed, Workspace& ws, ConservedState& out) {
    const std::size_t n = c.size();
    ws.resize(n);
    if (g.n(0) > Workspace::kMaxRow) {
        throw Error(ErrorCode::InvalidParameters, "grid rows longer than " + std::to_string(Workspace::kMaxRow) + " cells");
    }
    switch (density_status(c.rho())) {
    case DensityStatus::NonFinite: throw Error(ErrorCode::DegenerateDensity, "nonfinite density in tendency evaluation");
    case DensityStatus::NonPositive: throw Error(ErrorCode::DegenerateDensity, "nonpositive density in tendency evaluation");
    case DensityStatus::Ok: break;
    }
    for (auto& f : out.comp) {
        std::fill(f.begin(), f.end(), 0.0);
    }
    out.t = c.t;

    const double* rho = c.comp[ConservedState::kRho].data();
    std::array<const double*, 3> m{};
    for (int i = 0; i < 3; ++i) m[i] = c.comp[ConservedState::kMom + i].data();
    std::array<const double*, 9> Q{};
    for (int q = 0; q < 9; ++q) Q[q] = c.comp[ConservedState::kQ + q].data();

    // Raw pointers keep the compiler from reloading vector storage after every store.
    std::array<double*, Workspace::kCache> cache{};
    for (int q = 0; q < Workspace::kCache; ++q) cache[q] = ws.cache_[static_cast<std::size_t>(q)].data();
    // Directional fluxes: flux[d * kComponents + q].
    std::array<double*, 3 * ConservedState::kComponents> flux{};
    for (std::size_t q = 0; q < flux.size(); ++q) flux[q] = ws.flux_[q].data();

    // Loops run one output at a time along each grid row: the fields are separate
    // equally sized allocations, and touching dozens of them per cell thrashes the cache sets.
    const bool square = p.gamma == 2.0;
    const std::size_t row_len = static_cast<std::size_t>(g.n(0));
    const std::size_t rows = static_cast<std::size_t>(g.n(1));
    parallel_for(0, static_cast<std::ptrdiff_t>(g.n(2)), [&, cache, rho, m, Q](std::ptrdiff_t kk) {
        for (std::size_t jr = 0; jr < rows; ++jr) {
            const std::size_t b0 = g.index(0, static_cast<int>(jr), static_cast<int>(kk));
            const std::size_t e0 = b0 + row_len;
            double inv[Workspace::kMaxRow];
            for (std::size_t x = b0; x < e0; ++x) inv[x - b0] = 1.0 / rho[x];
            for (int i = 0; i < 3; ++i) {
                for (std::size_t x = b0; x < e0; ++x) cache[i][x] = m[i][x] * inv[x - b0];
            }
            if (square) {
                for (std::size_t x = b0; x < e0; ++x) cache[3][x] = p.A * (rho[x] * rho[x]);
            } else {
                for (std::size_t x = b0; x < e0; ++x) cache[3][x] = p.A * std::pow(rho[x], p.gamma);
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = a; b < 3; ++b) {
                    double* out_ab = cache[4 + sym_index(a, b)];
                    const double* q0a = Q[mat_index(0, a)];
                    const double* q1a = Q[mat_index(1, a)];
                    const double* q2a = Q[mat_index(2, a)];
                    const double* q0b = Q[mat_index(0, b)];
                    const double* q1b = Q[mat_index(1, b)];
                    const double* q2b = Q[mat_index(2, b)];
                    for (std::size_t x = b0; x < e0; ++x) {
                        out_ab[x] = (q0a[x] * q0b[x] + q1a[x] * q1b[x] + q2a[x] * q2b[x]) * inv[x - b0];
                    }
                }
            }
        }
    });

    parallel_for(0, static_cast<std::ptrdiff_t>(g.n(2)), [&, cache, flux, m, Q](std::ptrdiff_t kk) {
        for (std::size_t jr = 0; jr < rows; ++jr) {
            const std::size_t b0 = g.index(0, static_cast<int>(jr), static_cast<int>(kk));
            const std::size_t e0 = b0 + row_len;
            for (int d = 0; d < 3; ++d) {
                double* const* fd = flux.data() + d * ConservedState::kComponents;
                const double* ud = cache[d];
                std::copy(m[d] + b0, m[d] + e0, fd[ConservedState::kRho] + b0);
                for (int i = 0; i < 3; ++i) {
                    double* f = fd[ConservedState::kMom + i];
                    const double* mi = m[i];
                    const double* S = cache[4 + sym_index(i, d)];
                    if (i == d) {
                        const double* P = cache[3];
                        for (std::size_t x = b0; x < e0; ++x) f[x] = mi[x] * ud[x] + P[x] - S[x];
                    } else {
                        for (std::size_t x = b0; x < e0; ++x) f[x] = mi[x] * ud[x] - S[x];
                    }
                }
                for (int j = 0; j < 3; ++j) {
                    const double* qjd = Q[mat_index(j, d)];
                    for (int k = 0; k < 3; ++k) {
                        double* f = fd[ConservedState::kQ + mat_index(j, k)];
                        const double* qjk = Q[mat_index(j, k)];
                        const double* uk = cache[k];
                        for (std::size_t x = b0; x < e0; ++x) f[x] = ud[x] * qjk[x] - uk[x] * qjd[x];
                    }
                }
            }
        }
    });
    for (int q = 0; q < ConservedState::kComponents; ++q) {
        const std::array<const double*, 3> fq{flux[q], flux[ConservedState::kComponents + q],
                                             flux[2 * ConservedState::kComponents + q]};
        stencil::assign_divergence_with_dissipation(fq, c.comp[static_cast<std::size_t>(q)].data(),
                                                    out.comp[static_cast<std::size_t>(q)].data(), g, sc,
                                                    dissipation_speed);
    }

    if (mode == Mode::Viscous && (p.mu != 0.0 || p.lambda != 0.0)) {
        std::fill(ws.div_u_.begin(), ws.div_u_.end(), 0.0);
        for (int d = 0; d < 3; ++d) {
            stencil::add_derivative(cache[d], ws.div_u_.data(), g, sc, d, 1.0);
        }
        for (int i = 0; i < 3; ++i) {
            double* mom = out.comp[ConservedState::kMom + i].data();
            for (int d = 0; d < 3; ++d) {
                stencil::add_second_derivative(cache[i], mom, g, sc, d, p.mu);
            }
            stencil::add_derivative(ws.div_u_.data(), mom, g, sc, i, p.mu + p.lambda);
        }
    }
}

inline auto rhs(const ConservedState& c, const PhysParams& p, const Grid& g, const StencilConfig& sc, Mode mode)
    -> ConservedState {
    stencil::check_grid(g, sc);
    if (density_status(c.rho()) != DensityStatus::Ok) {
        throw Error(ErrorCode::DegenerateDensity, "tendency evaluation needs positive finite density");
    }
    Workspace ws;
    ConservedState out(c.size());
    const double speed = sc.dissipation_coeff > 0.0 ? max_char_speed(c, g, p) : 0.0;
    compute_tendency(c, p, g, sc, mode, speed, ws, out);
    return out;
}

inline auto rhs_inviscid(const ConservedState& c, const PhysParams& p, const Grid& g, const StencilConfig& sc)
    -> ConservedState {
    return rhs(c, p, g, sc, Mode::Inviscid);
}

inline auto rhs_viscous(const ConservedState& c, const PhysParams& p, const Grid& g, const StencilConfig& sc)
    -> ConservedState {
    return rhs(c, p, g, sc, Mode::Viscous);
}

/// Classical four-stage Runge-Kutta integrator with reusable storage. The
/// dissipation speed is frozen at the start of each step so every stage applies
/// the same linear dissipation operator.
class Stepper {
public:
    Stepper(PhysParams p, Grid g, StencilConfig sc, Mode mode) : p_(p), g_(std::move(g)), sc_(sc), mode_(mode) {
        stencil::check_grid(g_, sc_);
    }

    /// Advances c by dt in place; on failure c is left untouched and the reason is returned.
    auto advance(ConservedState& c, double dt) -> std::optional<BreakdownReason> {
        const std::size_t n = c.size();
        if (k_.size() != n) {
            k_ = ConservedState(n);
            stage_ = ConservedState(n);
            acc_ = ConservedState(n);
        }
        const double speed = sc_.dissipation_coeff > 0.0 ? max_char_speed(c, g_, p_) : 0.0;
        static constexpr double kStageShift[4] = {0.0, 0.5, 0.5, 1.0};
        static constexpr double kWeight[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
        acc_.comp = c.comp;
        try {
            for (int s = 0; s < 4; ++s) {
                const ConservedState* input = &c;
                if (s > 0) {
                    const double a = kStageShift[s] * dt;
                    for (int q = 0; q < ConservedState::kComponents; ++q) {
                        const auto& base = c.comp[static_cast<std::size_t>(q)];
                        const auto& kq = k_.comp[static_cast<std::size_t>(q)];
                        auto& st = stage_.comp[static_cast<std::size_t>(q)];
                        for (std::size_t x = 0; x < n; ++x) st[x] = base[x] + a * kq[x];
                    }
                    stage_.t = c.t + a;
                    pin_collar(stage_, p_, g_, sc_);
                    input = &stage_;
                }
                compute_tendency(*input, p_, g_, sc_, mode_, speed, ws_, k_);
                const double w = kWeight[s] * dt;
                for (int q = 0; q < ConservedState::kComponents; ++q) {
                    const auto& kq = k_.comp[static_cast<std::size_t>(q)];
                    auto& aq = acc_.comp[static_cast<std::size_t>(q)];
                    for (std::size_t x = 0; x < n; ++x) aq[x] += w * kq[x];
                }
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateDensity) throw;
            const bool nonfinite = std::string_view(e.what()).find("nonfinite") != std::string_view::npos;
            return nonfinite ? BreakdownReason::NonFinite : BreakdownReason::DensityFloor;
        }
        pin_collar(acc_, p_, g_, sc_);
        acc_.t = c.t + dt;
        std::swap(c, acc_);
        return std::nullopt;
    }

    [[nodiscard]] auto params() const noexcept -> const PhysParams& { return p_; }
    [[nodiscard]] auto grid() const noexcept -> const Grid& { return g_; }
    [[nodiscard]] auto scheme() const noexcept -> const StencilConfig& { return sc_; }
    [[nodiscard]] auto mode() const noexcept -> Mode { return mode_; }

private:
    PhysParams p_;
    Grid g_;
    StencilConfig sc_;
    Mode mode_;
    Workspace ws_;
    ConservedState k_;
    ConservedState stage_;
    ConservedState acc_;
};

/// One RK4 step. |dt| must respect the stable step for `cfl`; negative dt steps backwards.
inline auto step_rk4(const ConservedState& c, double dt, const PhysParams& p, const Grid& g, const StencilConfig& sc,
                     Mode mode, double cfl = 0.4) -> ConservedState {
    if (density_status(c.rho()) != DensityStatus::Ok) {
        throw Error(ErrorCode::DegenerateDensity, "cannot step a state with nonpositive density");
    }
    const double limit = stable_dt(c, p, g, mode, cfl);
    if (std::abs(dt) > limit * (1.0 + 1e-12)) {
        throw Error(ErrorCode::CflViolation,
                    "dt " + std::to_string(dt) + " exceeds the stable step " + std::to_string(limit));
    }
    Stepper stepper(p, g, sc, mode);
    ConservedState out = c;
    if (auto failure = stepper.advance(out, dt)) {
        throw Error(ErrorCode::DegenerateDensity, "step produced " + std::string(to_string(*failure)));
    }
    return out;
}

/// Observer invoked after every accepted step (time, state); used by tests and tools.
using StepObserver = std::function<void(const ConservedState&, double dt)>;

/// Integrates from `initial` to rc.t_end or until breakdown.
inline auto run(const State& initial, const PhysParams& p, const Grid& g, const StencilConfig& sc, const RunConfig& rc,
                const StepObserver& observer = {}) -> RunOutcome {
    p.validate();
    sc.validate();
    rc.validate();
    if (rc.mode == Mode::Viscous) {
        p.validate_viscous();
    }
    stencil::check_grid(g, sc);
    initdata::validate_initial_data(initial, p, g, sc);

    RunOutcome out;
    out.hypotheses = initdata::check_hypotheses(initial, p, g, sc);
    diagnostics::SampleContext ctx;
    ctx.front_tolerance = rc.front_tolerance;
    if (out.hypotheses.cond_FF) {
        ctx.riccati = diagnostics::RiccatiContext{
            out.hypotheses.F0_functional, diagnostics::riccati_constants(p, out.hypotheses.rho0_sup)};
    }

    ConservedState c = to_conserved(initial);
    pin_collar(c, p, g, sc);
    Stepper stepper(p, g, sc, rc.mode);

    auto grad_stats = diagnostics::velocity_gradient_stats(initial, p, g, sc);
    diagnostics::BkmCarry carry{initial.t, grad_stats.gradu_max, 0.0};
    double dissipation = 0.0;
    double last_rate = grad_stats.dissipation_rate;

    auto emit = [&](const State& s) {
        DiagnosticsRow row = diagnostics::sample(s, p, g, sc, ctx, std::nullopt);
        row.bkm = carry.bkm;
        out.series.push_back(row);
        out.dissipation.push_back(dissipation);
    };
    emit(initial);

    const double t0 = initial.t;
    const double t_final = t0 + rc.t_end;
    auto breakdown = [&](BreakdownReason reason) {
        out.status = RunStatus::Breakdown;
        out.reason = reason;
        out.breakdown_time = c.t;
    };

    while (c.t < t_final) {
        const double dt_stable = stable_dt(c, p, g, rc.mode, rc.cfl);
        if (!std::isfinite(dt_stable)) {
            breakdown(BreakdownReason::NonFinite);
            break;
        }
        const double remaining = t_final - c.t;
        double dt = std::min(dt_stable, remaining);
        if (dt < 1e-12 * rc.t_end && dt < remaining) {
            breakdown(BreakdownReason::TimestepUnderflow);
            break;
        }
        ConservedState prev_state = c;
        if (auto failure = stepper.advance(c, dt)) {
            breakdown(*failure);
            break;
        }
        if (dt == remaining) {
            c.t = t_final;
        }
        if (!all_finite(c)) {
            c = std::move(prev_state);
            breakdown(BreakdownReason::NonFinite);
            break;
        }
        ++out.steps;
        if (density_status(c.rho(), rc.rho_floor) != DensityStatus::Ok) {
            // density below the floor: the state is still the last computed one
            c = std::move(prev_state);
            breakdown(BreakdownReason::DensityFloor);
            break;
        }
        const State s = to_primitive(c);
        grad_stats = diagnostics::velocity_gradient_stats(s, p, g, sc);
        carry.bkm = diagnostics::bkm_accumulate(carry.bkm, grad_stats.gradu_max, carry.gradu_max, dt);
        carry.gradu_max = grad_stats.gradu_max;
        carry.t = c.t;
        dissipation += 0.5 * dt * (grad_stats.dissipation_rate + last_rate);
        last_rate = grad_stats.dissipation_rate;
        if (observer) {
            observer(c, dt);
        }
        const bool ceiling_hit = grad_stats.gradu_max > rc.gradu_ceiling;
        if (out.steps % static_cast<std::size_t>(rc.output_stride) == 0 || c.t >= t_final || ceiling_hit) {
            emit(s);
        }
        if (ceiling_hit) {
            breakdown(BreakdownReason::GradientCeiling);
            break;
        }
    }
    out.final = std::move(c);
    return out;
}

} // namespace solver
} // namespace elastoblow
