#pragma once

#include <cmath>
#include <string>

#include "elastoblow/core_types.hpp"

namespace elastoblow::eos {

/// P = A rho^gamma. Vacuum (rho = 0) is admissible here.
inline auto pressure(double rho, const PhysParams& p) -> double {
    if (rho < 0.0) {
        throw Error(ErrorCode::DegenerateDensity, "pressure of negative density " + std::to_string(rho));
    }
    return p.A * std::pow(rho, p.gamma);
}

/// dP/drho = A gamma rho^(gamma - 1), the squared local sound speed.
inline auto sound_speed_sq(double rho, const PhysParams& p) -> double {
    if (!(rho > 0.0)) {
        throw Error(ErrorCode::DegenerateDensity, "sound speed of nonpositive density " + std::to_string(rho));
    }
    return p.A * p.gamma * std::pow(rho, p.gamma - 1.0);
}

/// Enthalpy-like potential A gamma / (gamma - 1) rho^(gamma - 1); its gradient is grad(P) / rho.
inline auto p_hat(double rho, const PhysParams& p) -> double {
    if (!(rho > 0.0)) {
        throw Error(ErrorCode::DegenerateDensity, "p_hat of nonpositive density " + std::to_string(rho));
    }
    return p.A * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

/// Far-field sound speed sigma = sqrt(A gamma rho_bar^(gamma - 1)).
inline auto sound_speed_inf(const PhysParams& p) -> double {
    p.validate();
    return std::sqrt(p.A * p.gamma * std::pow(p.rho_bar, p.gamma - 1.0));
}

/// P(rho_bar).
inline auto background_pressure(const PhysParams& p) -> double { return p.A * std::pow(p.rho_bar, p.gamma); }

struct EosQuantities {
    double P = 0.0;
    double P0 = 0.0;
    double P_hat = 0.0;
    double sigma = 0.0;
};

inline auto evaluate(double rho, const PhysParams& p) -> EosQuantities {
    return {pressure(rho, p), background_pressure(p), p_hat(rho, p), sound_speed_inf(p)};
}

} // namespace elastoblow::eos
