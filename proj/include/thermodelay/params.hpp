/// @file params.hpp
/// @brief Physical parameters of the delayed thermoelastic bar.

#pragma once

#include <stdexcept>
#include <string>

namespace thermodelay {

enum class ThetaBC { neumann, dirichlet };

inline const char* to_string(ThetaBC bc) { return bc == ThetaBC::neumann ? "neumann" : "dirichlet"; }

inline ThetaBC theta_bc_from_string(const std::string& s) {
    if (s == "neumann") return ThetaBC::neumann;
    if (s == "dirichlet") return ThetaBC::dirichlet;
    throw std::invalid_argument("unknown theta boundary condition '" + s + "'");
}

/// Coefficients of
///   u_tt - alpha u_xx(t - tau) - beta u_xxt + gamma theta_x = 0
///   theta_t - kappa theta_xx + gamma u_xt = 0
/// on (0, ell) with u = 0 at both ends.
struct PhysParams {
    double alpha = 1.0;
    double beta = 1.0;   ///< Kelvin-Voigt damping; 0 only for the undamped demonstration.
    double gamma = 1.0;
    double kappa = 1.0;
    double tau = 1.0;
    double ell = 1.0;
    ThetaBC theta_bc = ThetaBC::neumann;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
        if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
        if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
        if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
        if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
        if (!(ell > 0.0)) throw std::invalid_argument("ell must be positive");
    }
};

}  // namespace thermodelay
