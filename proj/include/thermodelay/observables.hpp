/// @file observables.hpp
/// @brief Energy, Lyapunov terms, decay-rate fits and the a-posteriori decay inequality.

#pragma once

#include "thermodelay/constants.hpp"
#include "thermodelay/discretization.hpp"

#include <array>
#include <limits>
#include <vector>

namespace thermodelay {

/// 1/2 (||v||^2 + alpha ||u_x||^2 + ||theta||^2) + xi <<z, z>>, with trapezoid weights in rho.
double energy(const State& s, const Grid& g, const PhysParams& p, double xi);

/// Sum of theta times its cell widths.
double theta_mass(const State& s, const Grid& g);

struct LyapunovTerms {
    std::array<double, 6> V{};  ///< kinetic, strain, thermal, weighted history, history-strain, u-v cross
    double total = 0.0;         ///< N-weighted sum of all six
    double tilde = 0.0;         ///< N-weighted sum of the first four
};

LyapunovTerms lyapunov_components(const State& s, const Grid& g, const PhysParams& p,
                                  const LyapunovConstants& c);

struct Trajectory {
    std::vector<double> times, E, V, Vtilde, theta_mass;
    std::array<std::vector<double>, 6> V_terms;
    std::vector<State> snapshots;  ///< filled only when requested
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double xi = 0.0;                                            ///< history weight used for E
    double lambda = std::numeric_limits<double>::quiet_NaN();  ///< exponent used for V, NaN if none

    std::size_t size() const { return times.size(); }
    bool blew_up() const { return blowup_time == blowup_time; }
};

struct DecayFit {
    double a0 = 0.0;
    double C = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;
};

/// Least-squares fit of log E against t on [t_lo, t_hi].
/// Throws std::domain_error when E is not positive on the window.
DecayFit decay_rate_fit(const Trajectory& traj, double t_lo, double t_hi);
DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& e, double t_lo, double t_hi);

struct DecayInequalityReport {
    std::size_t samples = 0;       ///< interior samples checked
    std::size_t violations = 0;    ///< samples with V' + n0 Vtilde above the band
    double max_excess = 0.0;       ///< max of V' + n0 Vtilde
    double max_band_excess = 0.0;  ///< max of V' + n0 Vtilde - band (<= 0 when clean)
    double violation_fraction() const { return samples ? double(violations) / double(samples) : 0.0; }
};

/// Central-difference check of V' <= -n0 Vtilde. The tolerance band at each
/// sample is safety * (h^2 / 6) |V'''| with V''' from third differences,
/// plus a rounding allowance. Throws std::invalid_argument with fewer than 5 samples.
DecayInequalityReport check_decay_inequality(const Trajectory& traj, double n0, double safety = 10.0);

struct EquivalenceBounds {
    double lower = 0.0;  ///< c1 in c1 Vtilde <= V
    double upper = 0.0;  ///< c2 in V <= c2 Vtilde
};

/// Bounds from Young's inequality on the two cross terms with the chosen eps5, eps6.
EquivalenceBounds equivalence_bounds(const LyapunovConstants& c, const PhysParams& p);

/// min and max of V / Vtilde over samples with Vtilde > 0.
EquivalenceBounds empirical_equivalence(const Trajectory& traj);

}  // namespace thermodelay
