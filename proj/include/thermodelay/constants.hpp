/// @file constants.hpp
/// @brief Lyapunov constants, stability certificate, and damping threshold search.
///
/// Every quantity here is a closed-form function of (alpha, beta, gamma, kappa,
/// tau, ell) and the Lyapunov exponent parameter lambda. The certificate uses
/// the exact (non-asymptotic) inequalities; quantities that cancel
/// catastrophically for large lambda are evaluated through equivalent
/// polynomial forms in h = exp(-2 lambda).

#pragma once

#include "thermodelay/params.hpp"

#include <array>
#include <string>
#include <vector>

namespace thermodelay {

enum class PoincareChoice {
    half_length_sq,  ///< c_p = ell^2 / 2
    sharp,           ///< c_p = (ell / pi)^2
};

struct LyapunovOptions {
    double xi_factor = 2.0;  ///< xi = xi_factor * 2 tau alpha^2 / beta; must exceed 1
    PoincareChoice poincare = PoincareChoice::half_length_sq;
};

/// Weight f solving (e^{-lambda rho} f)' = -e^{-2 lambda rho} with f(1) e^{-lambda} = h Gamma.
double f_weight(double rho, double lambda);

double poincare_constant(double ell, PoincareChoice choice);

struct LyapunovConstants {
    double lambda = 0.0;
    double xi = 0.0;
    double c_p = 0.0;
    double m = 0.0;  ///< dissipativity shift alpha^2/beta + xi/(2 tau)

    double h = 0.0;
    double Gamma = 0.0;
    double Psi = 0.0;
    double Lambda = 0.0;
    double Phi = 0.0;
    double A = 0.0;
    double A_minus_1 = 0.0;      ///< A - 1 without cancellation
    double k = 0.0;
    double window_margin = 0.0;  ///< (1-h)(1+h)^2 - A/k without cancellation
    double a = 0.0;
    double b = 0.0;

    std::array<double, 6> eps{};  ///< eps[0] = eps1 ... eps[5] = eps6
    std::array<double, 6> N{};    ///< N[0] = N1 ... N[5] = N6

    double n0 = 0.0;  ///< NaN until the decay rows are all negative

    /// Empty when lambda admits the construction; otherwise the reason.
    std::string infeasible;

    bool feasible() const { return infeasible.empty(); }
    double eps4() const { return eps[3]; }
};

LyapunovConstants lyapunov_constants(const PhysParams& p, double lambda,
                                     const LyapunovOptions& opts = {});

struct ConditionRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct ConditionReport {
    std::vector<ConditionRecord> records;
    double eps4 = 0.0;
    bool verdict = false;

    const ConditionRecord& get(const std::string& name) const;
    std::vector<std::string> failed() const;
};

ConditionReport check_conditions(const LyapunovConstants& c, const PhysParams& p);

/// Convenience: build constants and check them in one go.
ConditionReport certify(const PhysParams& p, double lambda, const LyapunovOptions& opts = {});

/// Signed coefficients of the four decay rows of the Lyapunov derivative bound
/// (history, strain, strain rate, temperature gradient). All negative when
/// the certificate holds.
struct DecayRows {
    double history = 0.0;
    double strain = 0.0;
    double strain_rate = 0.0;
    double heat = 0.0;
    double n1_equality_residual = 0.0;  ///< relative residual of N4 = a N1
};

DecayRows decay_rows(const LyapunovConstants& c, const PhysParams& p);

/// Decay rate n0 in V' <= -n0 Vtilde; throws std::domain_error if any row is nonnegative.
double n0_from_constants(const LyapunovConstants& c, const PhysParams& p);

struct Beta0Result {
    double beta0 = 0.0;
    double lambda_star = 0.0;
    std::vector<double> per_lambda;  ///< threshold per grid point, NaN where infeasible
};

/// Smallest beta passing the certificate, minimised over the lambda grid.
/// Throws std::runtime_error("no feasible lambda") when no grid point admits one.
Beta0Result find_beta0(PhysParams p, const std::vector<double>& lambda_grid,
                       const LyapunovOptions& opts = {}, double rel_tol = 1e-6);

std::vector<double> default_lambda_grid();

}  // namespace thermodelay
