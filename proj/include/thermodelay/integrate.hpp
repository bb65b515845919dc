/// @file integrate.hpp
/// @brief IMEX time stepping of the semi-discrete system and exact reference solutions.
///
/// The implicit part is the (v, theta) block
///     J = [ beta div grad   -gamma div ]
///         [ -gamma grad      kappa Lap ]
/// solved monolithically with a theta-method; u follows by the same weights and the
/// delayed stress alpha div z(., 1) enters as known data.

#pragma once

#include "thermodelay/constants.hpp"
#include "thermodelay/delay.hpp"
#include "thermodelay/discretization.hpp"
#include "thermodelay/observables.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermodelay {

/// Raised when a step produces NaN or Inf.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Factored I - w dt J on the interleaved vector [theta_0, v_0, theta_1, v_1, ..., v_{nx-1}, theta_nx].
class ImplicitOperator {
public:
    ImplicitOperator(const Grid& g, const PhysParams& p, double dt, double weight);

    std::size_t size() const { return n_; }
    double dt() const { return dt_; }
    double weight() const { return weight_; }
    /// The unfactored matrix, kept for residual checks.
    const BandedMatrix& matrix() const { return matrix_; }

    void solve_in_place(std::span<double> rhs) const { lu_.solve_in_place(rhs); }

    /// J applied to (v, theta), written into (jv, jtheta).
    void apply_block(std::span<const double> v, std::span<const double> theta, std::span<double> jv,
                     std::span<double> jtheta) const;

    static std::size_t v_slot(std::size_t i) { return 2 * i + 1; }
    static std::size_t theta_slot(std::size_t j) { return 2 * j; }

private:
    Grid grid_;
    PhysParams params_;
    double dt_, weight_;
    std::size_t n_;
    BandedMatrix matrix_, lu_;
};

ImplicitOperator factor_implicit(const Grid& g, const PhysParams& p, double dt, double weight);

enum class DelayMode { ring, transport };

DelayMode delay_mode_from_string(const std::string& s);
const char* to_string(DelayMode m);

struct StepperOptions {
    double dt = 0.0;                    ///< 0 selects tau / nrho
    DelayMode mode = DelayMode::ring;
    double weight = 0.5;                ///< theta-method weight in [1/2, 1]
    bool backward_euler_start = true;   ///< first step with weight 1
    double transport_weight = 0.5;      ///< implicit share of the rho upwind update
};

class ImexStepper {
public:
    /// `initial.z` must hold the history samples z(x_j, rho_r) = f0(x_j, -tau rho_r).
    ImexStepper(const Grid& g, const PhysParams& p, StepperOptions opts, const State& initial);

    void step();
    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) step();
    }

    double time() const { return static_cast<double>(steps_) * dt_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return dt_; }
    const Grid& grid() const { return grid_; }
    const PhysParams& params() const { return params_; }
    DelayMode mode() const { return opts_.mode; }

    /// Full state; in ring mode z is rebuilt from the buffer.
    State state() const;
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& theta() const { return theta_; }

private:
    std::vector<double> grad(std::span<const double> u) const;
    const ImplicitOperator& op_for_step() const;

    Grid grid_;
    PhysParams params_;
    StepperOptions opts_;
    double dt_;
    std::size_t steps_ = 0;

    std::vector<double> u_, v_, theta_;
    std::vector<double> z_;             // transport mode
    std::vector<double> z_tail_prev_;   // transport mode, z(., 1) one step back
    HistoryBuffer ring_;                // ring mode

    ImplicitOperator op_;
    std::optional<ImplicitOperator> startup_op_;

    std::vector<double> rhs_, jv_, jth_;
};

/// e^{t A_h} applied to a packed state (dense scaling and squaring).
std::vector<double> expm_oracle(const Generator& gen, std::span<const double> x, double t);
State expm_oracle(const Generator& gen, const State& s, double t);

/// (u, v, theta) at time t for the delay equation with exact delayed strain,
/// started from `initial` with past strain `history`. Solved segment by segment
/// over [k tau, (k+1) tau] by exponentials of the stacked linear system.
struct DelayOracleResult {
    std::vector<double> u, v, theta;
};

DelayOracleResult delay_oracle(const Grid& g, const PhysParams& p, const State& initial,
                               const SeparableHistory& history, double t);

struct InitialProfiles {
    std::string u0 = "sine(1)";      ///< sine(n) | bump | zero
    std::string u1 = "zero";         ///< sine(n) | bump | zero
    std::string theta0 = "cosine(1)";///< cosine(n) | zero
    std::string f0 = "constant_history";
    double u0_amplitude = 1.0;
    double u1_amplitude = 1.0;
    double theta0_amplitude = 1.0;
    bool project_theta_mean = true;  ///< only applied in Neumann mode
};

struct InitialData {
    State state;
    SeparableHistory history;
};

InitialData make_initial_data(const Grid& g, const PhysParams& p, const InitialProfiles& profiles);

struct SimulationConfig {
    PhysParams params;
    int nx = 32;
    int nrho = 32;
    double t_end = 10.0;
    StepperOptions stepper;
    std::size_t record_every = 1;  ///< steps between recorded samples
    bool keep_snapshots = false;
    double lambda = 0.0;           ///< 0 selects the smallest certified lambda when beta > 0
    LyapunovOptions lyapunov;
    InitialProfiles initial;
};

/// Runs the stepper to t_end, recording E, V, Vtilde, V1..V6 and the theta mass.
/// On NaN/Inf the trajectory is truncated and blowup_time is set.
Trajectory simulate(const SimulationConfig& cfg);

/// xi used for the energy: xi_factor times the dissipativity lower bound, or 1 when beta = 0.
double energy_weight(const PhysParams& p, const LyapunovOptions& opts);

}  // namespace thermodelay
