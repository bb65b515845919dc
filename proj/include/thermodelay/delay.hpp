/// @file delay.hpp
/// @brief The delayed strain u_x(., t - tau): a rho-transport field and an exact ring buffer.
///
/// Both representations sample the strain at the cell centres. With
/// dt = tau / nrho the ring lag r coincides with the transport node rho_r.

#pragma once

#include "thermodelay/discretization.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace thermodelay {

/// Ring of the last nrho + 1 strain snapshots; lag 0 is the newest.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    HistoryBuffer(std::size_t ncell, int nrho, double tau);

    std::size_t capacity() const { return capacity_; }
    std::size_t fill() const { return fill_; }
    std::size_t width() const { return ncell_; }
    /// Step size for which the tail is exactly u_x(t - tau).
    double dt_lock() const { return dt_lock_; }

    void push(std::span<const double> ux);
    /// Snapshot recorded k pushes ago.
    std::span<const double> lag(std::size_t k) const;
    std::span<const double> tail() const { return lag(capacity_ - 1); }

private:
    std::size_t ncell_ = 0, capacity_ = 0, head_ = 0, fill_ = 0;
    double dt_lock_ = 0.0;
    std::vector<double> data_;
};

/// Past strain of the form profile(x) * exp(rate * s), s in [-tau, 0].
struct SeparableHistory {
    std::vector<double> profile;  ///< values at the cell centres
    double rate = 0.0;

    double factor(double s) const;
};

enum class HistoryPreset { zero, constant_history, decaying_exponential };

HistoryPreset history_preset_from_string(const std::string& name);
const char* to_string(HistoryPreset preset);

/// Preset history built from the discrete strain of u0 (zero, constant, or times e^s).
SeparableHistory make_history(HistoryPreset preset, const Grid& g, std::span<const double> u0);

struct HistoryInit {
    std::vector<double> z;   ///< z[j * n_rho + r] = f0(x_j, -tau rho_r)
    HistoryBuffer buffer;    ///< same samples, oldest pushed first
    double mismatch = 0.0;   ///< max |z(., 0) - grad u0| when u0 was supplied
};

using HistoryFunction = std::function<double(double x, double s)>;

/// Samples f0 at the cell centres and rho nodes. When u0 is given, compares
/// z(., 0) with its discrete strain and warns on stderr above `tol`.
HistoryInit init_history(const HistoryFunction& f0, const Grid& g, double tau,
                         std::span<const double> u0 = {}, double tol = 1e-8);
HistoryInit init_history(const SeparableHistory& f0, const Grid& g, double tau,
                         std::span<const double> u0 = {}, double tol = 1e-8);

/// Upwind step of tau z_t + z_rho = 0 with inflow z(., 0) = inflow.
/// weight = 0 is the explicit scheme (requires dt / (tau drho) <= 1, else
/// std::domain_error); weight in (0, 1] blends in the implicit update.
void advance_transport(std::span<double> z, const Grid& g, std::span<const double> inflow, double dt,
                       double tau, double weight = 0.0);

/// z(., 1) from the transport field.
std::vector<double> read_delayed(std::span<const double> z, const Grid& g);
/// Oldest snapshot of a full ring; throws std::logic_error when not yet filled.
std::vector<double> read_delayed(const HistoryBuffer& buffer);

/// Expands a full ring back into a transport field (lag r -> node rho_r).
std::vector<double> to_field(const HistoryBuffer& buffer, const Grid& g);

}  // namespace thermodelay
