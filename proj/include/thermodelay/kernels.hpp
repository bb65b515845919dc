/// @file kernels.hpp
/// @brief Hot loops with a serial reference and an OpenMP variant.
///
/// Both variants produce bitwise identical results: the parallel versions
/// only split independent outer iterations and reduce in a fixed order.

#pragma once

#include "thermodelay/discretization.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thermodelay {

enum class Exec { serial, parallel };

/// y = A x for a CSR matrix.
void csr_apply(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Exec exec);

/// Deterministic random state on the constraint subspace: z(., 0) = grad u and,
/// in Neumann mode, zero theta mass. Even trials draw iid normal entries, odd
/// trials a few smooth modes in x and rho.
std::vector<double> random_constrained_state(const Grid& g, ThetaBC bc, std::uint64_t seed, std::uint64_t trial);

/// Rayleigh quotients <(A - m) U, U>_H / <U, U>_H over `trials` random states.
std::vector<double> rayleigh_batch(const Generator& gen, double xi, double m, std::size_t trials,
                                   std::uint64_t seed, Exec exec);

/// Runs `work(i)` for i in [0, count); results land in slot i regardless of scheduling.
template <class T>
std::vector<T> map_indexed(std::size_t count, const std::function<T(std::size_t)>& work, Exec exec) {
    std::vector<T> out(count);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
            out[static_cast<std::size_t>(i)] = work(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < count; ++i) out[i] = work(i);
    }
    return out;
}

}  // namespace thermodelay
