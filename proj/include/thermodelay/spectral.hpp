/// @file spectral.hpp
/// @brief Spectrum of the discrete generator, resolvent solves, and dissipativity checks.
///
/// Eigenvalues are taken on the invariant subspace {z(., 0) = grad u} (and zero
/// theta mass in Neumann mode); the complement only carries the trivial
/// constraint modes.

#pragma once

#include "thermodelay/discretization.hpp"
#include "thermodelay/kernels.hpp"

#include <cstdint>
#include <vector>

namespace thermodelay {

/// Eigenvalues sorted by real part, largest first.
std::vector<cplx> spectrum_dense(const DenseMatrix& a);
std::vector<cplx> spectrum_dense(const Generator& gen);

/// Neumann-mode spectrum by Fourier decomposition: one block of size nrho + 3
/// per wavenumber plus the -nrho/tau eigenvalue of the mean history.
std::vector<cplx> modal_spectrum(const Grid& g, const PhysParams& p, Exec exec = Exec::parallel);

struct Abscissa {
    double value = 0.0;
    cplx eigenvalue{};
};

Abscissa spectral_abscissa(const std::vector<cplx>& eigs);
/// Uses the modal spectrum in Neumann mode and the dense one otherwise.
Abscissa spectral_abscissa(const Generator& gen);

/// Solves (s I - A_h) x = b by eliminating v and z and a pentadiagonal solve
/// in (u, theta). Requires s != 0 and s != -nrho/tau.
std::vector<cplx> solve_resolvent(const Generator& gen, cplx s, const std::vector<cplx>& b);

std::vector<cplx> apply_complex(const Generator& gen, const std::vector<cplx>& x);

struct RefinedEigenpair {
    cplx value{};
    std::vector<cplx> vector;
    double residual = 0.0;  ///< ||A x - value x|| / ||x||
    int iterations = 0;
    bool converged = false;
};

/// Inverse iteration on the full generator, seeded by approximate eigenvalues.
std::vector<RefinedEigenpair> refine_eigenpairs(const Generator& gen, const std::vector<cplx>& approx,
                                                double tol = 1e-8, int max_iter = 8);

struct DissipativityResult {
    double max_rayleigh = 0.0;
    double m_used = 0.0;
    std::size_t trials = 0;
};

/// Dissipativity shift alpha^2/beta + xi/(2 tau), enlarged by 1/alpha when alpha < 1
/// so that the strain term is covered in the energy norm.
double dissipativity_shift(const PhysParams& p, double xi);

/// Max over random constrained states of <(A_h - m) U, U>_H / <U, U>_H.
DissipativityResult dissipativity_test(const Generator& gen, double xi, std::size_t trials,
                                       std::uint64_t seed = 20240601, Exec exec = Exec::parallel);

/// Exact max of the same quotient over the whole constraint subspace
/// (largest eigenvalue of the symmetric-definite pencil). Dense; small grids only.
double dissipativity_bound(const Generator& gen, double xi, double m);

}  // namespace thermodelay
