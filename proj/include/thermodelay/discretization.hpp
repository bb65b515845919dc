/// @file discretization.hpp
/// @brief Staggered finite-difference layout and the assembled discrete generator.
///
/// Layout on (0, ell) with dx = ell / (nx + 1):
///   - u, v at the interior nodes x_i = (i + 1) dx, i = 0..nx-1 (u = 0 at both ends),
///   - strain samples u_x, the history field z and theta at the cell centres
///     x_{j+1/2} = (j + 1/2) dx, j = 0..nx,
///   - rho nodes rho_r = r / nrho, r = 0..nrho.
/// Gradients map nodes to cell centres and the divergence is minus its
/// transpose, so summation by parts holds exactly.

#pragma once

#include "thermodelay/linalg.hpp"
#include "thermodelay/params.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace thermodelay {

struct Grid {
    int nx = 0;    ///< interior displacement nodes
    int nrho = 0;  ///< rho cells
    double ell = 1.0;

    static Grid make(int nx, int nrho, double ell);

    double dx() const { return ell / (nx + 1); }
    double drho() const { return 1.0 / nrho; }
    std::size_t n_nodes() const { return static_cast<std::size_t>(nx); }
    std::size_t n_cells() const { return static_cast<std::size_t>(nx) + 1; }
    std::size_t n_rho() const { return static_cast<std::size_t>(nrho) + 1; }
    std::size_t n_theta() const { return n_cells(); }
    double node_x(std::size_t i) const { return (static_cast<double>(i) + 1.0) * dx(); }
    double cell_x(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx(); }
    double rho(std::size_t r) const { return static_cast<double>(r) / nrho; }
    /// Trapezoid weight of rho node r.
    double rho_weight(std::size_t r) const {
        return (r == 0 || r == static_cast<std::size_t>(nrho)) ? 0.5 * drho() : drho();
    }
};

/// Offsets of the (u, v, z, theta) blocks in a packed vector.
/// z is stored x-major: z[j * n_rho + r] is the value at cell j, rho node r.
struct Layout {
    std::size_t nx = 0, ncell = 0, nrho_nodes = 0;
    std::size_t u = 0, v = 0, z = 0, theta = 0, dim = 0;

    explicit Layout(const Grid& g);
    std::size_t z_index(std::size_t j, std::size_t r) const { return z + j * nrho_nodes + r; }
};

struct State {
    std::vector<double> u, v, z, theta;

    static State zeros(const Grid& g);
    double& z_at(const Grid& g, std::size_t j, std::size_t r) { return z[j * g.n_rho() + r]; }
    double z_at(const Grid& g, std::size_t j, std::size_t r) const { return z[j * g.n_rho() + r]; }
    bool matches(const Grid& g) const;
};

std::vector<double> pack(const State& s);
State unpack(std::span<const double> flat, const Grid& g);

struct Operators {
    CsrMatrix lap_u;       ///< Dirichlet Laplacian on nodes (nx x nx)
    CsrMatrix lap_theta;   ///< Neumann (even ghost) or Dirichlet (odd ghost) Laplacian on cells
    CsrMatrix grad_u;      ///< nodes -> cell centres, with u = 0 at the ends (ncell x nx)
    CsrMatrix div_flux;    ///< cell centres -> nodes (nx x ncell), equals -grad_u^T
    CsrMatrix grad_theta;  ///< theta_x at the nodes; same stencil as div_flux
};

Operators build_operators(const Grid& g, ThetaBC bc);

/// Discrete image of the semigroup generator acting on packed (u, v, z, theta).
/// The rho = 0 rows carry d/dt z(., 0) = grad v, which keeps z(., 0) = grad u
/// invariant; the transport rows use first-order upwinding from rho = 0.
struct Generator {
    Grid grid;
    PhysParams params;
    Layout layout;
    CsrMatrix matrix;

    std::size_t dim() const { return layout.dim; }
    std::vector<double> apply(std::span<const double> x) const { return matrix.apply(x); }
};

Generator assemble_generator(const Grid& g, const PhysParams& p);

/// Discrete inner product of the energy space: alpha <u_x, u_x> + <v, v> + <theta, theta> + xi <<z, z>>.
double inner_product_H(const State& a, const State& b, const Grid& g, const PhysParams& p, double xi);
double inner_product_H(std::span<const double> a, std::span<const double> b, const Grid& g,
                       const PhysParams& p, double xi);

/// Coordinates on the invariant subspace {z(., 0) = grad u} (and zero theta
/// mass in Neumann mode). Reduced vectors order: u, v, z(rho > 0), theta
/// without its last cell.
class ConstraintBasis {
public:
    ConstraintBasis(const Grid& g, ThetaBC bc);

    std::size_t reduced_dim() const { return reduced_dim_; }
    std::vector<double> expand(std::span<const double> y) const;
    std::vector<double> restrict_to(std::span<const double> x) const;

private:
    Grid grid_;
    Layout layout_;
    bool drop_theta_mean_;
    std::size_t reduced_dim_;
    CsrMatrix grad_u_;
};

/// R A Q for the generator restricted to the constraint subspace.
DenseMatrix reduced_generator(const Generator& gen);

/// Projects theta to zero discrete mean (Neumann setting).
void project_theta_mean(std::span<double> theta);

}  // namespace thermodelay
