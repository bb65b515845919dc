/// @file kernels.cpp

#include "thermodelay/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace thermodelay {

void csr_apply(const CsrMatrix& a, std::span<const double> x, std::span<double> y, Exec exec) {
    if (x.size() != a.cols || y.size() != a.rows) throw std::invalid_argument("csr_apply: size mismatch");
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
            y[i] = s;
        }
    } else {
        for (std::ptrdiff_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
            y[i] = s;
        }
    }
}

std::vector<double> random_constrained_state(const Grid& g, ThetaBC bc, std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Layout L(g);
    std::vector<double> x(L.dim, 0.0);

    if (trial % 2 == 0) {
        for (double& e : x) e = normal(rng);
    } else {
        constexpr int modes = 4;
        const double pi = std::numbers::pi;
        double a[4][modes];
        for (auto& row : a)
            for (double& e : row) e = normal(rng);
        for (std::size_t i = 0; i < L.nx; ++i) {
            const double s = g.node_x(i) / g.ell;
            for (int m = 0; m < modes; ++m) {
                x[L.u + i] += a[0][m] * std::sin((m + 1) * pi * s) / (m + 1);
                x[L.v + i] += a[1][m] * std::sin((m + 1) * pi * s);
            }
        }
        double c[3];
        for (double& e : c) e = normal(rng);
        for (std::size_t j = 0; j < L.ncell; ++j) {
            const double s = g.cell_x(j) / g.ell;
            double zx = 0.0;
            for (int m = 0; m < modes; ++m) {
                x[L.theta + j] += a[2][m] * std::cos(m * pi * s);
                zx += a[3][m] * std::cos(m * pi * s);
            }
            for (std::size_t r = 0; r < L.nrho_nodes; ++r) {
                const double rho = g.rho(r);
                x[L.z_index(j, r)] = zx * (c[0] + c[1] * rho + c[2] * rho * rho);
            }
        }
    }

    const double inv = 1.0 / g.dx();
    for (std::size_t j = 0; j < L.ncell; ++j) {
        const double r = j < L.nx ? x[L.u + j] : 0.0;
        const double l = j >= 1 ? x[L.u + j - 1] : 0.0;
        x[L.z_index(j, 0)] = (r - l) * inv;
    }
    if (bc == ThetaBC::neumann) project_theta_mean(std::span<double>(x.data() + L.theta, g.n_theta()));
    return x;
}

std::vector<double> rayleigh_batch(const Generator& gen, double xi, double m, std::size_t trials,
                                   std::uint64_t seed, Exec exec) {
    const std::function<double(std::size_t)> one = [&](std::size_t t) {
        const auto x = random_constrained_state(gen.grid, gen.params.theta_bc, seed, t);
        std::vector<double> ax(x.size());
        csr_apply(gen.matrix, x, ax, Exec::serial);
        for (std::size_t i = 0; i < x.size(); ++i) ax[i] -= m * x[i];
        return inner_product_H(ax, x, gen.grid, gen.params, xi) / inner_product_H(x, x, gen.grid, gen.params, xi);
    };
    return map_indexed<double>(trials, one, exec);
}

}  // namespace thermodelay
