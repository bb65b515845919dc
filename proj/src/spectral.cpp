/// @file spectral.cpp

#include "thermodelay/spectral.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace thermodelay {

namespace {

void sort_by_real_desc(std::vector<cplx>& e) {
    std::sort(e.begin(), e.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

double norm2(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const auto& e : x) s += std::norm(e);
    return std::sqrt(s);
}

/// Mirror image x -> ell - x on packed states: u, v are mirrored, z and theta
/// are mirrored with a sign flip. It commutes with the generator.
std::vector<double> reflect(const Grid& g, std::span<const double> x) {
    const Layout l(g);
    const std::size_t nx = g.n_nodes(), nc = g.n_cells(), nr = g.n_rho();
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < nx; ++i) {
        y[l.u + i] = x[l.u + nx - 1 - i];
        y[l.v + i] = x[l.v + nx - 1 - i];
    }
    for (std::size_t j = 0; j < nc; ++j) {
        for (std::size_t r = 0; r < nr; ++r) y[l.z_index(j, r)] = -x[l.z_index(nc - 1 - j, r)];
        y[l.theta + j] = -x[l.theta + nc - 1 - j];
    }
    return y;
}

/// Orthonormal bases of the +1 and -1 eigenspaces of the reflection in
/// reduced coordinates, each column stored as (index, weight) pairs. Empty
/// when the reduced reflection is not a signed permutation.
using SparseColumn = std::vector<std::pair<std::size_t, double>>;

std::array<std::vector<SparseColumn>, 2> symmetry_bases(const Generator& gen, const ConstraintBasis& basis) {
    const std::size_t n = basis.reduced_dim();
    std::vector<std::size_t> image(n);
    std::vector<double> sign(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        e[k] = 1.0;
        const auto col = basis.restrict_to(reflect(gen.grid, basis.expand(e)));
        e[k] = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(col[i]) < 1e-12) continue;
            if (std::abs(std::abs(col[i]) - 1.0) > 1e-12) return {};
            image[k] = i;
            sign[k] = col[i];
            ++hits;
        }
        if (hits != 1) return {};
    }
    std::array<std::vector<SparseColumn>, 2> out;
    const double w = std::numbers::sqrt2 / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t m = image[k];
        if (m == k) {
            out[sign[k] > 0.0 ? 0 : 1].push_back({{k, 1.0}});
        } else if (k < m) {
            out[0].push_back({{k, w}, {m, w * sign[k]}});
            out[1].push_back({{k, w}, {m, -w * sign[k]}});
        }
    }
    return out;
}

}  // namespace

std::vector<cplx> spectrum_dense(const DenseMatrix& a) {
    if (a.rows() > kDenseDimCap)
        throw std::length_error("spectrum_dense: dimension " + std::to_string(a.rows()) + " too large");
    auto e = eigenvalues(a);
    sort_by_real_desc(e);
    return e;
}

std::vector<cplx> spectrum_dense(const Generator& gen) {
    const ConstraintBasis basis(gen.grid, gen.params.theta_bc);
    if (basis.reduced_dim() > kDenseDimCap)
        throw std::length_error("spectrum_dense: dimension " + std::to_string(basis.reduced_dim()) + " too large");
    const DenseMatrix ar = reduced_generator(gen);
    const auto bases = symmetry_bases(gen, basis);
    if (bases[0].empty() || bases[1].empty()) return spectrum_dense(ar);

    // The reflection commutes with the generator, so the two eigenspaces are
    // invariant and the spectrum is the union of the two compressed blocks.
    const std::function<std::vector<cplx>(std::size_t)> block = [&](std::size_t s) {
        const auto& cols = bases[s];
        DenseMatrix b(cols.size(), cols.size());
        for (std::size_t q = 0; q < cols.size(); ++q)
            for (std::size_t p = 0; p < cols.size(); ++p) {
                double acc = 0.0;
                for (const auto& [i, wi] : cols[p])
                    for (const auto& [j, wj] : cols[q]) acc += wi * ar(i, j) * wj;
                b(p, q) = acc;
            }
        return eigenvalues(std::move(b));
    };
    const auto parts = map_indexed<std::vector<cplx>>(2, block, Exec::parallel);
    std::vector<cplx> e = parts[0];
    e.insert(e.end(), parts[1].begin(), parts[1].end());
    sort_by_real_desc(e);
    return e;
}

std::vector<cplx> modal_spectrum(const Grid& g, const PhysParams& p, Exec exec) {
    if (p.theta_bc != ThetaBC::neumann)
        throw std::invalid_argument("modal_spectrum: Fourier blocks decouple only with insulated ends");
    p.validate();
    const std::size_t nx = g.n_nodes(), N = static_cast<std::size_t>(g.nrho);
    const double c = N / p.tau;
    const std::size_t bs = 3 + N;

    const std::function<std::vector<cplx>(std::size_t)> block = [&](std::size_t idx) {
        const double k = static_cast<double>(idx + 1);
        const double sigma = 2.0 / g.dx() * std::sin(k * std::numbers::pi / (2.0 * (g.nx + 1)));
        DenseMatrix M(bs, bs);
        M(0, 1) = 1.0;
        M(1, 1) = -p.beta * sigma * sigma;
        M(1, 2) = p.gamma * sigma;
        M(1, bs - 1) = -p.alpha * sigma;
        M(2, 1) = -p.gamma * sigma;
        M(2, 2) = -p.kappa * sigma * sigma;
        M(3, 3) = -c;
        M(3, 0) = c * sigma;
        for (std::size_t i = 4; i < bs; ++i) {
            M(i, i) = -c;
            M(i, i - 1) = c;
        }
        return eigenvalues(M);
    };
    const auto parts = map_indexed<std::vector<cplx>>(nx, block, exec);

    std::vector<cplx> all;
    all.reserve(nx * bs + N);
    for (const auto& part : parts) all.insert(all.end(), part.begin(), part.end());
    for (std::size_t i = 0; i < N; ++i) all.emplace_back(-c, 0.0);
    sort_by_real_desc(all);
    return all;
}

Abscissa spectral_abscissa(const std::vector<cplx>& eigs) {
    if (eigs.empty()) throw std::invalid_argument("spectral_abscissa: empty spectrum");
    Abscissa a{-std::numeric_limits<double>::infinity(), {}};
    for (const auto& e : eigs)
        if (e.real() > a.value) a = {e.real(), e};
    return a;
}

Abscissa spectral_abscissa(const Generator& gen) {
    if (gen.params.theta_bc == ThetaBC::neumann) return spectral_abscissa(modal_spectrum(gen.grid, gen.params));
    return spectral_abscissa(spectrum_dense(gen));
}

std::vector<cplx> apply_complex(const Generator& gen, const std::vector<cplx>& x) {
    const CsrMatrix& a = gen.matrix;
    if (x.size() != a.cols) throw std::invalid_argument("apply_complex: size mismatch");
    std::vector<cplx> y(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        cplx s = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
        y[i] = s;
    }
    return y;
}

std::vector<cplx> solve_resolvent(const Generator& gen, cplx s, const std::vector<cplx>& b) {
    const Grid& g = gen.grid;
    const PhysParams& p = gen.params;
    const Layout& L = gen.layout;
    if (b.size() != L.dim) throw std::invalid_argument("solve_resolvent: size mismatch");
    const std::size_t nx = L.nx, nc = L.ncell, nr = L.nrho_nodes, N = nr - 1;
    const double c = 1.0 / (p.tau * g.drho());
    if (std::abs(s) == 0.0 || std::abs(s + c) == 0.0)
        throw std::domain_error("solve_resolvent: shift coincides with a constraint eigenvalue");
    const double inv = 1.0 / g.dx(), inv2 = inv * inv;
    const double ghost = p.theta_bc == ThetaBC::neumann ? 1.0 : -1.0;

    auto grad = [&](const std::vector<cplx>& u, std::size_t off) {
        std::vector<cplx> out(nc);
        for (std::size_t j = 0; j < nc; ++j) {
            const cplx r = j < nx ? u[off + j] : 0.0;
            const cplx l = j >= 1 ? u[off + j - 1] : 0.0;
            out[j] = (r - l) * inv;
        }
        return out;
    };

    // History offsets: z_r = q^r grad u + e_r with q = c / (s + c).
    const cplx q = c / (s + c);
    const auto gbu = grad(b, L.u);
    std::vector<cplx> e(nc * nr);
    for (std::size_t j = 0; j < nc; ++j) {
        e[j * nr] = (b[L.z_index(j, 0)] - gbu[j]) / s;
        for (std::size_t r = 1; r < nr; ++r) e[j * nr + r] = q * e[j * nr + r - 1] + b[L.z_index(j, r)] / (s + c);
    }
    cplx qN = 1.0;
    for (std::size_t r = 0; r < N; ++r) qN *= q;

    const std::size_t n = nx + g.n_theta();
    auto u_slot = [](std::size_t i) { return 2 * i + 1; };
    auto t_slot = [](std::size_t j) { return 2 * j; };
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, cplx>> ent;
    std::vector<cplx> rhs(n);
    const cplx coef = p.alpha * qN + p.beta * s;
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t r = u_slot(i);
        ent.push_back({{r, r}, s * s + 2.0 * coef * inv2});
        if (i >= 1) ent.push_back({{r, u_slot(i - 1)}, -coef * inv2});
        if (i + 1 < nx) ent.push_back({{r, u_slot(i + 1)}, -coef * inv2});
        ent.push_back({{r, t_slot(i + 1)}, p.gamma * inv});
        ent.push_back({{r, t_slot(i)}, -p.gamma * inv});
        const cplx bl = i >= 1 ? b[L.u + i - 1] : 0.0, br = i + 1 < nx ? b[L.u + i + 1] : 0.0;
        const cplx lap_bu = (bl - 2.0 * b[L.u + i] + br) * inv2;
        const cplx div_e = (e[(i + 1) * nr + N] - e[i * nr + N]) * inv;
        rhs[r] = b[L.v + i] + s * b[L.u + i] + p.alpha * div_e - p.beta * lap_bu;
    }
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        const std::size_t r = t_slot(j);
        cplx diag = -2.0 * inv2;
        if (j == 0 || j + 1 == g.n_theta()) diag += ghost * inv2;
        ent.push_back({{r, r}, s - p.kappa * diag});
        if (j >= 1) ent.push_back({{r, t_slot(j - 1)}, -p.kappa * inv2});
        if (j + 1 < g.n_theta()) ent.push_back({{r, t_slot(j + 1)}, -p.kappa * inv2});
        if (j < nx) ent.push_back({{r, u_slot(j)}, p.gamma * s * inv});
        if (j >= 1) ent.push_back({{r, u_slot(j - 1)}, -p.gamma * s * inv});
        rhs[r] = b[L.theta + j] + p.gamma * gbu[j];
    }
    const auto y = solve_complex_banded(n, 2, 2, ent, std::move(rhs));

    std::vector<cplx> x(L.dim);
    for (std::size_t i = 0; i < nx; ++i) {
        x[L.u + i] = y[u_slot(i)];
        x[L.v + i] = s * x[L.u + i] - b[L.u + i];
    }
    for (std::size_t j = 0; j < g.n_theta(); ++j) x[L.theta + j] = y[t_slot(j)];
    const auto gu = grad(x, L.u);
    for (std::size_t j = 0; j < nc; ++j) {
        cplx pw = 1.0;
        for (std::size_t r = 0; r < nr; ++r) {
            x[L.z_index(j, r)] = pw * gu[j] + e[j * nr + r];
            pw *= q;
        }
    }
    return x;
}

std::vector<RefinedEigenpair> refine_eigenpairs(const Generator& gen, const std::vector<cplx>& approx, double tol,
                                                int max_iter) {
    const ConstraintBasis basis(gen.grid, gen.params.theta_bc);
    std::vector<RefinedEigenpair> out;
    out.reserve(approx.size());
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (const cplx& lam : approx) {
        RefinedEigenpair ep;
        std::vector<double> yr(basis.reduced_dim()), yi(basis.reduced_dim());
        for (auto& v : yr) v = normal(rng);
        for (auto& v : yi) v = normal(rng);
        const auto xr = basis.expand(yr), xi = basis.expand(yi);
        std::vector<cplx> x(xr.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = {xr[i], xi[i]};

        const double scale = std::max(1.0, std::abs(lam));
        const cplx shift = lam + cplx(1e-10 * scale, 1e-10 * scale);
        ep.value = lam;
        for (int it = 1; it <= max_iter; ++it) {
            auto y = solve_resolvent(gen, shift, x);
            const double ny = norm2(y);
            if (!(ny > 0.0) || !std::isfinite(ny)) break;
            for (auto& v : y) v /= ny;
            x = std::move(y);
            const auto ax = apply_complex(gen, x);
            cplx rq = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) rq += std::conj(x[i]) * ax[i];
            ep.value = rq;
            double res = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) res += std::norm(ax[i] - rq * x[i]);
            ep.residual = std::sqrt(res);
            ep.iterations = it;
            if (ep.residual <= tol) {
                ep.converged = true;
                break;
            }
        }
        ep.vector = std::move(x);
        out.push_back(std::move(ep));
    }
    return out;
}

double dissipativity_shift(const PhysParams& p, double xi) {
    if (!(p.beta > 0.0)) return std::numeric_limits<double>::infinity();
    const double m = p.alpha * p.alpha / p.beta + xi / (2.0 * p.tau);
    return m * std::max(1.0, 1.0 / p.alpha);
}

DissipativityResult dissipativity_test(const Generator& gen, double xi, std::size_t trials, std::uint64_t seed,
                                       Exec exec) {
    if (trials == 0) throw std::invalid_argument("dissipativity_test: need at least one trial");
    DissipativityResult res;
    res.m_used = dissipativity_shift(gen.params, xi);
    res.trials = trials;
    const auto q = rayleigh_batch(gen, xi, res.m_used, trials, seed, exec);
    res.max_rayleigh = *std::max_element(q.begin(), q.end());
    return res;
}

double dissipativity_bound(const Generator& gen, double xi, double m) {
    const Grid& g = gen.grid;
    const Layout& L = gen.layout;
    const ConstraintBasis basis(g, gen.params.theta_bc);
    const std::size_t n = L.dim, rd = basis.reduced_dim();
    if (n > kDenseDimCap) throw std::length_error("dissipativity_bound: grid too large for dense work");

    DenseMatrix Q(n, rd);
    std::vector<double> e(rd, 0.0);
    for (std::size_t k = 0; k < rd; ++k) {
        e[k] = 1.0;
        const auto col = basis.expand(e);
        e[k] = 0.0;
        for (std::size_t i = 0; i < n; ++i) Q(i, k) = col[i];
    }

    // Gram matrix of the energy inner product.
    const double dx = g.dx();
    DenseMatrix H(n, n);
    const auto ops = build_operators(g, gen.params.theta_bc);
    const DenseMatrix Gd = ops.grad_u.to_dense();
    const DenseMatrix GtG = Gd.transpose() * Gd;
    for (std::size_t i = 0; i < L.nx; ++i) {
        for (std::size_t k = 0; k < L.nx; ++k) H(L.u + i, L.u + k) = gen.params.alpha * dx * GtG(i, k);
        H(L.v + i, L.v + i) = dx;
    }
    for (std::size_t j = 0; j < L.ncell; ++j)
        for (std::size_t r = 0; r < L.nrho_nodes; ++r) H(L.z_index(j, r), L.z_index(j, r)) = xi * dx * g.rho_weight(r);
    for (std::size_t j = 0; j < g.n_theta(); ++j) H(L.theta + j, L.theta + j) = dx;

    const DenseMatrix A = gen.matrix.to_dense();
    const DenseMatrix HQ = H * Q;
    const DenseMatrix QtH = HQ.transpose();
    const DenseMatrix S = QtH * (A * Q - m * Q);
    const DenseMatrix W = QtH * Q;
    const DenseMatrix Ssym = 0.5 * (S + S.transpose());
    const auto ev = symmetric_pencil_eigenvalues(Ssym, W);
    return ev.back();
}

}  // namespace thermodelay
