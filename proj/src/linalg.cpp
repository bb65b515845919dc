/// @file linalg.cpp

#include "thermodelay/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace thermodelay {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    if (x.size() != cols_) throw std::invalid_argument("DenseMatrix::apply: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const double* col = data_.data() + j * rows_;
        for (std::size_t i = 0; i < rows_; ++i) y[i] += col[i] * xj;
    }
    return y;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: size mismatch");
    DenseMatrix c(a.rows(), b.cols());
    if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return c;
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(a.rows()),
                static_cast<int>(b.cols()), static_cast<int>(a.cols()), 1.0, a.data(),
                static_cast<int>(a.rows()), b.data(), static_cast<int>(b.rows()), 0.0, c.data(),
                static_cast<int>(c.rows()));
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum: size mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] += b.data()[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) { return a + (-1.0) * b; }

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) c.data()[i] *= s;
    return c;
}

DenseMatrix solve(DenseMatrix a, DenseMatrix b) {
    if (a.rows() != a.cols() || b.rows() != a.rows()) throw std::invalid_argument("solve: size mismatch");
    const int n = static_cast<int>(a.rows());
    std::vector<lapack_int> ipiv(a.rows());
    const lapack_int info = LAPACKE_dgesv(LAPACK_COL_MAJOR, n, static_cast<int>(b.cols()), a.data(), n,
                                          ipiv.data(), b.data(), n);
    if (info != 0) throw std::runtime_error("solve: singular matrix (dgesv info " + std::to_string(info) + ")");
    return b;
}

std::vector<cplx> eigenvalues(DenseMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
    const int n = static_cast<int>(a.rows());
    std::vector<double> wr(a.rows()), wi(a.rows());
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0)
        throw std::runtime_error("eigenvalues: QR iteration failed to converge (info " + std::to_string(info) + ")");
    std::vector<cplx> out(a.rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {wr[i], wi[i]};
    return out;
}

std::vector<double> symmetric_pencil_eigenvalues(DenseMatrix s, DenseMatrix w) {
    const int n = static_cast<int>(s.rows());
    std::vector<double> ev(s.rows());
    const lapack_int info =
        LAPACKE_dsygv(LAPACK_COL_MAJOR, 1, 'N', 'U', n, s.data(), n, w.data(), n, ev.data());
    if (info != 0) throw std::runtime_error("symmetric_pencil_eigenvalues: dsygv info " + std::to_string(info));
    return ev;
}

DenseMatrix expm(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return a;

    // Higham (2005), degree-13 diagonal Pade approximant.
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm = a.norm1();
    int squarings = 0;
    if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    const DenseMatrix as = std::ldexp(1.0, -squarings) * a;

    const DenseMatrix id = DenseMatrix::identity(n);
    const DenseMatrix a2 = as * as;
    const DenseMatrix a4 = a2 * a2;
    const DenseMatrix a6 = a4 * a2;

    DenseMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    u_inner = a6 * u_inner;
    u_inner = u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    const DenseMatrix u = as * u_inner;

    DenseMatrix v = b[12] * a6 + b[10] * a4 + b[8] * a2;
    v = a6 * v;
    v = v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    DenseMatrix r = solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (std::size_t i = 0; i < t.size();) {
        if (t[i].row >= rows || t[i].col >= cols) throw std::out_of_range("CsrMatrix: triplet out of range");
        std::size_t j = i;
        double sum = 0.0;
        while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) sum += t[j++].value;
        if (sum != 0.0) {
            m.col_idx.push_back(t[i].col);
            m.values.push_back(sum);
            ++m.row_ptr[t[i].row + 1];
        }
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols || y.size() != rows) throw std::invalid_argument("CsrMatrix::apply: size mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
        y[r] = s;
    }
}

std::vector<double> CsrMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(rows);
    apply(x, y);
    return y;
}

DenseMatrix CsrMatrix::to_dense() const {
    DenseMatrix d(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col_idx[k]) = values[k];
    return d;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col_idx[k] == j) return values[k];
    return 0.0;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), band_(n * (kl + ku + 1), 0.0) {}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
    if (factorized_) throw std::logic_error("BandedMatrix::apply on factorized matrix");
    if (x.size() != n_) throw std::invalid_argument("BandedMatrix::apply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

void BandedMatrix::factorize() {
    if (factorized_) return;
    for (std::size_t k = 0; k < n_; ++k) {
        const double piv = at(k, k);
        if (piv == 0.0 || !std::isfinite(piv)) throw std::runtime_error("BandedMatrix: zero pivot");
        const std::size_t imax = std::min(n_ - 1, k + kl_);
        const std::size_t jmax = std::min(n_ - 1, k + ku_);
        for (std::size_t i = k + 1; i <= imax; ++i) {
            const double l = at(i, k) / piv;
            at(i, k) = l;
            for (std::size_t j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
        }
    }
    factorized_ = true;
}

void BandedMatrix::solve_in_place(std::span<double> rhs) const {
    if (!factorized_) throw std::logic_error("BandedMatrix::solve_in_place before factorize");
    if (rhs.size() != n_) throw std::invalid_argument("BandedMatrix::solve_in_place: size mismatch");
    for (std::size_t i = 1; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        double s = rhs[i];
        for (std::size_t j = j0; j < i; ++j) s -= at(i, j) * rhs[j];
        rhs[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t jmax = std::min(n_ - 1, ii + ku_);
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j <= jmax; ++j) s -= at(ii, j) * rhs[j];
        rhs[ii] = s / at(ii, ii);
    }
}

std::vector<cplx> solve_complex_banded(
    std::size_t n, std::size_t kl, std::size_t ku,
    const std::vector<std::pair<std::pair<std::size_t, std::size_t>, cplx>>& entries, std::vector<cplx> rhs) {
    if (rhs.size() != n) throw std::invalid_argument("solve_complex_banded: size mismatch");
    // LAPACK band storage with kl extra rows for the fill-in of partial pivoting.
    const std::size_t ldab = 2 * kl + ku + 1;
    std::vector<cplx> ab(ldab * n, cplx{0.0, 0.0});
    for (const auto& [ij, v] : entries) {
        const auto [i, j] = ij;
        if (j + kl < i || i + ku < j) throw std::out_of_range("solve_complex_banded: entry outside band");
        ab[j * ldab + (kl + ku + i - j)] += v;
    }
    std::vector<lapack_int> ipiv(n);
    const lapack_int info =
        LAPACKE_zgbsv(LAPACK_COL_MAJOR, static_cast<int>(n), static_cast<int>(kl), static_cast<int>(ku), 1,
                      ab.data(), static_cast<int>(ldab), ipiv.data(), rhs.data(), static_cast<int>(n));
    if (info != 0) throw std::runtime_error("solve_complex_banded: singular (zgbsv info " + std::to_string(info) + ")");
    return rhs;
}

}  // namespace thermodelay
