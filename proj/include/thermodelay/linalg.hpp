/// @file linalg.hpp
/// @brief Small dense / sparse / banded linear algebra used across the solver.
///
/// Dense factorizations and eigenvalue problems are delegated to LAPACK; the
/// banded LU without pivoting is local because the implicit operators it is
/// used for are positive real (symmetric part positive definite).

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace thermodelay {

using cplx = std::complex<double>;

/// Largest dimension accepted by the dense reference and spectral routines.
constexpr std::size_t kDenseDimCap = 4500;

/// Column-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double> apply(std::span<const double> x) const;
    DenseMatrix transpose() const;
    double norm1() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

/// Solves A X = B (LU with partial pivoting). Throws on singular A.
DenseMatrix solve(DenseMatrix a, DenseMatrix b);

/// All eigenvalues of a general real matrix (Hessenberg reduction + shifted QR).
std::vector<cplx> eigenvalues(DenseMatrix a);

/// Eigenvalues of the symmetric-definite pencil (S, W), ascending.
std::vector<double> symmetric_pencil_eigenvalues(DenseMatrix s, DenseMatrix w);

/// exp(A) by scaling and squaring with a degree-13 Pade approximant.
DenseMatrix expm(const DenseMatrix& a);

/// Compressed sparse row matrix.
struct CsrMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    struct Triplet {
        std::size_t row, col;
        double value;
    };
    /// Duplicates are summed; explicit zeros are dropped.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t);

    std::size_t nnz() const { return values.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;
    DenseMatrix to_dense() const;
    double at(std::size_t i, std::size_t j) const;
};

/// Square banded matrix stored by diagonals, with an in-place LU (no pivoting).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }
    bool in_band(std::size_t i, std::size_t j) const {
        return j + kl_ >= i && i + ku_ >= j;
    }
    double& at(std::size_t i, std::size_t j) { return band_[i * width() + (j + kl_ - i)]; }
    double at(std::size_t i, std::size_t j) const { return band_[i * width() + (j + kl_ - i)]; }

    std::vector<double> apply(std::span<const double> x) const;

    /// Replaces the contents by the LU factors. Throws on a zero pivot.
    void factorize();
    bool factorized() const { return factorized_; }
    void solve_in_place(std::span<double> rhs) const;

private:
    std::size_t width() const { return kl_ + ku_ + 1; }
    std::size_t n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> band_;
    bool factorized_ = false;
};

/// Complex banded system solve (LU with partial pivoting), entries given as triplets.
std::vector<cplx> solve_complex_banded(std::size_t n, std::size_t kl, std::size_t ku,
                                       const std::vector<std::pair<std::pair<std::size_t, std::size_t>, cplx>>& entries,
                                       std::vector<cplx> rhs);

}  // namespace thermodelay
