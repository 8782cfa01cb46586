// linalg.hpp — Dense complex matrices of dimension <= 4 and the Hermitian
// eigensolver used by the concurrence and HEOM right-hand-side code.

#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

namespace fiberheom::lin {

using cplx = std::complex<double>;

// Row-major dense complex matrix, dimension 1..4. Value type: cheap to copy,
// immutable-by-convention once built (all module operations return new values).
class CMatrix {
public:
    static constexpr int kMaxDim = 4;

    CMatrix() = default;
    explicit CMatrix(int dim);
    CMatrix(int dim, std::initializer_list<cplx> row_major);

    static CMatrix identity(int dim);

    int dim() const noexcept { return dim_; }
    int size() const noexcept { return dim_ * dim_; }

    cplx& operator()(int i, int j) { return e_[i * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return e_[i * dim_ + j]; }

    cplx* data() noexcept { return e_.data(); }
    const cplx* data() const noexcept { return e_.data(); }

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    CMatrix adjoint() const;
    CMatrix conjugate() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    // max |A - A^dagger| over entries
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    bool is_diagonal(double tol = 0.0) const;
    bool all_finite() const;

private:
    int dim_ = 0;
    std::array<cplx, kMaxDim * kMaxDim> e_{};
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);  // matrix product
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(double s, CMatrix a);

double max_abs_diff(const CMatrix& a, const CMatrix& b);

// Kronecker product; result dimension a.dim * b.dim must stay <= 4.
CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix commutator(const CMatrix& a, const CMatrix& b);      // ab - ba
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);  // ab + ba

struct HermitianEig {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns are eigenvectors
};

// Cyclic complex Jacobi diagonalization. Input must be Hermitian within
// 1e-10; iterates until the off-diagonal Frobenius norm drops below
// 1e-14 * max(1, ||A||_F).
HermitianEig hermitian_eig(const CMatrix& a);

// Hermitian PSD square root. Eigenvalues in [-1e-10, 0) are clamped to zero;
// anything more negative is rejected as a precondition violation.
CMatrix psd_sqrt(const CMatrix& a);

// Pauli matrices and the 2x2 identity.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix identity2();

}  // namespace fiberheom::lin
