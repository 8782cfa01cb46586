// linalg.cpp — CMatrix arithmetic, Kronecker/commutator helpers, and the
// cyclic Jacobi Hermitian eigensolver.

#include "fiberheom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fiberheom::lin {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > CMatrix::kMaxDim) {
        throw std::invalid_argument("CMatrix: dimension must be in [1, 4], got " +
                                    std::to_string(dim));
    }
}

void check_same_dim(const CMatrix& a, const CMatrix& b, const char* op) {
    if (a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

CMatrix::CMatrix(int dim) : dim_(dim) { check_dim(dim); }

CMatrix::CMatrix(int dim, std::initializer_list<cplx> row_major) : dim_(dim) {
    check_dim(dim);
    if (static_cast<int>(row_major.size()) != dim * dim) {
        throw std::invalid_argument("CMatrix: initializer must have dim^2 entries");
    }
    std::copy(row_major.begin(), row_major.end(), e_.begin());
}

CMatrix CMatrix::identity(int dim) {
    CMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    check_same_dim(*this, o, "operator+=");
    for (int k = 0; k < size(); ++k) e_[k] += o.e_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    check_same_dim(*this, o, "operator-=");
    for (int k = 0; k < size(); ++k) e_[k] -= o.e_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (int k = 0; k < size(); ++k) e_[k] *= s;
    return *this;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

CMatrix CMatrix::conjugate() const {
    CMatrix r(dim_);
    for (int k = 0; k < size(); ++k) r.e_[k] = std::conj(e_[k]);
    return r;
}

cplx CMatrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) s += std::norm(e_[k]);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (int k = 0; k < size(); ++k) m = std::max(m, std::abs(e_[k]));
    return m;
}

double CMatrix::hermiticity_defect() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

bool CMatrix::is_diagonal(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
}

bool CMatrix::all_finite() const {
    for (int k = 0; k < size(); ++k)
        if (!std::isfinite(e_[k].real()) || !std::isfinite(e_[k].imag())) return false;
    return true;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "operator*");
    const int n = a.dim();
    CMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(double s, CMatrix a) { return a *= cplx(s, 0.0); }

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "max_abs_diff");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const int n = a.dim() * b.dim();
    if (n > CMatrix::kMaxDim) {
        throw std::invalid_argument("kron: product dimension " + std::to_string(n) +
                                    " exceeds the supported maximum of 4");
    }
    CMatrix r(n);
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            for (int k = 0; k < b.dim(); ++k)
                for (int l = 0; l < b.dim(); ++l)
                    r(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
    return r;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "commutator");
    return a * b - b * a;
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "anticommutator");
    return a * b + b * a;
}

namespace {

double offdiag_norm(const CMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p,q). Updates a (two-sided) and
// accumulates the rotation into v (right-multiplication).
void jacobi_rotate(CMatrix& a, CMatrix& v, int p, int q) {
    const cplx apq = a(p, q);
    const double b = std::abs(apq);
    if (b == 0.0) return;
    const cplx phase = apq / b;  // e^{i phi}
    const double alpha = a(p, p).real();
    const double delta = a(q, q).real();
    const double theta = 0.5 * std::atan2(2.0 * b, alpha - delta);
    const double c = std::cos(theta);
    const cplx s = std::sin(theta) * std::conj(phase);  // sigma e^{-i phi}

    const int n = a.dim();
    // A <- G^H A G with G acting on columns (p, q):
    // col_p' = c*col_p + s*col_q ; col_q' = -conj(s)*col_p + c*col_q
    for (int i = 0; i < n; ++i) {
        const cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip + s * aiq;
        a(i, q) = -std::conj(s) * aip + c * aiq;
    }
    for (int j = 0; j < n; ++j) {
        const cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj + std::conj(s) * aqj;
        a(q, j) = -s * apj + c * aqj;
    }
    for (int i = 0; i < n; ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip + s * viq;
        v(i, q) = -std::conj(s) * vip + c * viq;
    }
    // exact zeros on the eliminated pair keep the sweep numerically clean
    a(p, q) = 0.0;
    a(q, p) = 0.0;
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& input) {
    const double defect = input.hermiticity_defect();
    if (defect > 1e-10) {
        throw std::invalid_argument("hermitian_eig: input not Hermitian (defect " +
                                    std::to_string(defect) + ")");
    }
    const int n = input.dim();
    CMatrix a = input;
    // fold the (tiny) antihermitian part away so the iteration sees an exactly
    // Hermitian matrix
    for (int i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (int j = i + 1; j < n; ++j) {
            const cplx m = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = m;
            a(j, i) = std::conj(m);
        }
    }

    CMatrix v = CMatrix::identity(n);
    const double tol = 1e-14 * std::max(1.0, a.frobenius_norm());
    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    while (offdiag_norm(a) > tol) {
        if (++sweep > kMaxSweeps) {
            throw std::runtime_error("hermitian_eig: Jacobi iteration failed to converge");
        }
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEig out;
    out.values.resize(n);
    out.vectors = CMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

CMatrix psd_sqrt(const CMatrix& a) {
    HermitianEig eig = hermitian_eig(a);
    const int n = a.dim();
    for (double& lam : eig.values) {
        if (lam < -1e-10) {
            throw std::invalid_argument("psd_sqrt: eigenvalue " + std::to_string(lam) +
                                        " below the -1e-10 PSD tolerance");
        }
        lam = lam > 0.0 ? std::sqrt(lam) : 0.0;
    }
    // B = V sqrt(Lambda) V^H
    CMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k)
                s += eig.vectors(i, k) * eig.values[k] * std::conj(eig.vectors(j, k));
            r(i, j) = s;
        }
    return r;
}

CMatrix pauli_x() { return CMatrix(2, {0.0, 1.0, 1.0, 0.0}); }

CMatrix pauli_y() {
    return CMatrix(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});
}

CMatrix pauli_z() { return CMatrix(2, {1.0, 0.0, 0.0, -1.0}); }

CMatrix identity2() { return CMatrix::identity(2); }

}  // namespace fiberheom::lin
