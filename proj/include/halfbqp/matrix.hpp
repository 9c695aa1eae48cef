#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace halfbqp {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major. Sized for desk-scale work
// (dim <= 2^10); nothing here tries to be cache-clever.
struct CMatrix {
    int dim = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(int d) : dim(d), a(static_cast<size_t>(d) * d) {}

    static CMatrix identity(int d) {
        CMatrix m(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * dim + c]; }
    const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * dim + c]; }

    CMatrix adjoint() const {
        CMatrix m(dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (const cplx& v : a) s += std::norm(v);
        return std::sqrt(s);
    }
};

inline CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.dim != y.dim) throw std::invalid_argument("matrix dimension mismatch");
    int d = x.dim;
    CMatrix z(d);
    for (int r = 0; r < d; ++r) {
        for (int k = 0; k < d; ++k) {
            cplx v = x(r, k);
            if (v == cplx{}) continue;
            const cplx* yrow = &y.a[static_cast<size_t>(k) * d];
            cplx* zrow = &z.a[static_cast<size_t>(r) * d];
            for (int c = 0; c < d; ++c) zrow[c] += v * yrow[c];
        }
    }
    return z;
}

inline CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    if (x.dim != y.dim) throw std::invalid_argument("matrix dimension mismatch");
    CMatrix z(x.dim);
    for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
    return z;
}

inline double max_abs_entry(const CMatrix& m) {
    double mx = 0.0;
    for (const cplx& v : m.a) mx = std::max(mx, std::abs(v));
    return mx;
}

inline bool is_unitary(const CMatrix& u, double tol) {
    CMatrix p = u.adjoint() * u;
    for (int r = 0; r < u.dim; ++r)
        for (int c = 0; c < u.dim; ++c) {
            cplx want = (r == c) ? cplx{1.0} : cplx{};
            if (std::abs(p(r, c) - want) > tol) return false;
        }
    return true;
}

// Cyclic Jacobi eigensolver for Hermitian matrices. Diagonalizes in place and
// returns the eigenvalues; optionally accumulates eigenvectors as columns of
// *vectors. Tolerance is on the off-diagonal Frobenius mass relative to the
// matrix scale.
inline std::vector<double> hermitian_eigenvalues(CMatrix h, CMatrix* vectors = nullptr,
                                                 double tol = 1e-12, int max_sweeps = 10000) {
    int d = h.dim;
    if (vectors) *vectors = CMatrix::identity(d);
    double scale = std::max(h.frobenius(), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += 2.0 * std::norm(h(p, q));
        if (std::sqrt(off) <= tol * scale) break;

        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                cplx hpq = h(p, q);
                double gamma = std::abs(hpq);
                if (gamma <= 1e-300) continue;
                cplx phase = hpq / gamma;  // e^{i phi}
                double alpha = h(p, p).real();
                double beta = h(q, q).real();
                double tau = (beta - alpha) / (2.0 * gamma);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // V = [[c, s], [-s*conj(phase), c*conj(phase)]] on (p,q); H <- V^dag H V
                for (int i = 0; i < d; ++i) {
                    cplx hip = h(i, p), hiq = h(i, q);
                    h(i, p) = c * hip - s * std::conj(phase) * hiq;
                    h(i, q) = s * hip + c * std::conj(phase) * hiq;
                }
                for (int j = 0; j < d; ++j) {
                    cplx hpj = h(p, j), hqj = h(q, j);
                    h(p, j) = c * hpj - s * phase * hqj;
                    h(q, j) = s * hpj + c * phase * hqj;
                }
                if (vectors) {
                    for (int i = 0; i < d; ++i) {
                        cplx vip = (*vectors)(i, p), viq = (*vectors)(i, q);
                        (*vectors)(i, p) = c * vip - s * std::conj(phase) * viq;
                        (*vectors)(i, q) = s * vip + c * std::conj(phase) * viq;
                    }
                }
            }
        }
    }
    std::vector<double> eig(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) eig[static_cast<size_t>(i)] = h(i, i).real();
    return eig;
}

// Singular values of m via the Gram matrix m^dag m, descending.
inline std::vector<double> singular_values(const CMatrix& m) {
    CMatrix gram = m.adjoint() * m;
    std::vector<double> eig = hermitian_eigenvalues(std::move(gram));
    for (double& v : eig) v = std::sqrt(std::max(0.0, v));
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

}  // namespace halfbqp
