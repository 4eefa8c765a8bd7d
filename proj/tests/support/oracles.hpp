// Independent oracles used by the test suites. These deliberately avoid the
// library's decomposition routines so they can cross-check them.
#pragma once

#include <cmath>
#include <vector>

#include "anholonomy/numlin.hpp"

namespace anholonomy::oracle {

// Naive triple-loop product, index order straight from the definition.
inline ComplexMatrix matmul_naive(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double matrix_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

// exp(M) by scaling-and-squaring a plain Taylor series.
inline ComplexMatrix expm_taylor(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    const double fro = frobenius_norm(m);
    int s = 0;
    double scale = 1.0;
    while (fro * scale > 0.25) {
        scale *= 0.5;
        ++s;
    }
    ComplexMatrix scaled = m;
    for (std::size_t i = 0; i < n * n; ++i) scaled.data()[i] *= scale;

    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = matmul_naive(term, scaled);
        for (std::size_t i = 0; i < n * n; ++i) term.data()[i] /= static_cast<double>(k);
        for (std::size_t i = 0; i < n * n; ++i) result.data()[i] += term.data()[i];
    }
    for (int k = 0; k < s; ++k) result = matmul_naive(result, result);
    return result;
}

namespace detail {

// Number of eigenvalues of the real symmetric matrix strictly below x, from
// the pivot signs of an LDL^T-style elimination of (M - xI). The pivot signs
// form the Sturm sequence of the characteristic polynomial's leading
// principal minors.
inline int count_eigenvalues_below(std::vector<double> a, std::size_t n, double x, double tiny) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] -= x;
    int negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double piv = a[k * n + k];
        if (std::abs(piv) < tiny) piv = (piv < 0.0 ? -tiny : tiny);
        if (piv < 0.0) ++negatives;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / piv;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return negatives;
}

}  // namespace detail

// All eigenvalues (ascending) of a real symmetric matrix by pure bisection on
// the eigenvalue-counting function. No similarity transforms involved.
inline std::vector<double> symmetric_eigenvalues_bisection(const std::vector<double>& m, std::size_t n) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) radius += std::abs(m[i * n + j]);
        lo = std::min(lo, m[i * n + i] - radius);
        hi = std::max(hi, m[i * n + i] + radius);
    }
    lo -= 1.0;
    hi += 1.0;
    const double tiny = 1e-300;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (detail::count_eigenvalues_below(m, n, mid, tiny) >= static_cast<int>(k) + 1)
                b = mid;
            else
                a = mid;
            if (b - a < 1e-13 * std::max(1.0, std::abs(b))) break;
        }
        out[k] = 0.5 * (a + b);
    }
    return out;
}

// Eigenvalues of a complex Hermitian matrix via its doubled real symmetric
// embedding [[A, -B], [B, A]].
inline std::vector<double> hermitian_eigenvalues_bisection(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    const std::size_t n2 = 2 * n;
    std::vector<double> m(n2 * n2, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m[i * n2 + j] = h(i, j).real();
            m[i * n2 + (n + j)] = -h(i, j).imag();
            m[(n + i) * n2 + j] = h(i, j).imag();
            m[(n + i) * n2 + (n + j)] = h(i, j).real();
        }
    const std::vector<double> doubled = symmetric_eigenvalues_bisection(m, n2);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = 0.5 * (doubled[2 * k] + doubled[2 * k + 1]);
    return out;
}

}  // namespace anholonomy::oracle
