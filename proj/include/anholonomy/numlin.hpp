// Dense complex linear algebra: vectors, matrices, Hermitian/unitary
// eigendecomposition and spectral matrix exponentials. Self-contained,
// desk-scale (dim up to a few thousand), deterministic output.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anholonomy {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class NumlinError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public NumlinError {
public:
    using NumlinError::NumlinError;
};

class NotHermitian : public NumlinError {
public:
    using NumlinError::NumlinError;
};

class NotUnitary : public NumlinError {
public:
    using NumlinError::NumlinError;
};

class ConvergenceFailure : public NumlinError {
public:
    using NumlinError::NumlinError;
};

class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t dim) : data_(dim) {}
    explicit ComplexVector(std::vector<cplx> entries) : data_(std::move(entries)) {}

    std::size_t dim() const { return data_.size(); }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    static ComplexVector basis(std::size_t dim, std::size_t k) {
        ComplexVector e(dim);
        e[k] = 1.0;
        return e;
    }

private:
    std::vector<cplx> data_;
};

// Square row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    std::size_t dim() const { return dim_; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    cplx* row(std::size_t i) { return data_.data() + i * dim_; }
    const cplx* row(std::size_t i) const { return data_.data() + i * dim_; }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cplx>& d) {
        ComplexMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

// <a|b>, conjugate-linear in the first argument.
inline cplx inner(const ComplexVector& a, const ComplexVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner: dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(const ComplexVector& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::norm(a[i]);
    return std::sqrt(s);
}

inline ComplexVector normalized(ComplexVector a) {
    const double n = norm2(a);
    if (n == 0.0) throw NumlinError("normalized: zero vector");
    for (std::size_t i = 0; i < a.dim(); ++i) a[i] /= n;
    return a;
}

// |<a|b>|^2 for unit vectors; the phase-insensitive overlap used throughout.
inline double fidelity(const ComplexVector& a, const ComplexVector& b) {
    return std::norm(inner(a, b));
}

inline double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    const std::size_t nn = m.dim() * m.dim();
    for (std::size_t i = 0; i < nn; ++i) s += std::norm(m.data()[i]);
    return std::sqrt(s);
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    ComplexMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matmul: dimension mismatch");
    const std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* ai = a.row(i);
        cplx* ci = c.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = ai[k];
            if (aik == cplx(0.0)) continue;
            const cplx* bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

inline ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.dim() != x.dim()) throw DimensionMismatch("matvec: dimension mismatch");
    const std::size_t n = a.dim();
    ComplexVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* ai = a.row(i);
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) { return matvec(a, x); }

// |u><w|
inline ComplexMatrix outer(const ComplexVector& u, const ComplexVector& w) {
    if (u.dim() != w.dim()) throw DimensionMismatch("outer: dimension mismatch");
    const std::size_t n = u.dim();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = u[i] * std::conj(w[j]);
    return m;
}

inline ComplexMatrix add_scaled(const ComplexMatrix& a, const ComplexMatrix& b, cplx beta) {
    if (a.dim() != b.dim()) throw DimensionMismatch("add_scaled: dimension mismatch");
    ComplexMatrix c = a;
    const std::size_t nn = a.dim() * a.dim();
    for (std::size_t i = 0; i < nn; ++i) c.data()[i] += beta * b.data()[i];
    return c;
}

inline double hermiticity_deviation(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += std::norm(h(i, j) - std::conj(h(j, i)));
    return std::sqrt(s);
}

inline double unitarity_deviation(const ComplexMatrix& u) {
    // ||u^dag u - I||_F without forming the adjoint explicitly
    const std::size_t n = u.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cplx e = 0.0;
            for (std::size_t k = 0; k < n; ++k) e += std::conj(u(k, i)) * u(k, j);
            if (i == j) e -= 1.0;
            s += (i == j) ? std::norm(e) : 2.0 * std::norm(e);
        }
    }
    return std::sqrt(s);
}

namespace detail {

// Rotate the phase of x so its largest-magnitude component is real positive;
// ties broken by lowest index. Gives deterministic eigenvector output.
inline void gauge_fix(ComplexVector& x) {
    std::size_t k = 0;
    double best = std::norm(x[0]);
    for (std::size_t i = 1; i < x.dim(); ++i) {
        const double m = std::norm(x[i]);
        if (m > best) {
            best = m;
            k = i;
        }
    }
    const double mag = std::sqrt(best);
    if (mag == 0.0) return;
    const cplx phase = std::conj(x[k]) / mag;
    for (std::size_t i = 0; i < x.dim(); ++i) x[i] *= phase;
}

// Cyclic complex Jacobi on a Hermitian matrix held in `a` (flat row-major,
// destroyed). Eigenvector columns accumulate into `vecs` (preloaded, usually
// the identity). Stops when the off-diagonal Frobenius norm drops below
// `off_target`; throws after `max_sweeps` full sweeps.
inline void jacobi_hermitian_inplace(std::vector<cplx>& a, std::vector<cplx>& vecs, std::size_t n,
                                     double off_target, int max_sweeps = 100) {
    if (n < 2) return;
    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a[p * n + q]);
        return std::sqrt(2.0 * s);
    };
    const double skip_tol = off_target / (2.0 * static_cast<double>(n));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= off_target) return;
        for (std::size_t p = 0; p < n - 1; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a[p * n + q];
                const double m = std::abs(apq);
                if (m <= skip_tol) continue;
                const cplx w = apq / m;  // unit-modulus phase of the pivot
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                const double tau = (aqq - app) / (2.0 * m);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sw = s * w;
                const cplx swc = s * std::conj(w);
                // rows/columns p and q of A (keep A Hermitian by construction)
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const cplx arp = a[r * n + p];
                    const cplx arq = a[r * n + q];
                    const cplx nrp = c * arp - swc * arq;
                    const cplx nrq = sw * arp + c * arq;
                    a[r * n + p] = nrp;
                    a[r * n + q] = nrq;
                    a[p * n + r] = std::conj(nrp);
                    a[q * n + r] = std::conj(nrq);
                }
                const double cross = 2.0 * s * c * m;
                a[p * n + p] = app * c * c + aqq * s * s - cross;
                a[q * n + q] = app * s * s + aqq * c * c + cross;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                // accumulate eigenvectors: V <- V G
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx vrp = vecs[r * n + p];
                    const cplx vrq = vecs[r * n + q];
                    vecs[r * n + p] = c * vrp - swc * vrq;
                    vecs[r * n + q] = sw * vrp + c * vrq;
                }
            }
        }
    }
    if (off_norm() > off_target)
        throw ConvergenceFailure("jacobi_hermitian: not converged within sweep limit");
}

}  // namespace detail

struct HermitianEig {
    std::vector<double> eigenvalues;          // ascending
    std::vector<ComplexVector> eigenvectors;  // orthonormal, gauge-fixed
};

// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
// Requires ||h - h^dag||_F <= 1e-12 ||h||_F.
inline HermitianEig eig_hermitian(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    if (n == 0) throw DimensionMismatch("eig_hermitian: empty matrix");
    const double fro = frobenius_norm(h);
    if (hermiticity_deviation(h) > 1e-12 * fro)
        throw NotHermitian("eig_hermitian: input is not Hermitian");

    std::vector<cplx> a(h.data(), h.data() + n * n);
    // symmetrize exactly so Jacobi sees a Hermitian matrix to machine precision
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] = cplx(a[i * n + i].real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx m = 0.5 * (a[i * n + j] + std::conj(a[j * n + i]));
            a[i * n + j] = m;
            a[j * n + i] = std::conj(m);
        }
    }
    std::vector<cplx> vecs(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) vecs[i * n + i] = 1.0;
    detail::jacobi_hermitian_inplace(a, vecs, n, 1e-13 * fro);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i].real() < a[j * n + j].real(); });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t c = order[k];
        out.eigenvalues[k] = a[c * n + c].real();
        ComplexVector x(n);
        for (std::size_t r = 0; r < n; ++r) x[r] = vecs[r * n + c];
        detail::gauge_fix(x);
        out.eigenvectors.push_back(std::move(x));
    }
    return out;
}

struct UnitaryEig {
    std::vector<double> eigenphases;          // theta_n in [0, 2pi), ascending; U x_n = e^{i theta_n} x_n
    std::vector<ComplexVector> eigenvectors;  // orthonormal, gauge-fixed
    std::vector<double> residuals;            // ||U x_n - e^{i theta_n} x_n||_2
};

namespace detail {

// One cyclic polish pass over G = X^dag U X with exact 2x2 eigenvector
// rotations. G is normal (U unitary), so each near-diagonal 2x2 block is
// unitarily diagonalizable; sweeping drives the off-diagonal norm to roundoff
// and with it the eigenpair residuals, independent of how close eigenvalues
// of the Hermitian part are.
inline void normal_polish(std::vector<cplx>& g, std::vector<cplx>& x, std::size_t n, double off_target,
                          int max_sweeps = 12) {
    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (p != q) s += std::norm(g[p * n + q]);
        return std::sqrt(s);
    };
    const double skip_tol = off_target / (2.0 * static_cast<double>(n));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= off_target) return;
        for (std::size_t p = 0; p < n - 1; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx b = g[p * n + q];
                const cplx c2 = g[q * n + p];
                if (std::abs(b) <= skip_tol && std::abs(c2) <= skip_tol) continue;
                const cplx aa = g[p * n + p];
                const cplx dd = g[q * n + q];
                const cplx tr = aa + dd;
                const cplx disc = std::sqrt((aa - dd) * (aa - dd) + 4.0 * b * c2);
                const cplx mu = 0.5 * (tr + disc);
                // eigenvector of the 2x2 block for eigenvalue mu; take the
                // better-conditioned of the two row constructions
                cplx u1, u2;
                const cplx ca = b, cb = mu - aa;       // from row 1
                const cplx da = mu - dd, db = c2;      // from row 2
                if (std::norm(ca) + std::norm(cb) >= std::norm(da) + std::norm(db)) {
                    u1 = ca;
                    u2 = cb;
                } else {
                    u1 = da;
                    u2 = db;
                }
                const double nn = std::sqrt(std::norm(u1) + std::norm(u2));
                if (nn == 0.0) continue;  // defective direction; block is already diagonal-ish
                u1 /= nn;
                u2 /= nn;
                // unitary rotation R = [[u1, -conj(u2)], [u2, conj(u1)]]
                const cplx r11 = u1, r12 = -std::conj(u2);
                const cplx r21 = u2, r22 = std::conj(u1);
                // G <- R^dag G R : columns p,q then rows p,q
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx grp = g[r * n + p];
                    const cplx grq = g[r * n + q];
                    g[r * n + p] = grp * r11 + grq * r21;
                    g[r * n + q] = grp * r12 + grq * r22;
                }
                for (std::size_t cidx = 0; cidx < n; ++cidx) {
                    const cplx gpc = g[p * n + cidx];
                    const cplx gqc = g[q * n + cidx];
                    g[p * n + cidx] = std::conj(r11) * gpc + std::conj(r21) * gqc;
                    g[q * n + cidx] = std::conj(r12) * gpc + std::conj(r22) * gqc;
                }
                // X <- X R
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx xrp = x[r * n + p];
                    const cplx xrq = x[r * n + q];
                    x[r * n + p] = xrp * r11 + xrq * r21;
                    x[r * n + q] = xrp * r12 + xrq * r22;
                }
            }
        }
    }
    if (off_norm() > off_target)
        throw ConvergenceFailure("eig_unitary: degeneracy resolution did not converge");
}

}  // namespace detail

// Eigendecomposition of a unitary matrix. Strategy: diagonalize the Hermitian
// part (U + U^dag)/2; inside its eigenvalue clusters diagonalize the projected
// anti-Hermitian part (U - U^dag)/(2i), which commutes with it since U is
// normal; finish with 2x2 normal-matrix polish rotations on X^dag U X.
// Requires ||U^dag U - I||_F <= 1e-10.
inline UnitaryEig eig_unitary(const ComplexMatrix& u) {
    const std::size_t n = u.dim();
    if (n == 0) throw DimensionMismatch("eig_unitary: empty matrix");
    if (unitarity_deviation(u) > 1e-10)
        throw NotUnitary("eig_unitary: input is not unitary");

    // Hermitian part, eigenvalues cos(theta_n)
    std::vector<cplx> hp(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) hp[i * n + j] = 0.5 * (u(i, j) + std::conj(u(j, i)));
    double fro_hp = 0.0;
    for (const auto& e : hp) fro_hp += std::norm(e);
    fro_hp = std::sqrt(fro_hp);

    std::vector<cplx> x(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) x[i * n + i] = 1.0;
    {
        std::vector<cplx> a = hp;
        detail::jacobi_hermitian_inplace(a, x, n, 1e-13 * std::max(fro_hp, 1e-300));
        // ascending order of cos(theta) keeps clustering a contiguous scan
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return a[i * n + i].real() < a[j * n + j].real(); });
        std::vector<cplx> xs(n * n);
        std::vector<double> cvals(n);
        for (std::size_t k = 0; k < n; ++k) {
            cvals[k] = a[order[k] * n + order[k]].real();
            for (std::size_t r = 0; r < n; ++r) xs[r * n + k] = x[r * n + order[k]];
        }
        x.swap(xs);

        // resolve sign of sin(theta) within cos clusters via the projected
        // anti-Hermitian part
        const double range = cvals.empty() ? 0.0 : cvals.back() - cvals.front();
        const double ctol = 1e-8 * std::max(range, 1e-300);
        std::size_t lo = 0;
        while (lo < n) {
            std::size_t hi = lo + 1;
            while (hi < n && cvals[hi] - cvals[hi - 1] <= ctol) ++hi;
            const std::size_t m = hi - lo;
            if (m > 1) {
                // B = Xc^dag Hm Xc with Hm = (U - U^dag)/(2i)
                std::vector<cplx> hmxc(n * m, cplx(0.0));
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const cplx hm = (u(i, j) - std::conj(u(j, i))) / cplx(0.0, 2.0);
                        for (std::size_t k = 0; k < m; ++k) hmxc[i * m + k] += hm * x[j * n + (lo + k)];
                    }
                std::vector<cplx> b(m * m, cplx(0.0));
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < m; ++l) {
                        cplx s = 0.0;
                        for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i * n + (lo + k)]) * hmxc[i * m + l];
                        b[k * m + l] = s;
                    }
                std::vector<cplx> y(m * m, cplx(0.0));
                for (std::size_t k = 0; k < m; ++k) y[k * m + k] = 1.0;
                double fro_b = 0.0;
                for (const auto& e : b) fro_b += std::norm(e);
                fro_b = std::sqrt(fro_b);
                detail::jacobi_hermitian_inplace(b, y, m, 1e-13 * std::max(fro_b, 1e-300));
                // rotate the cluster columns: Xc <- Xc Y
                std::vector<cplx> tmp(m);
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t k = 0; k < m; ++k) {
                        cplx s = 0.0;
                        for (std::size_t l = 0; l < m; ++l) s += x[r * n + (lo + l)] * y[l * m + k];
                        tmp[k] = s;
                    }
                    for (std::size_t k = 0; k < m; ++k) x[r * n + (lo + k)] = tmp[k];
                }
            }
            lo = hi;
        }
    }

    // G = X^dag U X, then polish
    std::vector<cplx> ux(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx uik = u(i, k);
            if (uik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) ux[i * n + j] += uik * x[k * n + j];
        }
    std::vector<cplx> g(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx xci = std::conj(x[k * n + i]);
            for (std::size_t j = 0; j < n; ++j) g[i * n + j] += xci * ux[k * n + j];
        }
    detail::normal_polish(g, x, n, 1e-14 * std::sqrt(static_cast<double>(n)));

    UnitaryEig out;
    out.eigenphases.resize(n);
    out.residuals.resize(n);
    std::vector<double> theta(n);
    for (std::size_t k = 0; k < n; ++k) {
        double t = std::arg(g[k * n + k]);
        if (t < 0.0) t += kTwoPi;
        if (t >= kTwoPi) t = 0.0;
        theta[k] = t;
    }
    // residual_k = ||G e_k - e^{i theta_k} e_k|| since X is unitary to roundoff
    std::vector<double> resid(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            s += std::norm(g[j * n + k]);
        }
        s += std::norm(g[k * n + k] - std::polar(1.0, theta[k]));
        resid[k] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return theta[i] < theta[j]; });
    out.eigenvectors.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t c = order[k];
        out.eigenphases[k] = theta[c];
        out.residuals[k] = resid[c];
        ComplexVector xv(n);
        for (std::size_t r = 0; r < n; ++r) xv[r] = x[r * n + c];
        detail::gauge_fix(xv);
        out.eigenvectors.push_back(std::move(xv));
    }
    return out;
}

// e^{-i h t} through the spectral decomposition of the Hermitian matrix h.
inline ComplexMatrix expm_unitary_from_hermitian(const ComplexMatrix& h, double t) {
    const auto eig = eig_hermitian(h);
    const std::size_t n = h.dim();
    ComplexMatrix u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx phase = std::polar(1.0, -eig.eigenvalues[k] * t);
        const ComplexVector& xk = eig.eigenvectors[k];
        for (std::size_t i = 0; i < n; ++i) {
            const cplx pi = phase * xk[i];
            for (std::size_t j = 0; j < n; ++j) u(i, j) += pi * std::conj(xk[j]);
        }
    }
    return u;
}

}  // namespace anholonomy
