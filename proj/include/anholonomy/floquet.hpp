// Kicked-system model: H0 plus a periodically pulsed rank-1 kick |v><v| of
// strength lambda, and the resulting one-parameter family of Floquet
// operators U_lambda = e^{-i H0 T} e^{-i lambda |v><v|} with quasienergy
// extraction and assumption validation.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "anholonomy/numlin.hpp"

namespace anholonomy {

class FloquetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSystem : public FloquetError {
public:
    using FloquetError::FloquetError;
};

// Raised when the nondegeneracy / kick-overlap assumptions are required but
// do not hold (tracking and transport preconditions).
class AssumptionViolation : public FloquetError {
public:
    using FloquetError::FloquetError;
};

// Map a value onto the half-open interval [origin, origin + width).
inline double wrap_into(double value, double origin, double width) {
    double r = std::fmod(value - origin, width);
    if (r < 0.0) r += width;
    if (r >= width) r = 0.0;
    return origin + r;
}

// Circular distance between two values on a circle of circumference width.
inline double circular_distance(double a, double b, double width) {
    double d = std::fmod(std::abs(a - b), width);
    return std::min(d, width - d);
}

// Quasienergy of a Floquet eigenvalue z = e^{i theta}: E = i ln(z) / T, real
// by unitarity and reported in the branch [origin, origin + 2pi/T).
inline double quasienergy_from_eigenphase(double theta, double period_T, double origin) {
    return wrap_into(-theta / period_T, origin, kTwoPi / period_T);
}

struct KickedSystem {
    ComplexMatrix h0;           // Hermitian
    ComplexVector kick_vector;  // normalized |v>
    double period_T = 0.0;
    ComplexMatrix u0;           // e^{-i H0 T}
    UnitaryEig u0_eig;          // spectrum of U0, eigenphases ascending

    std::size_t dim() const { return h0.dim(); }
};

inline KickedSystem make_kicked_system(ComplexMatrix h0, ComplexVector v, double period_T) {
    if (h0.dim() == 0 || h0.dim() != v.dim()) throw InvalidSystem("kicked system: dimension mismatch");
    if (!(period_T > 0.0) || !std::isfinite(period_T)) throw InvalidSystem("kicked system: period must be positive");
    for (std::size_t i = 0; i < v.dim(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
            throw InvalidSystem("kicked system: non-finite kick vector entry");
    for (std::size_t i = 0; i < h0.dim(); ++i)
        for (std::size_t j = 0; j < h0.dim(); ++j)
            if (!std::isfinite(h0(i, j).real()) || !std::isfinite(h0(i, j).imag()))
                throw InvalidSystem("kicked system: non-finite H0 entry");
    if (std::abs(norm2(v) - 1.0) > 1e-12) throw InvalidSystem("kicked system: kick vector must be normalized");
    if (hermiticity_deviation(h0) > 1e-12 * frobenius_norm(h0))
        throw InvalidSystem("kicked system: H0 must be Hermitian");

    KickedSystem sys;
    sys.h0 = std::move(h0);
    sys.kick_vector = std::move(v);
    sys.period_T = period_T;
    sys.u0 = expm_unitary_from_hermitian(sys.h0, period_T);
    sys.u0_eig = eig_unitary(sys.u0);
    return sys;
}

inline KickedSystem kicked_system_from_diagonal(const std::vector<double>& levels, ComplexVector v,
                                                double period_T) {
    ComplexMatrix h0(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) h0(i, i) = levels[i];
    return make_kicked_system(std::move(h0), std::move(v), period_T);
}

// U_lambda = U0 (I - (1 - e^{-i lambda}) |v><v|); exactly 2pi-periodic in
// lambda since |v><v| is a projector.
inline ComplexMatrix build_floquet(const KickedSystem& sys, double lambda) {
    const cplx alpha = cplx(1.0) - std::polar(1.0, -lambda);
    const ComplexVector u0v = sys.u0 * sys.kick_vector;
    ComplexMatrix u = sys.u0;
    const std::size_t n = sys.dim();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ai = alpha * u0v[i];
        for (std::size_t j = 0; j < n; ++j) u(i, j) -= ai * std::conj(sys.kick_vector[j]);
    }
    return u;
}

// psi -> U_lambda psi without forming the matrix.
inline ComplexVector apply_floquet(const KickedSystem& sys, double lambda, const ComplexVector& psi) {
    const cplx alpha = (cplx(1.0) - std::polar(1.0, -lambda)) * inner(sys.kick_vector, psi);
    ComplexVector shifted = psi;
    for (std::size_t i = 0; i < psi.dim(); ++i) shifted[i] -= alpha * sys.kick_vector[i];
    return sys.u0 * shifted;
}

struct QuasiEnergySpectrum {
    std::vector<double> quasienergies;  // ascending within the branch
    double branch_origin = 0.0;
    std::vector<ComplexVector> eigenvectors;
};

// Default branch start: the lowest quasienergy of U0 when phases are reduced
// to [0, 2pi/T).
inline double default_branch_origin(const KickedSystem& sys) {
    double e0 = kTwoPi / sys.period_T;
    for (const double theta : sys.u0_eig.eigenphases)
        e0 = std::min(e0, quasienergy_from_eigenphase(theta, sys.period_T, 0.0));
    return e0;
}

inline QuasiEnergySpectrum quasienergies(const KickedSystem& sys, double lambda, double branch_origin) {
    const UnitaryEig eig = eig_unitary(build_floquet(sys, lambda));
    const std::size_t n = sys.dim();
    std::vector<std::pair<double, std::size_t>> es(n);
    for (std::size_t k = 0; k < n; ++k)
        es[k] = {quasienergy_from_eigenphase(eig.eigenphases[k], sys.period_T, branch_origin), k};
    std::stable_sort(es.begin(), es.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    QuasiEnergySpectrum out;
    out.branch_origin = branch_origin;
    out.quasienergies.reserve(n);
    out.eigenvectors.reserve(n);
    for (const auto& [e, k] : es) {
        out.quasienergies.push_back(e);
        out.eigenvectors.push_back(eig.eigenvectors[k]);
    }
    return out;
}

inline QuasiEnergySpectrum quasienergies(const KickedSystem& sys, double lambda) {
    return quasienergies(sys, lambda, default_branch_origin(sys));
}

struct AssumptionReport {
    bool u0_nondegenerate = false;   // (i): spectrum of U0 nondegenerate
    double min_eigenphase_gap = 0.0; // smallest circular gap of U0 eigenphases, radians
    bool v_not_eigenvector = false;  // (ii): no eigenvector of U0 is an eigenvector of |v><v|
    double min_overlap = 0.0;        // min_n |<v|xi_n(0)>|
    double max_overlap = 0.0;
};

inline AssumptionReport validate_assumptions(const KickedSystem& sys) {
    AssumptionReport rep;
    const auto& phases = sys.u0_eig.eigenphases;  // ascending in [0, 2pi)
    const std::size_t n = phases.size();
    double min_gap = kTwoPi;
    if (n > 1) {
        for (std::size_t k = 0; k + 1 < n; ++k) min_gap = std::min(min_gap, phases[k + 1] - phases[k]);
        min_gap = std::min(min_gap, phases.front() + kTwoPi - phases.back());
    }
    rep.min_eigenphase_gap = min_gap;
    rep.u0_nondegenerate = min_gap > 1e-8;

    double lo = 1.0, hi = 0.0;
    for (const auto& x : sys.u0_eig.eigenvectors) {
        const double ov = std::abs(inner(sys.kick_vector, x));
        lo = std::min(lo, ov);
        hi = std::max(hi, ov);
    }
    rep.min_overlap = lo;
    rep.max_overlap = hi;
    rep.v_not_eigenvector = lo > 1e-8 && hi < 1.0 - 1e-8;
    return rep;
}

// --- two-level closed-form reference ---------------------------------------
// H0 = (pi/2) sigma_z, T = 1, |v> = (|up> - i |down>)/sqrt(2): the
// quasienergies are (lambda +- pi)/2 and the eigenvectors rotate at angle
// lambda/4 in the real (up, down) plane. Basis: index 0 = |up>, 1 = |down>.

struct TwoLevelReference {
    std::array<double, 2> quasienergies;        // ascending: {(lambda-pi)/2, (lambda+pi)/2}
    std::array<ComplexVector, 2> eigenvectors;  // matching order
};

inline TwoLevelReference two_level_reference(double lambda) {
    if (lambda < 0.0 || lambda > kTwoPi) throw std::out_of_range("two_level_reference: lambda outside [0, 2pi]");
    TwoLevelReference ref;
    ref.quasienergies = {(lambda - kPi) / 2.0, (lambda + kPi) / 2.0};
    const double c = std::cos(lambda / 4.0), s = std::sin(lambda / 4.0);
    ComplexVector minus(2), plus(2);
    minus[0] = -s;  // pairs with (lambda - pi)/2
    minus[1] = c;
    plus[0] = c;    // pairs with (lambda + pi)/2
    plus[1] = s;
    ref.eigenvectors = {std::move(minus), std::move(plus)};
    return ref;
}

inline KickedSystem two_level_lines_system() {
    ComplexVector v(2);
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = cplx(0.0, -1.0) / std::sqrt(2.0);
    return kicked_system_from_diagonal({kPi / 2.0, -kPi / 2.0}, std::move(v), 1.0);
}

inline KickedSystem two_level_avoided_system() {
    ComplexVector v(2);
    v[0] = std::cos(kPi / 8.0);
    v[1] = std::sin(kPi / 8.0);
    return kicked_system_from_diagonal({kPi / 2.0, -kPi / 2.0}, std::move(v), 1.0);
}

}  // namespace anholonomy
