// Seeded random matrices and kicked systems for property tests and benches.
// Sampling is hand-rolled on top of mt19937_64 so a given seed reproduces the
// same stream on any platform.
#pragma once

#include <cstdint>
#include <random>

#include "anholonomy/floquet.hpp"
#include "anholonomy/numlin.hpp"

namespace anholonomy {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t integer(std::uint64_t n) { return gen_() % n; }  // small n only

    // standard normal via Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    cplx complex_normal() { return {normal(), normal()}; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline ComplexMatrix ginibre(std::size_t n, Rng& rng) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    const ComplexMatrix g = ginibre(n, rng);
    ComplexMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    return h;
}

// Haar-ish random unitary: QR of a Ginibre sample by modified Gram-Schmidt,
// run twice for orthogonality at working precision.
inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
    ComplexMatrix g = ginibre(n, rng);
    auto mgs_pass = [n](ComplexMatrix& q) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, j)) * q(i, k);
                for (std::size_t i = 0; i < n; ++i) q(i, k) -= proj * q(i, j);
            }
            double nk = 0.0;
            for (std::size_t i = 0; i < n; ++i) nk += std::norm(q(i, k));
            nk = std::sqrt(nk);
            for (std::size_t i = 0; i < n; ++i) q(i, k) /= nk;
        }
    };
    mgs_pass(g);
    mgs_pass(g);
    return g;
}

inline ComplexVector random_unit_vector(std::size_t n, Rng& rng) {
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.complex_normal();
    return normalized(std::move(v));
}

struct RandomSystemOptions {
    double period_T = 1.0;
    double min_level_gap = 0.1;   // minimum circular gap of H0 levels mod 2pi/T
    double min_weight2 = 0.01;    // bounds on |v_k|^2 against the H0 eigenbasis,
    double max_weight2 = 0.90;    // keeping the kick-overlap assumption comfortable
};

// Diagonal-H0 kicked system with a dense random kick vector. Levels are drawn
// uniformly in one quasienergy period and resampled until the circular gaps
// and kick weights meet the requested margins.
inline KickedSystem random_kicked_system(std::size_t n, Rng& rng, const RandomSystemOptions& opt = {}) {
    const double width = kTwoPi / opt.period_T;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<double> levels(n);
        for (auto& e : levels) e = rng.uniform(0.0, width);
        std::sort(levels.begin(), levels.end());
        double gap = width;
        for (std::size_t k = 0; k + 1 < n; ++k) gap = std::min(gap, levels[k + 1] - levels[k]);
        if (n > 1) gap = std::min(gap, levels.front() + width - levels.back());
        if (gap < opt.min_level_gap) continue;
        ComplexVector v = random_unit_vector(n, rng);
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            const double w2 = std::norm(v[k]);
            if (w2 < opt.min_weight2 || w2 > opt.max_weight2) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        return kicked_system_from_diagonal(levels, std::move(v), opt.period_T);
    }
    throw std::runtime_error("random_kicked_system: rejection sampling failed");
}

}  // namespace anholonomy
