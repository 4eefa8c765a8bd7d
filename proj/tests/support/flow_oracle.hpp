// Dense-grid spectral-flow oracle, independent of the overlap-matching
// tracker: diagonalize pointwise, follow each branch by nearest unwrapped
// phase, count windings across the cycle.
#pragma once

#include "anholonomy/flow.hpp"

namespace anholonomy::oracle {

struct DenseFlowResult {
    std::vector<double> delta_e;
    std::vector<std::size_t> permutation;
};

inline DenseFlowResult dense_grid_flow(const KickedSystem& sys, std::size_t points) {
    const double T = sys.period_T;
    const double width = kTwoPi / T;
    const std::size_t n = sys.dim();
    std::vector<double> start_e, cur;
    {
        std::vector<double> e;
        for (const double th : sys.u0_eig.eigenphases) e.push_back(wrap_into(-th / T, 0.0, width));
        std::sort(e.begin(), e.end());
        start_e = e;
        cur = e;
    }
    for (std::size_t i = 1; i < points; ++i) {
        const double lam = kTwoPi * static_cast<double>(i) / static_cast<double>(points - 1);
        const UnitaryEig eig = (i + 1 == points) ? sys.u0_eig : eig_unitary(build_floquet(sys, lam));
        std::vector<double> reduced(n);
        for (std::size_t k = 0; k < n; ++k) reduced[k] = wrap_into(-eig.eigenphases[k] / T, 0.0, width);
        std::sort(reduced.begin(), reduced.end());
        // steps are far finer than any gap: nearest representative wins
        std::vector<double> next(n);
        for (std::size_t b = 0; b < n; ++b) {
            double best = 0.0, best_d = 1e300;
            for (std::size_t k = 0; k < n; ++k) {
                const double cand = reduced[k] + width * std::round((cur[b] - reduced[k]) / width);
                const double d = std::abs(cand - cur[b]);
                if (d < best_d) {
                    best_d = d;
                    best = cand;
                }
            }
            next[b] = best;
        }
        cur = next;
    }
    DenseFlowResult out;
    out.delta_e.resize(n);
    out.permutation.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        out.delta_e[b] = cur[b] - start_e[b];
        const double reduced = wrap_into(cur[b], 0.0, width);
        double best_d = 1e300;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = circular_distance(reduced, start_e[k], width);
            if (d < best_d) {
                best_d = d;
                best_k = k;
            }
        }
        out.permutation[b] = best_k;
    }
    return out;
}

}  // namespace anholonomy::oracle
