// Continuous tracking of quasienergy branches over a cycle of the kick
// strength: eigenvector-overlap matching with adaptive step bisection,
// unwrapped phases, the holonomy permutation with its quantized increments,
// and the derivative / gap diagnostics.
#pragma once

#include <map>
#include <optional>

#include "anholonomy/floquet.hpp"

namespace anholonomy {

class FlowError : public FloquetError {
public:
    using FloquetError::FloquetError;
};

// Best matched eigenvector overlap fell below threshold at the minimal step.
class AmbiguousMatching : public FlowError {
public:
    using FlowError::FlowError;
};

// A tracked eigenphase collided with another one (circular gap < 1e-10 rad).
class DegenerateBranch : public FlowError {
public:
    using FlowError::FlowError;
};

struct FlowGrid {
    std::vector<double> lambdas;  // requested points, ascending, 0 .. 2pi
    bool adaptive = true;
    double min_step = kTwoPi * 1e-6;
    double overlap_threshold = 0.7;

    static FlowGrid uniform(std::size_t points, bool adaptive = true) {
        if (points < 2) throw FlowError("flow grid: need at least two points");
        FlowGrid g;
        g.adaptive = adaptive;
        g.lambdas.resize(points);
        for (std::size_t i = 0; i < points; ++i)
            g.lambdas[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(points - 1);
        g.lambdas.back() = kTwoPi;
        return g;
    }

    // {0}: a null cycle, accepted for the trivial-holonomy edge case.
    bool null_cycle() const { return lambdas.size() == 1; }

    void validate() const {
        if (lambdas.empty()) throw FlowError("flow grid: empty");
        if (lambdas.front() != 0.0) throw FlowError("flow grid: must start at 0");
        if (null_cycle()) return;
        for (std::size_t i = 1; i < lambdas.size(); ++i)
            if (!(lambdas[i] > lambdas[i - 1])) throw FlowError("flow grid: not strictly ascending");
        if (lambdas.back() != kTwoPi) throw FlowError("flow grid: must end at 2pi");
        if (!(min_step > 0.0)) throw FlowError("flow grid: min_step must be positive");
        if (!(overlap_threshold > 0.0 && overlap_threshold < 1.0))
            throw FlowError("flow grid: overlap_threshold must be in (0,1)");
    }
};

struct FlowSample {
    double lambda = 0.0;
    double e_unwrapped = 0.0;
    double e_branch = 0.0;        // reduced to [origin, origin + 2pi/T)
    ComplexVector eigenvector;
    double overlap_v = 0.0;       // |<v|xi>|^2
};

struct SpectralFlow {
    FlowGrid grid;                // as requested (accepted points may be finer)
    double period_T = 0.0;
    double branch_origin = 0.0;
    std::vector<std::vector<FlowSample>> branches;  // branches[n][i]; all branches share lambdas
};

struct HolonomyResult {
    std::vector<std::size_t> permutation;  // branch n arrives at branch permutation[n]
    std::vector<double> delta_e;           // unwrapped increment per branch over the cycle
    int nu = 0;                            // uniform shift when the permutation is cyclic
    bool cyclic = false;                   // false flags a non-cyclic permutation (assumption violation)
};

namespace detail {

struct TrackState {
    double lambda = 0.0;
    std::vector<double> e_unwrapped;  // per tracked branch
    std::vector<ComplexVector> vectors;
};

inline double min_circular_gap(const std::vector<double>& phases) {
    if (phases.size() < 2) return kTwoPi;
    double g = phases.front() + kTwoPi - phases.back();
    for (std::size_t k = 0; k + 1 < phases.size(); ++k) g = std::min(g, phases[k + 1] - phases[k]);
    return g;
}

// Greedy assignment on the overlap matrix O[j][k] = |<cur_j|probe_k>|^2 by
// descending overlap; exact whenever the step is fine enough that O is
// diagonally dominant. Returns matched probe index per branch and the worst
// matched overlap.
inline std::pair<std::vector<std::size_t>, double> greedy_match(const std::vector<ComplexVector>& cur,
                                                                const std::vector<ComplexVector>& probe) {
    const std::size_t n = cur.size();
    struct Entry {
        double overlap;
        std::size_t j, k;
    };
    std::vector<Entry> entries;
    entries.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) entries.push_back({fidelity(cur[j], probe[k]), j, k});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    std::vector<std::size_t> match(n, n);
    std::vector<bool> used(n, false);
    double worst = 1.0;
    std::size_t assigned = 0;
    for (const Entry& e : entries) {
        if (match[e.j] != n || used[e.k]) continue;
        match[e.j] = e.k;
        used[e.k] = true;
        worst = std::min(worst, e.overlap);
        if (++assigned == n) break;
    }
    return {std::move(match), worst};
}

}  // namespace detail

// Track all quasienergy branches of U_lambda over the grid. Consecutive
// points are matched by maximal eigenvector overlap; the unwrapped phase per
// branch picks the representative nearest the previous value and any step
// implying |dE| > (2pi/T)/4 is rejected. In adaptive mode a rejected step is
// bisected down to min_step. The final point at lambda = 2pi reuses the
// lambda = 0 eigenvectors (U is exactly periodic), so the endpoint
// identification is free of re-diagonalization noise.
inline SpectralFlow track_flow(const KickedSystem& sys, const FlowGrid& grid,
                               std::optional<double> branch_origin = std::nullopt, bool force = false) {
    grid.validate();
    const AssumptionReport rep = validate_assumptions(sys);
    if (!force) {
        if (!rep.u0_nondegenerate)
            throw AssumptionViolation("track_flow: assumption (i) fails, the spectrum of U0 is degenerate");
        if (!rep.v_not_eigenvector)
            throw AssumptionViolation(
                "track_flow: assumption (ii) fails, an eigenvector of U0 is an eigenvector of the kick "
                "projector (|<v|xi_n(0)>| hit 0 or 1)");
    }

    const double T = sys.period_T;
    const double width = kTwoPi / T;
    const double origin = branch_origin.value_or(default_branch_origin(sys));
    const std::size_t n = sys.dim();

    if (detail::min_circular_gap(sys.u0_eig.eigenphases) < 1e-10)
        throw DegenerateBranch("track_flow: degenerate eigenphases at lambda = 0");

    // branch order at lambda = 0: quasienergies ascending within the branch
    std::vector<std::pair<double, std::size_t>> start(n);
    for (std::size_t k = 0; k < n; ++k)
        start[k] = {quasienergy_from_eigenphase(sys.u0_eig.eigenphases[k], T, origin), k};
    std::stable_sort(start.begin(), start.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    SpectralFlow flow;
    flow.grid = grid;
    flow.period_T = T;
    flow.branch_origin = origin;
    flow.branches.resize(n);

    detail::TrackState state;
    state.lambda = 0.0;
    state.e_unwrapped.resize(n);
    state.vectors.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        state.e_unwrapped[b] = start[b].first;
        state.vectors[b] = sys.u0_eig.eigenvectors[start[b].second];
        flow.branches[b].push_back({0.0, start[b].first, start[b].first, state.vectors[b],
                                    fidelity(sys.kick_vector, state.vectors[b])});
    }
    if (grid.null_cycle()) return flow;

    // probe cache: bisection re-targets the same lambda after refining
    std::map<double, UnitaryEig> cache;
    auto probe = [&](double lam) -> const UnitaryEig& {
        if (lam == kTwoPi) return sys.u0_eig;
        auto it = cache.find(lam);
        if (it == cache.end()) it = cache.emplace(lam, eig_unitary(build_floquet(sys, lam))).first;
        return it->second;
    };

    // a step wider than pi/2 can move a phase by more than a quarter period,
    // which the unwrapping bound cannot distinguish from aliasing
    const double max_step = kPi / 2.0;

    auto try_step = [&](double target) -> bool {
        if (target - state.lambda > max_step * (1.0 + 1e-12)) return false;
        const UnitaryEig& eig = probe(target);
        if (detail::min_circular_gap(eig.eigenphases) < 1e-10)
            throw DegenerateBranch("track_flow: degenerate eigenphases at lambda = " + std::to_string(target));
        auto [match, worst] = detail::greedy_match(state.vectors, eig.eigenvectors);
        if (worst < grid.overlap_threshold) return false;
        std::vector<double> new_e(n);
        for (std::size_t b = 0; b < n; ++b) {
            const double e_raw = -eig.eigenphases[match[b]] / T;
            const double e = e_raw + width * std::round((state.e_unwrapped[b] - e_raw) / width);
            if (std::abs(e - state.e_unwrapped[b]) > width / 4.0) return false;
            new_e[b] = e;
        }
        for (std::size_t b = 0; b < n; ++b) {
            state.e_unwrapped[b] = new_e[b];
            state.vectors[b] = eig.eigenvectors[match[b]];
            flow.branches[b].push_back({target, new_e[b], wrap_into(new_e[b], origin, width), state.vectors[b],
                                        fidelity(sys.kick_vector, state.vectors[b])});
        }
        state.lambda = target;
        return true;
    };

    for (std::size_t i = 1; i < grid.lambdas.size(); ++i) {
        std::vector<double> pending{grid.lambdas[i]};
        while (!pending.empty()) {
            const double target = pending.back();
            if (try_step(target)) {
                pending.pop_back();
                continue;
            }
            const double half = 0.5 * (target - state.lambda);
            if (!grid.adaptive || half < grid.min_step)
                throw AmbiguousMatching("track_flow: cannot match branches across step ending at lambda = " +
                                        std::to_string(target));
            pending.push_back(state.lambda + half);
        }
        cache.clear();  // committed up to a requested grid point
    }
    return flow;
}

// Permutation and quantized increments induced by one cycle.
inline HolonomyResult holonomy(const SpectralFlow& flow) {
    const std::size_t n = flow.branches.size();
    HolonomyResult out;
    out.permutation.resize(n);
    out.delta_e.resize(n);
    if (flow.grid.null_cycle()) {
        for (std::size_t b = 0; b < n; ++b) out.permutation[b] = b;
        out.nu = 0;
        out.cyclic = true;
        return out;
    }
    if (flow.branches.front().back().lambda != kTwoPi)
        throw FlowError("holonomy: flow does not cover the full cycle");
    std::vector<bool> used(n, false);
    for (std::size_t b = 0; b < n; ++b) {
        const FlowSample& first = flow.branches[b].front();
        const FlowSample& last = flow.branches[b].back();
        out.delta_e[b] = last.e_unwrapped - first.e_unwrapped;
        double best = -1.0;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ov = fidelity(flow.branches[k].front().eigenvector, last.eigenvector);
            if (ov > best) {
                best = ov;
                best_k = k;
            }
        }
        out.permutation[b] = best_k;
        used[best_k] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        if (!used[k]) throw FlowError("holonomy: endpoint matching is not a bijection");
    const int nu = static_cast<int>(out.permutation[0]);
    out.cyclic = true;
    for (std::size_t b = 0; b < n; ++b)
        if (out.permutation[b] != (b + nu) % n) {
            out.cyclic = false;
            break;
        }
    out.nu = out.cyclic ? nu : -1;
    return out;
}

struct DerivativeCheckRow {
    double lambda = 0.0;
    std::size_t branch = 0;
    double lhs = 0.0;      // central finite difference of the unwrapped quasienergy
    double rhs = 0.0;      // |<v|xi(lambda)>|^2 / T
    double abs_err = 0.0;
};

inline std::vector<DerivativeCheckRow> derivative_check(const KickedSystem& sys, const SpectralFlow& flow) {
    if (flow.branches.empty() || flow.branches.front().size() < 3)
        throw FlowError("derivative_check: need at least three grid points");
    std::vector<DerivativeCheckRow> rows;
    const double T = sys.period_T;
    for (std::size_t b = 0; b < flow.branches.size(); ++b) {
        const auto& samples = flow.branches[b];
        for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
            const double hm = samples[i].lambda - samples[i - 1].lambda;
            const double hp = samples[i + 1].lambda - samples[i].lambda;
            const double lhs = (hm * hm * samples[i + 1].e_unwrapped - hp * hp * samples[i - 1].e_unwrapped -
                                (hm * hm - hp * hp) * samples[i].e_unwrapped) /
                               (hm * hp * (hm + hp));
            const double rhs = samples[i].overlap_v / T;
            rows.push_back({samples[i].lambda, b, lhs, rhs, std::abs(lhs - rhs)});
        }
    }
    return rows;
}

// Per accepted point, the minimal circular quasienergy distance from the
// given branch to any other branch.
inline std::vector<std::pair<double, double>> gap_profile(const SpectralFlow& flow, std::size_t branch) {
    if (branch >= flow.branches.size()) throw std::out_of_range("gap_profile: invalid branch index");
    const double width = kTwoPi / flow.period_T;
    const auto& ref = flow.branches[branch];
    std::vector<std::pair<double, double>> out;
    out.reserve(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        double g = width;
        for (std::size_t b = 0; b < flow.branches.size(); ++b) {
            if (b == branch) continue;
            g = std::min(g, circular_distance(ref[i].e_branch, flow.branches[b][i].e_branch, width));
        }
        out.emplace_back(ref[i].lambda, g);
    }
    return out;
}

// Single-branch continuity tracking: follows one eigenvector through the
// cycle and records its circular quasienergy gap to the rest of the spectrum.
// Unlike track_flow this tolerates degeneracies away from the tracked branch,
// which the composite systems of the quantum-computation scheme always have.
struct BranchTrace {
    std::vector<double> lambdas;
    std::vector<double> e_unwrapped;
    std::vector<double> min_gap;  // energy units
    ComplexVector final_vector;
};

inline BranchTrace track_branch(const KickedSystem& sys, const FlowGrid& grid, const ComplexVector& start) {
    grid.validate();
    const double T = sys.period_T;
    const double width = kTwoPi / T;
    const double max_step = kPi / 2.0;

    BranchTrace trace;
    ComplexVector cur = start;
    double cur_lambda = 0.0;
    double cur_e = 0.0;

    std::map<double, UnitaryEig> cache;
    auto probe = [&](double lam) -> const UnitaryEig& {
        if (lam == kTwoPi) return sys.u0_eig;
        auto it = cache.find(lam);
        if (it == cache.end()) it = cache.emplace(lam, eig_unitary(build_floquet(sys, lam))).first;
        return it->second;
    };

    auto locate = [&](const UnitaryEig& eig) {
        double best = -1.0;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < eig.eigenvectors.size(); ++k) {
            const double ov = fidelity(cur, eig.eigenvectors[k]);
            if (ov > best) {
                best = ov;
                best_k = k;
            }
        }
        return std::make_pair(best_k, best);
    };

    auto record = [&](double lam, const UnitaryEig& eig, std::size_t k) {
        double gap = width;
        for (std::size_t j = 0; j < eig.eigenphases.size(); ++j) {
            if (j == k) continue;
            gap = std::min(gap, circular_distance(eig.eigenphases[j], eig.eigenphases[k], kTwoPi) / T);
        }
        if (gap * T < 1e-10)
            throw DegenerateBranch("track_branch: tracked branch became degenerate at lambda = " +
                                   std::to_string(lam));
        trace.lambdas.push_back(lam);
        trace.e_unwrapped.push_back(cur_e);
        trace.min_gap.push_back(gap);
    };

    {
        const auto& eig0 = sys.u0_eig;
        auto [k, ov] = locate(eig0);
        if (ov < grid.overlap_threshold)
            throw FlowError("track_branch: start vector is not close to any eigenvector of U0");
        cur = eig0.eigenvectors[k];
        cur_e = quasienergy_from_eigenphase(eig0.eigenphases[k], T, 0.0);
        record(0.0, eig0, k);
    }
    if (grid.null_cycle()) {
        trace.final_vector = cur;
        return trace;
    }

    auto try_step = [&](double target) -> bool {
        if (target - cur_lambda > max_step * (1.0 + 1e-12)) return false;
        const UnitaryEig& eig = probe(target);
        auto [k, ov] = locate(eig);
        if (ov < grid.overlap_threshold) return false;
        const double e_raw = -eig.eigenphases[k] / T;
        const double e = e_raw + width * std::round((cur_e - e_raw) / width);
        if (std::abs(e - cur_e) > width / 4.0) return false;
        cur = eig.eigenvectors[k];
        cur_e = e;
        cur_lambda = target;
        record(target, eig, k);
        return true;
    };

    for (std::size_t i = 1; i < grid.lambdas.size(); ++i) {
        std::vector<double> pending{grid.lambdas[i]};
        while (!pending.empty()) {
            const double target = pending.back();
            if (try_step(target)) {
                pending.pop_back();
                continue;
            }
            const double half = 0.5 * (target - cur_lambda);
            if (!grid.adaptive || half < grid.min_step)
                throw AmbiguousMatching("track_branch: cannot follow the branch across step ending at lambda = " +
                                        std::to_string(target));
            pending.push_back(cur_lambda + half);
        }
        cache.clear();
    }
    trace.final_vector = cur;
    return trace;
}

}  // namespace anholonomy
