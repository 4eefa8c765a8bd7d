// Anholonomic adiabatic quantum computation on small 3-SAT instances:
// DIMACS ingestion, the clause-violation cost Hamiltonian, the composite
// unperturbed Hamiltonian with a control qubit, kick vector strategies, and
// the end-to-end transported run.
//
// Composite index convention: basis state |n> (x) |c> sits at index 2n + c
// with control I = 0, F = 1; bit i of n encodes variable i+1.
#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>

#include "anholonomy/flow.hpp"
#include "anholonomy/transport.hpp"

namespace anholonomy {

class SatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CnfParseError : public SatError {
public:
    using SatError::SatError;
};

class NoSolution : public SatError {
public:
    using SatError::SatError;
};

class MultipleSolutions : public SatError {
public:
    using SatError::SatError;
};

class ZeroTargetOverlap : public SatError {
public:
    using SatError::SatError;
};

inline constexpr int kMaxSatVars = 12;  // desk-scale cap

struct Literal {
    int var = 0;         // 1-based variable index
    bool negated = false;
};

struct SatInstance {
    int num_vars = 0;
    std::vector<std::array<Literal, 3>> clauses;
};

inline bool literal_true(const Literal& lit, std::uint32_t assignment) {
    const bool bit = (assignment >> (lit.var - 1)) & 1u;
    return bit != lit.negated;
}

inline bool clause_satisfied(const std::array<Literal, 3>& clause, std::uint32_t assignment) {
    return literal_true(clause[0], assignment) || literal_true(clause[1], assignment) ||
           literal_true(clause[2], assignment);
}

inline int count_violated(const SatInstance& inst, std::uint32_t assignment) {
    int c = 0;
    for (const auto& clause : inst.clauses)
        if (!clause_satisfied(clause, assignment)) ++c;
    return c;
}

inline std::vector<std::uint32_t> brute_force_solutions(const SatInstance& inst) {
    std::vector<std::uint32_t> out;
    const std::uint32_t total = 1u << inst.num_vars;
    for (std::uint32_t n = 0; n < total; ++n)
        if (count_violated(inst, n) == 0) out.push_back(n);
    return out;
}

// DIMACS CNF, all clauses of width exactly 3. Comment lines start with 'c'.
inline SatInstance parse_cnf(std::istream& in) {
    SatInstance inst;
    bool header_seen = false;
    int declared_clauses = 0;
    std::vector<Literal> pending;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c" || first[0] == 'c' || first[0] == '%') continue;
        if (first == "p") {
            std::string fmt;
            if (!(ls >> fmt >> inst.num_vars >> declared_clauses) || fmt != "cnf")
                throw CnfParseError("cnf: malformed problem header");
            if (inst.num_vars < 1 || inst.num_vars > kMaxSatVars)
                throw CnfParseError("cnf: variable count out of supported range 1.." +
                                    std::to_string(kMaxSatVars));
            header_seen = true;
            continue;
        }
        if (!header_seen) throw CnfParseError("cnf: clause before problem header");
        ls.clear();
        ls.str(line);
        long lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                if (pending.size() != 3)
                    throw CnfParseError("cnf: clause of width " + std::to_string(pending.size()) +
                                        ", only width-3 clauses are supported");
                inst.clauses.push_back({pending[0], pending[1], pending[2]});
                pending.clear();
                continue;
            }
            const long var = std::labs(lit);
            if (var < 1 || var > inst.num_vars) throw CnfParseError("cnf: literal out of range");
            pending.push_back({static_cast<int>(var), lit < 0});
        }
    }
    if (!header_seen) throw CnfParseError("cnf: missing problem header");
    if (!pending.empty()) throw CnfParseError("cnf: dangling clause without terminating 0");
    return inst;
}

inline SatInstance parse_cnf(const std::string& text) {
    std::istringstream in(text);
    return parse_cnf(in);
}

inline std::string emit_cnf(const SatInstance& inst) {
    std::ostringstream out;
    out << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
    for (const auto& clause : inst.clauses) {
        for (const auto& lit : clause) out << (lit.negated ? -lit.var : lit.var) << ' ';
        out << "0\n";
    }
    return out.str();
}

// Diagonal cost Hamiltonian: entry n counts the clauses violated by
// assignment n.
inline ComplexMatrix cost_hamiltonian(const SatInstance& inst) {
    const std::size_t dim = std::size_t{1} << inst.num_vars;
    ComplexMatrix hp(dim);
    for (std::uint32_t n = 0; n < dim; ++n) hp(n, n) = static_cast<double>(count_violated(inst, n));
    return hp;
}

enum class VStrategy { oracle, uniform, custom };

inline VStrategy v_strategy_from_name(const std::string& name) {
    if (name == "oracle") return VStrategy::oracle;
    if (name == "uniform") return VStrategy::uniform;
    if (name == "custom") return VStrategy::custom;
    throw std::invalid_argument("unknown v strategy: " + name);
}

inline const char* v_strategy_name(VStrategy s) {
    switch (s) {
        case VStrategy::oracle: return "oracle";
        case VStrategy::uniform: return "uniform";
        default: return "custom";
    }
}

struct AqcSetup {
    SatInstance instance;
    double beta = 1.0;
    double epsilon = 0.5;
    double period_T = 0.0;        // must satisfy T < 2pi / W
    VStrategy v_strategy = VStrategy::oracle;
    ComplexVector custom_v;       // only for VStrategy::custom
    ComplexVector base_state;     // |0_B>, ground state of H_B

    std::size_t arith_dim() const { return std::size_t{1} << instance.num_vars; }
    std::size_t composite_dim() const { return arith_dim() * 2; }
};

// Spectral spread of the composite Hamiltonian, available without
// diagonalization: eigenvalues are {-eps, beta - eps} in the I sector and the
// clause-violation counts in the F sector.
inline double composite_spread(const SatInstance& inst, double beta, double epsilon) {
    int vmax = 0;
    const std::uint32_t total = 1u << inst.num_vars;
    for (std::uint32_t n = 0; n < total; ++n) vmax = std::max(vmax, count_violated(inst, n));
    const double top = std::max(static_cast<double>(vmax), beta - epsilon);
    return top + epsilon;
}

inline AqcSetup make_aqc_setup(SatInstance instance, double beta = 1.0, double epsilon = 0.5,
                               double t_factor = 0.9, VStrategy strategy = VStrategy::oracle,
                               ComplexVector custom_v = {}, ComplexVector base_state = {}) {
    if (!(epsilon > 0.0 && epsilon < beta))
        throw SatError("aqc setup: need 0 < epsilon < beta");
    if (!(t_factor > 0.0 && t_factor < 1.0))
        throw SatError("aqc setup: kick-period factor must lie in (0, 1)");
    if (instance.num_vars < 1 || instance.num_vars > kMaxSatVars)
        throw SatError("aqc setup: unsupported variable count");
    AqcSetup setup;
    setup.instance = std::move(instance);
    setup.beta = beta;
    setup.epsilon = epsilon;
    setup.v_strategy = strategy;
    setup.custom_v = std::move(custom_v);
    const std::size_t na = setup.arith_dim();
    if (base_state.dim() == 0) {
        ComplexVector b0(na);
        const double amp = 1.0 / std::sqrt(static_cast<double>(na));
        for (std::size_t i = 0; i < na; ++i) b0[i] = amp;
        setup.base_state = std::move(b0);
    } else {
        if (base_state.dim() != na) throw SatError("aqc setup: base state dimension mismatch");
        if (std::abs(norm2(base_state) - 1.0) > 1e-12) throw SatError("aqc setup: base state must be normalized");
        setup.base_state = std::move(base_state);
    }
    setup.period_T = t_factor * kTwoPi / composite_spread(setup.instance, beta, epsilon);
    return setup;
}

struct CompositeH0 {
    ComplexMatrix h0;          // dimension 2^{N+1}
    double spread_w = 0.0;     // max - min eigenvalue
    std::uint32_t answer = 0;  // the unique satisfying assignment
    double ground_energy = 0.0;         // -epsilon at |0_B>|I>
    double first_excited_energy = 0.0;  // 0 at |Ans>|F>
    bool target_level_coincidence = false;  // some other level sits exactly on a target energy
};

// H0 = (H_B - eps) (x) |I><I| + H_P (x) |F><F| with
// H_B = beta (1 - |0_B><0_B|). Requires a unique satisfying assignment.
inline CompositeH0 composite_h0(const AqcSetup& setup) {
    const auto solutions = brute_force_solutions(setup.instance);
    if (solutions.empty()) throw NoSolution("composite H0: instance has no satisfying assignment");
    if (solutions.size() > 1)
        throw MultipleSolutions("composite H0: instance has " + std::to_string(solutions.size()) +
                                " satisfying assignments, need exactly one");
    CompositeH0 out;
    out.answer = solutions.front();
    const std::size_t na = setup.arith_dim();
    const std::size_t d = setup.composite_dim();
    out.h0 = ComplexMatrix(d);
    // I sector (even indices): beta(1 - |0_B><0_B|) - eps
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            cplx e = -setup.beta * setup.base_state[i] * std::conj(setup.base_state[j]);
            if (i == j) e += setup.beta - setup.epsilon;
            out.h0(2 * i, 2 * j) = e;
        }
    }
    // F sector (odd indices): diagonal clause-violation counts
    std::vector<double> hp(na);
    for (std::uint32_t n = 0; n < na; ++n) {
        hp[n] = static_cast<double>(count_violated(setup.instance, n));
        out.h0(2 * n + 1, 2 * n + 1) = hp[n];
    }
    out.ground_energy = -setup.epsilon;
    out.first_excited_energy = 0.0;

    double vmax = 0.0;
    for (const double e : hp) vmax = std::max(vmax, e);
    out.spread_w = std::max(vmax, setup.beta - setup.epsilon) + setup.epsilon;

    // level ordering: nothing may sit strictly between the two targets, and a
    // level coinciding with a target would defeat the tracked-branch gap
    int on_ground = 0, on_target = 0;
    for (const double e : hp) {
        if (e > -setup.epsilon && e < 0.0) throw SatError("composite H0: level inside the target corridor");
        if (e == -setup.epsilon) ++on_ground;
        if (e == 0.0) ++on_target;
    }
    const double ib = setup.beta - setup.epsilon;  // I-sector excited level
    if (ib > -setup.epsilon && ib < 0.0) throw SatError("composite H0: level inside the target corridor");
    out.target_level_coincidence = on_ground > 0 || on_target > 1 || ib == 0.0 || ib == -setup.epsilon;

    if (!(setup.period_T > 0.0 && setup.period_T < kTwoPi / out.spread_w))
        throw SatError("composite H0: kick period violates T < 2pi/W");
    return out;
}

inline ComplexVector composite_ground_state(const AqcSetup& setup) {
    ComplexVector psi(setup.composite_dim());
    for (std::size_t i = 0; i < setup.arith_dim(); ++i) psi[2 * i] = setup.base_state[i];
    return psi;
}

inline ComplexVector composite_answer_state(const AqcSetup& setup, std::uint32_t answer) {
    ComplexVector t(setup.composite_dim());
    t[2 * static_cast<std::size_t>(answer) + 1] = 1.0;
    return t;
}

// Kick vector for the requested strategy. Must overlap both target states.
inline ComplexVector build_v(const AqcSetup& setup, std::optional<std::uint32_t> answer) {
    const std::size_t d = setup.composite_dim();
    ComplexVector v(d);
    switch (setup.v_strategy) {
        case VStrategy::oracle: {
            if (!answer) throw SatError("build_v: oracle strategy needs the answer state");
            const double rsqrt2 = 1.0 / std::sqrt(2.0);
            for (std::size_t i = 0; i < setup.arith_dim(); ++i) v[2 * i] = setup.base_state[i] * rsqrt2;
            v[2 * static_cast<std::size_t>(*answer) + 1] += rsqrt2;
            break;
        }
        case VStrategy::uniform: {
            const double amp = 1.0 / std::sqrt(static_cast<double>(d));
            for (std::size_t i = 0; i < d; ++i) v[i] = amp;
            break;
        }
        case VStrategy::custom: {
            if (setup.custom_v.dim() != d) throw SatError("build_v: custom vector dimension mismatch");
            v = setup.custom_v;
            if (std::abs(norm2(v) - 1.0) > 1e-12) throw SatError("build_v: custom vector must be normalized");
            break;
        }
    }
    const double ov_ground = std::abs(inner(composite_ground_state(setup), v));
    const double ov_answer =
        answer ? std::abs(inner(composite_answer_state(setup, *answer), v)) : 1.0;
    if (ov_ground <= 1e-12 || ov_answer <= 1e-12)
        throw ZeroTargetOverlap("build_v: kick vector has (near-)zero overlap with a target state");
    return v;
}

struct AqcRunResult {
    double success_probability = 0.0;   // |<Ans,F|psi_M>|^2
    double control_f_probability = 0.0;
    double min_gap_seen = 0.0;          // energy units, tracked branch vs rest
    std::optional<std::uint32_t> solution_found;
    bool verified = false;              // solution_found satisfies every clause
    bool gap_collapse_warning = false;  // min_gap_seen < 1e-6
};

// End-to-end run: prepare |0_B>|I>, adiabatically increase the kick strength
// through one full cycle in steps_m steps, read out the F sector.
inline AqcRunResult run_aqc(const AqcSetup& setup, std::size_t steps_m, std::size_t gap_grid_points = 129) {
    const CompositeH0 comp = composite_h0(setup);
    const ComplexVector v = build_v(setup, comp.answer);
    const KickedSystem sys = make_kicked_system(comp.h0, v, setup.period_T);

    const ComplexVector start = composite_ground_state(setup);
    AqcRunResult out;
    if (gap_grid_points >= 2) {
        const BranchTrace trace = track_branch(sys, FlowGrid::uniform(gap_grid_points), start);
        double g = kTwoPi / setup.period_T;
        for (const double x : trace.min_gap) g = std::min(g, x);
        out.min_gap_seen = g;
        out.gap_collapse_warning = g < 1e-6;
    }

    const ComplexVector psi = transport_cycle(sys, start, steps_m, Schedule::linear);
    out.success_probability = fidelity(composite_answer_state(setup, comp.answer), psi);
    double pf = 0.0;
    for (std::size_t n = 0; n < setup.arith_dim(); ++n) pf += std::norm(psi[2 * n + 1]);
    out.control_f_probability = pf;
    if (pf > 0.5) {
        std::uint32_t best = 0;
        double best_p = -1.0;
        for (std::uint32_t n = 0; n < setup.arith_dim(); ++n) {
            const double p = std::norm(psi[2 * n + 1]);
            if (p > best_p) {
                best_p = p;
                best = n;
            }
        }
        if (count_violated(setup.instance, best) == 0) {
            out.solution_found = best;
            out.verified = true;
        }
    }
    return out;
}

struct VCandidate {
    std::string name;
    VStrategy strategy = VStrategy::oracle;
    ComplexVector custom;
};

struct GapStudyRow {
    std::string strategy;
    double min_gap = 0.0;
    std::size_t m_to_99 = 0;  // smallest doubling step count reaching success >= 0.99
    bool reached = false;
};

// One candidate: tracked-branch gap over the cycle plus the empirically
// smallest M (doubling search) achieving success >= 0.99.
inline GapStudyRow gap_study_one(const AqcSetup& base, const CompositeH0& comp, const VCandidate& cand,
                                 std::size_t m_start = 64, std::size_t m_cap = (1u << 22),
                                 std::size_t gap_grid_points = 257) {
    AqcSetup setup = base;
    setup.v_strategy = cand.strategy;
    setup.custom_v = cand.custom;
    const ComplexVector v = build_v(setup, comp.answer);
    const KickedSystem sys = make_kicked_system(comp.h0, v, setup.period_T);
    const ComplexVector start = composite_ground_state(setup);
    const ComplexVector answer = composite_answer_state(setup, comp.answer);

    GapStudyRow row;
    row.strategy = cand.name;
    const BranchTrace trace = track_branch(sys, FlowGrid::uniform(gap_grid_points), start);
    double g = kTwoPi / setup.period_T;
    for (const double x : trace.min_gap) g = std::min(g, x);
    row.min_gap = g;

    for (std::size_t m = m_start; m <= m_cap; m *= 2) {
        const ComplexVector psi = transport_cycle(sys, start, m, Schedule::linear);
        if (fidelity(answer, psi) >= 0.99) {
            row.m_to_99 = m;
            row.reached = true;
            break;
        }
    }
    return row;
}

inline std::vector<GapStudyRow> gap_study(const AqcSetup& base, const std::vector<VCandidate>& candidates,
                                          std::size_t m_start = 64, std::size_t m_cap = (1u << 22),
                                          std::size_t gap_grid_points = 257) {
    const CompositeH0 comp = composite_h0(base);
    std::vector<GapStudyRow> rows;
    rows.reserve(candidates.size());
    for (const VCandidate& cand : candidates)
        rows.push_back(gap_study_one(base, comp, cand, m_start, m_cap, gap_grid_points));
    return rows;
}

}  // namespace anholonomy
