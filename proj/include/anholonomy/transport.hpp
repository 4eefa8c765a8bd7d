// Discrete adiabatic transport: apply U_{lambda_m} for slowly incremented
// lambda_m = 2pi s(m/M) over M steps so the state follows an instantaneous
// Floquet eigenvector, landing in the anholonomically shifted eigenspace
// after each full cycle.
#pragma once

#include <optional>

#include "anholonomy/floquet.hpp"

namespace anholonomy {

enum class Schedule { linear, smoothstep };

inline double schedule_value(Schedule s, double x) {
    return s == Schedule::linear ? x : x * x * (3.0 - 2.0 * x);
}

inline Schedule schedule_from_name(const std::string& name) {
    if (name == "linear") return Schedule::linear;
    if (name == "smoothstep") return Schedule::smoothstep;
    throw std::invalid_argument("unknown schedule: " + name);
}

inline const char* schedule_name(Schedule s) { return s == Schedule::linear ? "linear" : "smoothstep"; }

struct TransportPlan {
    std::size_t steps_m = 4096;
    Schedule schedule = Schedule::linear;
    std::size_t initial_branch = 0;
    std::size_t cycles = 1;
    std::optional<double> branch_origin;  // branch indexing convention; default E0(0)
    bool skip_assumption_check = false;
};

struct TransportResult {
    ComplexVector final_state;
    double fidelity_target = 0.0;              // vs the branch shifted by `cycles`
    double fidelity_initial = 0.0;             // vs the starting eigenvector
    std::vector<double> per_cycle_fidelities;  // after cycle c: fidelity vs branch (n + c) mod N
};

// One cycle of the discrete product U_{lambda_{M-1}} ... U_{lambda_0}.
// M = 0 is the empty product.
inline ComplexVector transport_cycle(const KickedSystem& sys, ComplexVector psi, std::size_t steps_m,
                                     Schedule sched) {
    for (std::size_t m = 0; m < steps_m; ++m) {
        const double s = schedule_value(sched, static_cast<double>(m) / static_cast<double>(steps_m));
        psi = apply_floquet(sys, kTwoPi * s, psi);
    }
    return psi;
}

// Eigenvectors of U0 ordered by quasienergy ascending within the branch.
inline std::vector<ComplexVector> branch_ordered_eigenvectors(const KickedSystem& sys,
                                                              std::optional<double> branch_origin = std::nullopt) {
    const double origin = branch_origin.value_or(default_branch_origin(sys));
    const std::size_t n = sys.dim();
    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t k = 0; k < n; ++k)
        order[k] = {quasienergy_from_eigenphase(sys.u0_eig.eigenphases[k], sys.period_T, origin), k};
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ComplexVector> vecs;
    vecs.reserve(n);
    for (const auto& [e, k] : order) vecs.push_back(sys.u0_eig.eigenvectors[k]);
    return vecs;
}

inline TransportResult run_transport(const KickedSystem& sys, const TransportPlan& plan) {
    const std::size_t n = sys.dim();
    if (plan.initial_branch >= n) throw std::out_of_range("run_transport: invalid initial branch");
    if (plan.cycles < 1) throw std::invalid_argument("run_transport: cycles must be positive");
    if (!plan.skip_assumption_check) {
        const AssumptionReport rep = validate_assumptions(sys);
        if (!rep.u0_nondegenerate)
            throw AssumptionViolation("run_transport: assumption (i) fails, the spectrum of U0 is degenerate");
        if (!rep.v_not_eigenvector)
            throw AssumptionViolation("run_transport: assumption (ii) fails, kick overlaps hit 0 or 1");
    }
    const auto vecs = branch_ordered_eigenvectors(sys, plan.branch_origin);
    const std::size_t start = plan.initial_branch;

    TransportResult out;
    ComplexVector psi = vecs[start];
    out.per_cycle_fidelities.reserve(plan.cycles);
    for (std::size_t c = 1; c <= plan.cycles; ++c) {
        psi = transport_cycle(sys, std::move(psi), plan.steps_m, plan.schedule);
        out.per_cycle_fidelities.push_back(fidelity(vecs[(start + c) % n], psi));
    }
    out.fidelity_target = fidelity(vecs[(start + plan.cycles) % n], psi);
    out.fidelity_initial = fidelity(vecs[start], psi);
    out.final_state = std::move(psi);
    return out;
}

// infidelity 1 - fidelity_target for each step count, returned in input order.
inline std::vector<std::pair<std::size_t, double>> convergence_scan(const KickedSystem& sys,
                                                                    const TransportPlan& plan_base,
                                                                    const std::vector<std::size_t>& m_values) {
    for (std::size_t i = 1; i < m_values.size(); ++i)
        if (m_values[i] <= m_values[i - 1]) throw std::invalid_argument("convergence_scan: m_values must ascend");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(m_values.size());
    for (const std::size_t m : m_values) {
        TransportPlan plan = plan_base;
        plan.steps_m = m;
        out.emplace_back(m, 1.0 - run_transport(sys, plan).fidelity_target);
    }
    return out;
}

}  // namespace anholonomy
