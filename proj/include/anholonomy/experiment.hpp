// Experiment orchestration: the JSON config schema shared by every CLI
// subcommand, CSV emission, JSON summaries, and the ANHOLONOMY_LOG logger.
// One config file drives any subcommand; unused sections are ignored.
// Complex numbers are serialized as [re, im] pairs throughout.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "anholonomy/flow.hpp"
#include "anholonomy/satqc.hpp"
#include "anholonomy/transport.hpp"

namespace anholonomy {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- logging ----------------------------------------------------------------

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ANHOLONOMY_LOG");
        if (env == nullptr) return LogLevel::error;
        const std::string s(env);
        if (s == "debug") return LogLevel::debug;
        if (s == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

inline void log_line(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) <= static_cast<int>(log_level())) {
        const char* tag = level == LogLevel::error ? "error" : (level == LogLevel::info ? "info" : "debug");
        std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
    }
}

inline void log_error(const std::string& msg) { log_line(LogLevel::error, msg); }
inline void log_info(const std::string& msg) { log_line(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_line(LogLevel::debug, msg); }

// --- formatting -------------------------------------------------------------

// Shortest-round-trip decimal form: CSV cells stay bit-reproducible.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json vector_to_json(const ComplexVector& v) {
    json arr = json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) arr.push_back(complex_to_json(v[i]));
    return arr;
}

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexVector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of [re, im] pairs");
    ComplexVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
    return v;
}

// --- configuration ----------------------------------------------------------

struct SystemConfig {
    std::optional<std::vector<double>> h0_diagonal;
    std::optional<ComplexMatrix> h0_matrix;
    ComplexVector v;
    double period_T = 1.0;
};

struct FlowSectionConfig {
    std::size_t grid_points = 512;
    bool adaptive = true;
    double min_step = kTwoPi * 1e-6;
    double overlap_threshold = 0.7;
    std::optional<double> branch_origin;
    bool force = false;
};

struct TransportSectionConfig {
    std::size_t steps_m = 4096;
    Schedule schedule = Schedule::linear;
    std::size_t initial_branch = 0;
    std::size_t cycles = 1;
    std::optional<double> branch_origin;
    bool skip_assumption_check = false;
};

struct AqcSectionConfig {
    std::string cnf_path;
    double beta = 1.0;
    double epsilon = 0.5;
    double t_factor = 0.9;
    VStrategy v_strategy = VStrategy::oracle;
    std::optional<ComplexVector> custom_v;
    std::optional<ComplexVector> base_state;
    std::size_t steps_m = 20000;
    std::size_t gap_grid_points = 129;
    bool gap_study = false;
    std::size_t gap_study_m_cap = 1u << 22;
};

struct OutputConfig {
    std::optional<std::string> csv;
    std::optional<std::string> json_path;
};

struct ExperimentConfig {
    std::optional<SystemConfig> system;
    FlowSectionConfig flow;
    TransportSectionConfig transport;
    std::optional<AqcSectionConfig> aqc;
    OutputConfig output;
    std::uint64_t seed = 0;  // only consumed by random-system helpers, never by physics paths
};

namespace detail {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig cfg;
    if (j.contains("system")) {
        const json& js = j.at("system");
        SystemConfig sys;
        if (js.contains("h0_diagonal")) sys.h0_diagonal = js.at("h0_diagonal").get<std::vector<double>>();
        if (js.contains("h0_matrix")) {
            const json& jm = js.at("h0_matrix");
            if (!jm.is_array() || jm.empty()) throw ConfigError("config: h0_matrix must be a non-empty array");
            ComplexMatrix m(jm.size());
            for (std::size_t i = 0; i < jm.size(); ++i) {
                if (!jm[i].is_array() || jm[i].size() != jm.size())
                    throw ConfigError("config: h0_matrix must be square");
                for (std::size_t k = 0; k < jm.size(); ++k) m(i, k) = complex_from_json(jm[i][k]);
            }
            sys.h0_matrix = std::move(m);
        }
        if (sys.h0_diagonal && sys.h0_matrix)
            throw ConfigError("config: give h0_diagonal or h0_matrix, not both");
        if (!sys.h0_diagonal && !sys.h0_matrix)
            throw ConfigError("config: system needs h0_diagonal or h0_matrix");
        if (!js.contains("v")) throw ConfigError("config: system needs the kick vector v");
        sys.v = vector_from_json(js.at("v"));
        detail::read_field(js, "period_T", sys.period_T);
        if (js.contains("dim")) {
            const std::size_t dim = js.at("dim").get<std::size_t>();
            const std::size_t actual = sys.h0_diagonal ? sys.h0_diagonal->size() : sys.h0_matrix->dim();
            if (dim != actual) throw ConfigError("config: dim does not match H0");
        }
        cfg.system = std::move(sys);
    }
    if (j.contains("flow")) {
        const json& jf = j.at("flow");
        detail::read_field(jf, "grid_points", cfg.flow.grid_points);
        detail::read_field(jf, "adaptive", cfg.flow.adaptive);
        detail::read_field(jf, "min_step", cfg.flow.min_step);
        detail::read_field(jf, "overlap_threshold", cfg.flow.overlap_threshold);
        detail::read_field(jf, "force", cfg.flow.force);
        if (jf.contains("branch_origin")) cfg.flow.branch_origin = jf.at("branch_origin").get<double>();
    }
    if (j.contains("transport")) {
        const json& jt = j.at("transport");
        detail::read_field(jt, "steps_M", cfg.transport.steps_m);
        detail::read_field(jt, "initial_branch", cfg.transport.initial_branch);
        detail::read_field(jt, "cycles", cfg.transport.cycles);
        detail::read_field(jt, "skip_assumption_check", cfg.transport.skip_assumption_check);
        if (jt.contains("schedule")) cfg.transport.schedule = schedule_from_name(jt.at("schedule").get<std::string>());
        if (jt.contains("branch_origin")) cfg.transport.branch_origin = jt.at("branch_origin").get<double>();
    }
    if (j.contains("aqc")) {
        const json& ja = j.at("aqc");
        AqcSectionConfig aqc;
        if (!ja.contains("cnf_path")) throw ConfigError("config: aqc needs cnf_path");
        aqc.cnf_path = ja.at("cnf_path").get<std::string>();
        detail::read_field(ja, "beta", aqc.beta);
        detail::read_field(ja, "epsilon", aqc.epsilon);
        detail::read_field(ja, "t_factor", aqc.t_factor);
        detail::read_field(ja, "steps_M", aqc.steps_m);
        detail::read_field(ja, "gap_grid_points", aqc.gap_grid_points);
        detail::read_field(ja, "gap_study", aqc.gap_study);
        detail::read_field(ja, "gap_study_m_cap", aqc.gap_study_m_cap);
        if (ja.contains("v_strategy")) aqc.v_strategy = v_strategy_from_name(ja.at("v_strategy").get<std::string>());
        if (ja.contains("custom_v")) aqc.custom_v = vector_from_json(ja.at("custom_v"));
        if (ja.contains("base_state")) aqc.base_state = vector_from_json(ja.at("base_state"));
        cfg.aqc = std::move(aqc);
    }
    if (j.contains("output")) {
        const json& jo = j.at("output");
        if (jo.contains("csv")) cfg.output.csv = jo.at("csv").get<std::string>();
        if (jo.contains("json")) cfg.output.json_path = jo.at("json").get<std::string>();
    }
    detail::read_field(j, "seed", cfg.seed);
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return parse_experiment_config(j);
}

// The kick vector from a config is normalized on load; everything else is
// validated by the system constructor.
inline KickedSystem make_system(const SystemConfig& cfg) {
    ComplexVector v = cfg.v;
    if (norm2(v) == 0.0) throw ConfigError("config: kick vector is zero");
    v = normalized(std::move(v));
    try {
        if (cfg.h0_diagonal) return kicked_system_from_diagonal(*cfg.h0_diagonal, std::move(v), cfg.period_T);
        return make_kicked_system(*cfg.h0_matrix, std::move(v), cfg.period_T);
    } catch (const InvalidSystem& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// --- CSV --------------------------------------------------------------------

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// One row per (grid point, branch), lambda ascending within each branch.
inline std::string flow_to_csv(const SpectralFlow& flow) {
    std::ostringstream out;
    out << "lambda,branch,E_unwrapped,E_branch,overlap_v,min_gap\n";
    for (std::size_t b = 0; b < flow.branches.size(); ++b) {
        const auto profile = gap_profile(flow, b);
        for (std::size_t i = 0; i < flow.branches[b].size(); ++i) {
            const FlowSample& s = flow.branches[b][i];
            out << format_double(s.lambda) << ',' << b << ',' << format_double(s.e_unwrapped) << ','
                << format_double(s.e_branch) << ',' << format_double(s.overlap_v) << ','
                << format_double(profile[i].second) << '\n';
        }
    }
    return out.str();
}

struct TransportTraceRow {
    std::size_t step = 0;
    double lambda = 0.0;
    double fidelity_to_instantaneous = 0.0;
    double fidelity_to_target = 0.0;
};

struct TransportTrace {
    std::vector<TransportTraceRow> rows;
    TransportResult result;
};

// Stepwise transport with per-step diagnostics. Each step diagonalizes
// U_lambda to find the instantaneous eigenvector the state is following, so
// this costs one eigendecomposition per step; the plain run_transport path
// does not.
inline TransportTrace run_transport_with_trace(const KickedSystem& sys, const TransportPlan& plan) {
    const std::size_t n = sys.dim();
    if (plan.initial_branch >= n) throw std::out_of_range("transport trace: invalid initial branch");
    if (!plan.skip_assumption_check) {
        const AssumptionReport rep = validate_assumptions(sys);
        if (!rep.u0_nondegenerate)
            throw AssumptionViolation("transport: assumption (i) fails, the spectrum of U0 is degenerate");
        if (!rep.v_not_eigenvector)
            throw AssumptionViolation("transport: assumption (ii) fails, kick overlaps hit 0 or 1");
    }
    const auto vecs = branch_ordered_eigenvectors(sys, plan.branch_origin);
    const std::size_t start = plan.initial_branch;

    TransportTrace trace;
    TransportResult res;
    ComplexVector psi = vecs[start];
    std::size_t global_step = 0;
    for (std::size_t c = 1; c <= plan.cycles; ++c) {
        const ComplexVector& cycle_target = vecs[(start + c) % n];
        for (std::size_t m = 0; m < plan.steps_m; ++m) {
            const double s = schedule_value(plan.schedule, static_cast<double>(m) / static_cast<double>(plan.steps_m));
            const double lam = kTwoPi * s;
            psi = apply_floquet(sys, lam, psi);
            const UnitaryEig eig = eig_unitary(build_floquet(sys, lam));
            double best = 0.0;
            for (const auto& x : eig.eigenvectors) best = std::max(best, fidelity(x, psi));
            trace.rows.push_back({global_step++, lam, best, fidelity(cycle_target, psi)});
        }
        res.per_cycle_fidelities.push_back(fidelity(cycle_target, psi));
    }
    res.fidelity_target = fidelity(vecs[(start + plan.cycles) % n], psi);
    res.fidelity_initial = fidelity(vecs[start], psi);
    res.final_state = std::move(psi);
    trace.result = std::move(res);
    return trace;
}

inline std::string transport_trace_to_csv(const TransportTrace& trace) {
    std::ostringstream out;
    out << "step,lambda,fidelity_to_instantaneous,fidelity_to_target\n";
    for (const auto& r : trace.rows)
        out << r.step << ',' << format_double(r.lambda) << ',' << format_double(r.fidelity_to_instantaneous)
            << ',' << format_double(r.fidelity_to_target) << '\n';
    return out.str();
}

// --- JSON summaries ----------------------------------------------------------

inline json holonomy_summary_json(const HolonomyResult& hol, double period_T) {
    double sum = 0.0;
    for (const double de : hol.delta_e) sum += de;
    json j;
    j["permutation"] = hol.permutation;
    j["delta_E"] = hol.delta_e;
    j["cyclic"] = hol.cyclic;
    j["nu"] = hol.nu;
    j["sum_rule_residual"] = sum - kTwoPi / period_T;
    return j;
}

inline json transport_summary_json(const TransportResult& res) {
    json j;
    j["fidelity_target"] = res.fidelity_target;
    j["fidelity_initial"] = res.fidelity_initial;
    j["per_cycle_fidelities"] = res.per_cycle_fidelities;
    return j;
}

inline json assumption_report_json(const AssumptionReport& rep) {
    json j;
    j["u0_nondegenerate"] = rep.u0_nondegenerate;
    j["min_eigenphase_gap"] = rep.min_eigenphase_gap;
    j["v_not_eigenvector"] = rep.v_not_eigenvector;
    j["min_overlap"] = rep.min_overlap;
    j["max_overlap"] = rep.max_overlap;
    return j;
}

inline json instance_to_json(const SatInstance& inst) {
    json clauses = json::array();
    for (const auto& clause : inst.clauses) {
        json c = json::array();
        for (const auto& lit : clause) c.push_back(lit.negated ? -lit.var : lit.var);
        clauses.push_back(c);
    }
    json j;
    j["num_vars"] = inst.num_vars;
    j["clauses"] = clauses;
    return j;
}

inline json aqc_document_json(const AqcSetup& setup, std::size_t steps_m, const AqcRunResult& result) {
    json j;
    json s;
    s["instance"] = instance_to_json(setup.instance);
    s["beta"] = setup.beta;
    s["epsilon"] = setup.epsilon;
    s["period_T"] = setup.period_T;
    s["v_strategy"] = v_strategy_name(setup.v_strategy);
    s["base_state"] = vector_to_json(setup.base_state);
    if (setup.v_strategy == VStrategy::custom) s["custom_v"] = vector_to_json(setup.custom_v);
    s["steps_M"] = steps_m;
    j["setup"] = s;
    json r;
    r["success_probability"] = result.success_probability;
    r["control_F_probability"] = result.control_f_probability;
    r["min_gap_seen"] = result.min_gap_seen;
    if (result.solution_found)
        r["solution_found"] = *result.solution_found;
    else
        r["solution_found"] = nullptr;
    r["verified"] = result.verified;
    r["gap_collapse_warning"] = result.gap_collapse_warning;
    j["result"] = r;
    return j;
}

inline json gap_study_json(const std::vector<GapStudyRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        json r;
        r["strategy"] = row.strategy;
        r["min_gap"] = row.min_gap;
        r["M_to_0.99"] = row.m_to_99;
        r["reached"] = row.reached;
        arr.push_back(r);
    }
    return arr;
}

// --- files ------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw ConfigError("cannot write " + path);
    out << content;
}

// Data-only plot export: a small script stub next to the CSV.
inline std::string plot_stub_for_flow_csv(const std::string& csv_name) {
    std::ostringstream out;
    out << "#!/usr/bin/env python3\n"
        << "# Plot the branch-reduced quasienergy flow from " << csv_name << "\n"
        << "import csv\n"
        << "from collections import defaultdict\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "branches = defaultdict(lambda: ([], []))\n"
        << "with open(" << json(csv_name).dump() << ") as f:\n"
        << "    for row in csv.DictReader(f):\n"
        << "        xs, ys = branches[int(row['branch'])]\n"
        << "        xs.append(float(row['lambda']))\n"
        << "        ys.append(float(row['E_branch']))\n"
        << "for b, (xs, ys) in sorted(branches.items()):\n"
        << "    plt.plot(xs, ys, '.', ms=2, label=f'branch {b}')\n"
        << "plt.xlabel('lambda')\n"
        << "plt.ylabel('quasienergy (branch-reduced)')\n"
        << "plt.legend()\n"
        << "plt.show()\n";
    return out.str();
}

}  // namespace anholonomy
