// Command-line front end: flow, transport, aqc, validate, demo-two-level.
// One JSON config drives any subcommand; unused sections are ignored.
// Exit codes: 0 success, 1 config error, 2 numerical/tracking failure,
// 3 instance precondition, 4 assumption violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "anholonomy/experiment.hpp"

namespace fs = std::filesystem;
using namespace anholonomy;

namespace {

// The two bundled two-level demo configs, byte-identical to the files under
// configs/. The first has the parallel quasienergy lines, the second an
// avoided crossing.
constexpr const char* kLinesConfigJson = R"({
  "system": {
    "dim": 2,
    "h0_diagonal": [1.5707963267948966, -1.5707963267948966],
    "v": [[0.7071067811865476, 0.0], [0.0, -0.7071067811865476]],
    "period_T": 1.0
  },
  "flow": {
    "grid_points": 1001,
    "adaptive": true,
    "overlap_threshold": 0.7,
    "branch_origin": -1.5707963267948966
  },
  "transport": {
    "steps_M": 4096,
    "schedule": "linear",
    "initial_branch": 0,
    "cycles": 1,
    "branch_origin": -1.5707963267948966
  },
  "output": {
    "csv": "fig1_lines.csv"
  },
  "seed": 0
}
)";

constexpr const char* kAvoidedConfigJson = R"({
  "system": {
    "dim": 2,
    "h0_diagonal": [1.5707963267948966, -1.5707963267948966],
    "v": [[0.9238795325112867, 0.0], [0.3826834323650898, 0.0]],
    "period_T": 1.0
  },
  "flow": {
    "grid_points": 1001,
    "adaptive": true,
    "overlap_threshold": 0.7,
    "branch_origin": -1.5707963267948966
  },
  "transport": {
    "steps_M": 4096,
    "schedule": "linear",
    "initial_branch": 0,
    "cycles": 1,
    "branch_origin": -1.5707963267948966
  },
  "output": {
    "csv": "fig1_avoided.csv"
  },
  "seed": 0
}
)";

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::size_t steps = 0;
    bool steps_set = false;
    double branch_origin = 0.0;
    bool branch_origin_set = false;
    std::size_t jobs = 1;
};

FlowGrid grid_from_config(const FlowSectionConfig& cfg) {
    FlowGrid grid = FlowGrid::uniform(cfg.grid_points, cfg.adaptive);
    grid.min_step = cfg.min_step;
    grid.overlap_threshold = cfg.overlap_threshold;
    return grid;
}

int cmd_flow(const CliOptions& opt) {
    const ExperimentConfig cfg = load_experiment_config(opt.config_path);
    if (!cfg.system) throw ConfigError("flow: config has no system section");
    const KickedSystem sys = make_system(*cfg.system);
    std::optional<double> origin = cfg.flow.branch_origin;
    if (opt.branch_origin_set) origin = opt.branch_origin;

    log_info("tracking " + std::to_string(cfg.flow.grid_points) + " grid points");
    const SpectralFlow flow = track_flow(sys, grid_from_config(cfg.flow), origin, cfg.flow.force);
    const HolonomyResult hol = holonomy(flow);

    std::optional<std::string> csv_path = cfg.output.csv;
    if (!opt.out_path.empty()) csv_path = opt.out_path;
    if (csv_path) {
        write_text_file(*csv_path, flow_to_csv(flow));
        write_text_file(*csv_path + ".plot.py", plot_stub_for_flow_csv(fs::path(*csv_path).filename().string()));
        log_info("wrote " + *csv_path);
    }
    std::cout << holonomy_summary_json(hol, sys.period_T).dump(2) << '\n';
    return 0;
}

int cmd_transport(const CliOptions& opt) {
    const ExperimentConfig cfg = load_experiment_config(opt.config_path);
    if (!cfg.system) throw ConfigError("transport: config has no system section");
    const KickedSystem sys = make_system(*cfg.system);

    TransportPlan plan;
    plan.steps_m = opt.steps_set ? opt.steps : cfg.transport.steps_m;
    plan.schedule = cfg.transport.schedule;
    plan.initial_branch = cfg.transport.initial_branch;
    plan.cycles = cfg.transport.cycles;
    plan.branch_origin = cfg.transport.branch_origin;
    if (opt.branch_origin_set) plan.branch_origin = opt.branch_origin;
    plan.skip_assumption_check = cfg.transport.skip_assumption_check;

    const TransportTrace trace = run_transport_with_trace(sys, plan);
    std::optional<std::string> csv_path = cfg.output.csv;
    if (!opt.out_path.empty()) csv_path = opt.out_path;
    if (csv_path) {
        write_text_file(*csv_path, transport_trace_to_csv(trace));
        log_info("wrote " + *csv_path);
    }
    std::cout << transport_summary_json(trace.result).dump(2) << '\n';
    return 0;
}

int cmd_aqc(const CliOptions& opt) {
    const ExperimentConfig cfg = load_experiment_config(opt.config_path);
    if (!cfg.aqc) throw ConfigError("aqc: config has no aqc section");
    const AqcSectionConfig& acfg = *cfg.aqc;

    fs::path cnf = acfg.cnf_path;
    if (cnf.is_relative()) cnf = fs::path(opt.config_path).parent_path() / cnf;
    std::ifstream in(cnf);
    if (!in.good()) throw ConfigError("aqc: cannot open CNF file " + cnf.string());
    const SatInstance inst = parse_cnf(in);

    const AqcSetup setup =
        make_aqc_setup(inst, acfg.beta, acfg.epsilon, acfg.t_factor, acfg.v_strategy,
                       acfg.custom_v.value_or(ComplexVector{}), acfg.base_state.value_or(ComplexVector{}));
    const std::size_t steps = opt.steps_set ? opt.steps : acfg.steps_m;
    log_info("running " + std::to_string(inst.num_vars) + "-variable instance, " + std::to_string(steps) +
             " steps");
    const AqcRunResult result = run_aqc(setup, steps, acfg.gap_grid_points);
    json doc = aqc_document_json(setup, steps, result);

    if (acfg.gap_study) {
        std::vector<VCandidate> candidates = {{"oracle", VStrategy::oracle, {}},
                                              {"uniform", VStrategy::uniform, {}}};
        if (acfg.custom_v) candidates.push_back({"custom", VStrategy::custom, *acfg.custom_v});
        const CompositeH0 comp = composite_h0(setup);
        std::vector<GapStudyRow> rows(candidates.size());
        if (opt.jobs > 1) {
            std::vector<std::future<GapStudyRow>> futures;
            futures.reserve(candidates.size());
            for (const auto& cand : candidates)
                futures.push_back(std::async(std::launch::async, [&setup, &comp, cand, &acfg] {
                    return gap_study_one(setup, comp, cand, 64, acfg.gap_study_m_cap);
                }));
            for (std::size_t i = 0; i < futures.size(); ++i) rows[i] = futures[i].get();
        } else {
            for (std::size_t i = 0; i < candidates.size(); ++i)
                rows[i] = gap_study_one(setup, comp, candidates[i], 64, acfg.gap_study_m_cap);
        }
        doc["gap_study"] = gap_study_json(rows);
    }

    std::optional<std::string> json_path = cfg.output.json_path;
    if (!opt.out_path.empty()) json_path = opt.out_path;
    const std::string text = doc.dump(2) + "\n";
    if (json_path) {
        write_text_file(*json_path, text);
        log_info("wrote " + *json_path);
    }
    std::cout << text;
    return 0;
}

int cmd_validate(const CliOptions& opt) {
    const ExperimentConfig cfg = load_experiment_config(opt.config_path);
    if (!cfg.system) throw ConfigError("validate: config has no system section");
    const KickedSystem sys = make_system(*cfg.system);
    const AssumptionReport rep = validate_assumptions(sys);
    std::cout << assumption_report_json(rep).dump(2) << '\n';
    return (rep.u0_nondegenerate && rep.v_not_eigenvector) ? 0 : 4;
}

int cmd_demo(const std::string& out_dir) {
    fs::create_directories(out_dir);
    json summaries;
    const std::pair<const char*, const char*> demos[] = {{"fig1_lines", kLinesConfigJson},
                                                         {"fig1_avoided", kAvoidedConfigJson}};
    for (const auto& [name, text] : demos) {
        const fs::path config_path = fs::path(out_dir) / (std::string(name) + ".json");
        write_text_file(config_path.string(), text);
        const ExperimentConfig cfg = load_experiment_config(config_path.string());
        const KickedSystem sys = make_system(*cfg.system);
        const SpectralFlow flow = track_flow(sys, grid_from_config(cfg.flow), cfg.flow.branch_origin);
        const HolonomyResult hol = holonomy(flow);
        const fs::path csv_path = fs::path(out_dir) / *cfg.output.csv;
        write_text_file(csv_path.string(), flow_to_csv(flow));
        write_text_file(csv_path.string() + ".plot.py", plot_stub_for_flow_csv(csv_path.filename().string()));
        summaries[name] = holonomy_summary_json(hol, sys.period_T);
    }
    std::cout << summaries.dump(2) << '\n';
    return 0;
}

int dispatch(const std::string& name, const CliOptions& opt, const std::string& demo_dir) {
    try {
        if (name == "flow") return cmd_flow(opt);
        if (name == "transport") return cmd_transport(opt);
        if (name == "aqc") return cmd_aqc(opt);
        if (name == "validate") return cmd_validate(opt);
        return cmd_demo(demo_dir);
    } catch (const ZeroTargetOverlap& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NoSolution& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const MultipleSolutions& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CnfParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const InvalidSystem& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const FloquetError& e) {
        // tracking failures and assumption violations surfaced mid-run
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumlinError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasienergy spectral flow and anholonomic transport for rank-1 kicked maps"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string demo_dir = ".";

    auto add_common = [&](CLI::App* cmd, bool with_steps, bool with_origin, bool with_jobs) {
        cmd->add_option("--config", opt.config_path, "JSON experiment config")->required();
        cmd->add_option("--out", opt.out_path, "output path override");
        if (with_steps)
            cmd->add_option("--steps", opt.steps, "override the step count M")
                ->each([&](const std::string&) { opt.steps_set = true; });
        if (with_origin)
            cmd->add_option("--branch-origin", opt.branch_origin, "quasienergy branch origin")
                ->each([&](const std::string&) { opt.branch_origin_set = true; });
        if (with_jobs)
            cmd->add_option("--jobs", opt.jobs, "parallel workers for the gap study")
                ->check(CLI::PositiveNumber);
    };

    add_common(app.add_subcommand("flow", "track the quasienergy spectral flow over one cycle, write CSV"),
               false, true, false);
    add_common(app.add_subcommand("transport", "discrete adiabatic transport with per-step fidelities"), true,
               true, false);
    add_common(app.add_subcommand("aqc", "anholonomic adiabatic computation on a 3-SAT instance"), true, false,
               true);
    add_common(app.add_subcommand("validate", "check the nondegeneracy and kick-overlap assumptions"), false,
               false, false);
    app.add_subcommand("demo-two-level", "emit the two bundled two-level configs and run flow on both")
        ->add_option("--out", demo_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    return dispatch(app.get_subcommands().front()->get_name(), opt, demo_dir);
}
