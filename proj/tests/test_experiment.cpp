#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "anholonomy/experiment.hpp"

using namespace anholonomy;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, const fs::path& workdir = fs::current_path()) {
    const std::string cmd =
        "cd " + workdir.string() + " && " + std::string(ANHOLONOMY_CLI_PATH) + " " + args + " 2>&1";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, got);
    const int rc = pclose(pipe);
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

fs::path config_dir() { return fs::path(ANHOLONOMY_CONFIG_DIR); }

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("anholonomy_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    SECTION("full document") {
        const json j = json::parse(slurp(config_dir() / "fig1_lines.json"));
        const ExperimentConfig cfg = parse_experiment_config(j);
        REQUIRE(cfg.system.has_value());
        CHECK(cfg.system->h0_diagonal.has_value());
        CHECK(cfg.system->period_T == 1.0);
        CHECK(cfg.flow.grid_points == 1001);
        CHECK(cfg.flow.branch_origin.has_value());
        CHECK(cfg.transport.steps_m == 4096);
        CHECK(cfg.output.csv == "fig1_lines.csv");
    }
    SECTION("kick vector is normalized on load") {
        json j;
        j["system"]["h0_diagonal"] = {0.0, 1.0};
        j["system"]["v"] = {{2.0, 0.0}, {0.0, 2.0}};
        const KickedSystem sys = make_system(*parse_experiment_config(j).system);
        CHECK(std::abs(norm2(sys.kick_vector) - 1.0) < 1e-15);
    }
    SECTION("full-matrix H0 behaves like the equivalent diagonal") {
        json jd;
        jd["system"]["h0_diagonal"] = {1.5707963267948966, -1.5707963267948966};
        jd["system"]["v"] = {{0.7071067811865476, 0.0}, {0.0, -0.7071067811865476}};
        json jm = jd;
        jm["system"].erase("h0_diagonal");
        jm["system"]["h0_matrix"] = {{{1.5707963267948966, 0.0}, {0.0, 0.0}},
                                     {{0.0, 0.0}, {-1.5707963267948966, 0.0}}};
        const KickedSystem sd = make_system(*parse_experiment_config(jd).system);
        const KickedSystem sm = make_system(*parse_experiment_config(jm).system);
        const HolonomyResult hd = holonomy(track_flow(sd, FlowGrid::uniform(65), -kPi / 2.0));
        const HolonomyResult hm = holonomy(track_flow(sm, FlowGrid::uniform(65), -kPi / 2.0));
        CHECK(hd.permutation == hm.permutation);
        for (int b = 0; b < 2; ++b) CHECK(std::abs(hd.delta_e[b] - hm.delta_e[b]) < 1e-10);
    }
    SECTION("rejects contradictory or missing fields") {
        json both;
        both["system"]["h0_diagonal"] = {0.0, 1.0};
        both["system"]["h0_matrix"] = {{{0.0, 0.0}}};
        both["system"]["v"] = {{1.0, 0.0}};
        CHECK_THROWS_AS(parse_experiment_config(both), ConfigError);

        json no_v;
        no_v["system"]["h0_diagonal"] = {0.0, 1.0};
        CHECK_THROWS_AS(parse_experiment_config(no_v), ConfigError);

        json bad_dim;
        bad_dim["system"]["h0_diagonal"] = {0.0, 1.0};
        bad_dim["system"]["v"] = {{1.0, 0.0}, {0.0, 0.0}};
        bad_dim["system"]["dim"] = 3;
        CHECK_THROWS_AS(parse_experiment_config(bad_dim), ConfigError);

        json bad_complex;
        bad_complex["system"]["h0_diagonal"] = {0.0, 1.0};
        bad_complex["system"]["v"] = {1.0, 0.0};
        CHECK_THROWS_AS(parse_experiment_config(bad_complex), ConfigError);
    }
}

TEST_CASE("flow CSV emission") {
    const KickedSystem sys = two_level_lines_system();
    const SpectralFlow flow = track_flow(sys, FlowGrid::uniform(11), -kPi / 2.0);
    const std::string csv = flow_to_csv(flow);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "lambda,branch,E_unwrapped,E_branch,overlap_v,min_gap");
    std::size_t rows = 0;
    double prev_lambda = -1.0;
    long prev_branch = -1;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 6);
        const double lambda = std::stod(cells[0]);
        const long branch = std::stol(cells[1]);
        if (branch == prev_branch) CHECK(lambda > prev_lambda);
        prev_lambda = lambda;
        prev_branch = branch;
        CHECK(std::stod(cells[4]) == Catch::Approx(0.5).margin(1e-9));   // overlap_v
        CHECK(std::stod(cells[5]) == Catch::Approx(kPi).margin(1e-9));   // min_gap
    }
    CHECK(rows == 2 * flow.branches[0].size());
}

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("cli validate") {
    SECTION("bundled two-level system passes") {
        const CliResult res = run_cli("validate --config " + (config_dir() / "fig1_lines.json").string());
        CHECK(res.exit_code == 0);
        const json j = json::parse(res.output);
        CHECK(j["u0_nondegenerate"] == true);
        CHECK(j["v_not_eigenvector"] == true);
        CHECK(j["min_overlap"].get<double>() == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    }
    SECTION("degenerate H0 exits 4") {
        const fs::path dir = fresh_dir("validate_degenerate");
        json j;
        j["system"]["h0_diagonal"] = {0.0, 0.0};
        j["system"]["v"] = {{0.7071067811865476, 0.0}, {0.7071067811865476, 0.0}};
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        CHECK(run_cli("validate --config " + (dir / "cfg.json").string()).exit_code == 4);
    }
    SECTION("basis-vector kick exits 4") {
        const fs::path dir = fresh_dir("validate_basis");
        json j;
        j["system"]["h0_diagonal"] = {1.5707963267948966, -1.5707963267948966};
        j["system"]["v"] = {{1.0, 0.0}, {0.0, 0.0}};
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        CHECK(run_cli("validate --config " + (dir / "cfg.json").string()).exit_code == 4);
    }
}

TEST_CASE("cli flow") {
    SECTION("bundled lines config reproduces the closed form") {
        const fs::path dir = fresh_dir("flow_lines");
        const CliResult res = run_cli("flow --config " + (config_dir() / "fig1_lines.json").string() +
                                      " --out " + (dir / "flow.csv").string());
        REQUIRE(res.exit_code == 0);
        const json summary = json::parse(res.output);
        CHECK(summary["permutation"] == json::array({1, 0}));
        CHECK(summary["nu"] == 1);
        CHECK(std::abs(summary["sum_rule_residual"].get<double>()) < 1e-9);

        std::ifstream in(dir / "flow.csv");
        std::string line;
        std::getline(in, line);  // header
        double max_err = 0.0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string cell;
            std::vector<double> cells;
            std::getline(ls, cell, ',');
            const double lambda = std::stod(cell);
            while (std::getline(ls, cell, ',')) cells.push_back(std::stod(cell));
            const double e_branch = cells[2];
            // the closed form, reduced to the bundled branch [-pi/2, 3pi/2)
            const double lo = wrap_into((lambda - kPi) / 2.0, -kPi / 2.0, kTwoPi);
            const double hi = wrap_into((lambda + kPi) / 2.0, -kPi / 2.0, kTwoPi);
            max_err = std::max(max_err, std::min(circular_distance(e_branch, lo, kTwoPi),
                                                 circular_distance(e_branch, hi, kTwoPi)));
        }
        CHECK(max_err < 1e-9);
        CHECK(fs::exists(dir / "flow.csv.plot.py"));
    }
    SECTION("avoided config exhibits an interior gap minimum") {
        const fs::path dir = fresh_dir("flow_avoided");
        const CliResult res = run_cli("flow --config " + (config_dir() / "fig1_avoided.json").string() +
                                      " --out " + (dir / "flow.csv").string());
        REQUIRE(res.exit_code == 0);
        std::ifstream in(dir / "flow.csv");
        std::string line;
        std::getline(in, line);
        double min_gap = 1e300, min_lambda = 0.0, first_gap = -1.0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            const double lambda = std::stod(cells[0]);
            const double gap = std::stod(cells[5]);
            if (first_gap < 0.0) first_gap = gap;
            if (gap < min_gap) {
                min_gap = gap;
                min_lambda = lambda;
            }
        }
        CHECK(min_gap < first_gap - 0.5);
        CHECK(min_lambda > 0.5);
        CHECK(min_lambda < kTwoPi - 0.5);
    }
    SECTION("kick along a basis vector fails tracking with exit 2") {
        const fs::path dir = fresh_dir("flow_basis");
        json j = json::parse(slurp(config_dir() / "fig1_lines.json"));
        j["system"]["v"] = {{1.0, 0.0}, {0.0, 0.0}};
        j.erase("output");
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        const CliResult res = run_cli("flow --config " + (dir / "cfg.json").string());
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("assumption (ii)") != std::string::npos);
    }
}

TEST_CASE("cli transport") {
    SECTION("bundled lines config reaches the swapped eigenvector") {
        const fs::path dir = fresh_dir("transport_lines");
        const CliResult res = run_cli("transport --config " + (config_dir() / "fig1_lines.json").string() +
                                      " --steps 512 --out " + (dir / "t.csv").string());
        REQUIRE(res.exit_code == 0);
        const json summary = json::parse(res.output);
        CHECK(summary["fidelity_target"].get<double>() >= 0.999);
        CHECK(summary["fidelity_initial"].get<double>() <= 1e-3);
        std::ifstream in(dir / "t.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "step,lambda,fidelity_to_instantaneous,fidelity_to_target");
        std::size_t rows = 0;
        for (std::string line; std::getline(in, line);) ++rows;
        CHECK(rows == 512);
    }
    SECTION("steps override 0 keeps the state in place") {
        const CliResult res = run_cli("transport --config " + (config_dir() / "fig1_lines.json").string() +
                                      " --steps 0 --out /dev/null");
        REQUIRE(res.exit_code == 0);
        const json summary = json::parse(res.output);
        CHECK(summary["fidelity_target"].get<double>() == 0.0);
        CHECK(summary["fidelity_initial"].get<double>() == 1.0);
    }
}

TEST_CASE("cli aqc") {
    SECTION("bundled four-variable instance verifies") {
        const fs::path dir = fresh_dir("aqc_n4");
        const CliResult res = run_cli("aqc --config " + (config_dir() / "aqc_n4.json").string() +
                                      " --steps 2048 --out " + (dir / "res.json").string());
        REQUIRE(res.exit_code == 0);
        const json doc = json::parse(slurp(dir / "res.json"));
        CHECK(doc["result"]["verified"] == true);
        CHECK(doc["result"]["success_probability"].get<double>() >= 0.99);
        CHECK(doc["setup"]["v_strategy"] == "oracle");
        CHECK(json::parse(res.output) == doc);
    }
    SECTION("unsatisfiable instance exits 3") {
        const fs::path dir = fresh_dir("aqc_unsat");
        json j = json::parse(slurp(config_dir() / "aqc_n4.json"));
        j["aqc"]["cnf_path"] = (fs::path(ANHOLONOMY_DATA_DIR) / "cnf" / "unsat3.cnf").string();
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        const CliResult res = run_cli("aqc --config " + (dir / "cfg.json").string());
        CHECK(res.exit_code == 3);
        CHECK(res.output.find("no satisfying assignment") != std::string::npos);
    }
    SECTION("multi-solution instance exits 3") {
        const fs::path dir = fresh_dir("aqc_multi");
        json j = json::parse(slurp(config_dir() / "aqc_n4.json"));
        j["aqc"]["cnf_path"] = (fs::path(ANHOLONOMY_DATA_DIR) / "cnf" / "multi3.cnf").string();
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        CHECK(run_cli("aqc --config " + (dir / "cfg.json").string()).exit_code == 3);
    }
    SECTION("custom kick with zero target overlap exits 1") {
        const fs::path dir = fresh_dir("aqc_zero_overlap");
        json j = json::parse(slurp(config_dir() / "aqc_n4.json"));
        j["aqc"]["cnf_path"] = (fs::path(ANHOLONOMY_DATA_DIR) / "cnf" / "n4_unique.cnf").string();
        j["aqc"]["v_strategy"] = "custom";
        // uniform over the I sector only: orthogonal to |Ans>|F>
        json v = json::array();
        for (int i = 0; i < 32; ++i)
            v.push_back(json::array({i % 2 == 0 ? 0.25 : 0.0, 0.0}));
        j["aqc"]["custom_v"] = v;
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        const CliResult res = run_cli("aqc --config " + (dir / "cfg.json").string());
        CHECK(res.exit_code == 1);
        CHECK(res.output.find("overlap") != std::string::npos);
    }
    SECTION("gap study through the cli") {
        const fs::path dir = fresh_dir("aqc_gapstudy");
        json j = json::parse(slurp(config_dir() / "aqc_n4.json"));
        j["aqc"]["cnf_path"] = (fs::path(ANHOLONOMY_DATA_DIR) / "cnf" / "n4_unique.cnf").string();
        j["aqc"]["gap_study"] = true;
        j["aqc"]["gap_grid_points"] = 33;
        write_text_file((dir / "cfg.json").string(), j.dump(2));
        const CliResult res = run_cli("aqc --config " + (dir / "cfg.json").string() +
                                      " --steps 512 --jobs 2 --out " + (dir / "res.json").string());
        REQUIRE(res.exit_code == 0);
        const json doc = json::parse(slurp(dir / "res.json"));
        REQUIRE(doc.contains("gap_study"));
        REQUIRE(doc["gap_study"].size() == 2);
        CHECK(doc["gap_study"][0]["strategy"] == "oracle");
        CHECK(doc["gap_study"][0]["min_gap"].get<double>() > doc["gap_study"][1]["min_gap"].get<double>());
    }
}

TEST_CASE("cli demo-two-level") {
    const fs::path dir = fresh_dir("demo");
    const CliResult res = run_cli("demo-two-level --out " + dir.string());
    REQUIRE(res.exit_code == 0);
    const json summaries = json::parse(res.output);
    CHECK(summaries["fig1_lines"]["permutation"] == json::array({1, 0}));
    CHECK(summaries["fig1_avoided"]["permutation"] == json::array({1, 0}));
    for (const char* name : {"fig1_lines", "fig1_avoided"}) {
        CHECK(fs::exists(dir / (std::string(name) + ".csv")));
        // the emitted configs must stay byte-identical to the bundled ones
        CHECK(slurp(dir / (std::string(name) + ".json")) == slurp(config_dir() / (std::string(name) + ".json")));
    }
}

TEST_CASE("cli determinism and error paths") {
    SECTION("repeated runs are byte-identical") {
        const fs::path dir = fresh_dir("determinism");
        for (int run = 0; run < 2; ++run) {
            const CliResult res =
                run_cli("flow --config " + (config_dir() / "fig1_avoided.json").string() + " --out " +
                        (dir / ("run" + std::to_string(run) + ".csv")).string());
            REQUIRE(res.exit_code == 0);
            write_text_file((dir / ("summary" + std::to_string(run) + ".json")).string(), res.output);
        }
        CHECK(slurp(dir / "run0.csv") == slurp(dir / "run1.csv"));
        CHECK(slurp(dir / "summary0.json") == slurp(dir / "summary1.json"));
    }
    SECTION("missing config file exits 1") {
        CHECK(run_cli("flow --config /nonexistent/cfg.json").exit_code == 1);
    }
    SECTION("unknown flag exits 1") {
        CHECK(run_cli("flow --nonsense").exit_code == 1);
    }
    SECTION("help exits 0") {
        CHECK(run_cli("--help").exit_code == 0);
    }
    SECTION("ANHOLONOMY_LOG=info emits progress lines on stderr") {
        const CliResult quiet = run_cli("validate --config " + (config_dir() / "fig1_lines.json").string());
        CHECK(quiet.output.find("[info]") == std::string::npos);
        const fs::path dir = fresh_dir("log_env");
        const std::string cmd = "cd " + dir.string() + " && ANHOLONOMY_LOG=info " +
                                std::string(ANHOLONOMY_CLI_PATH) + " flow --config " +
                                (config_dir() / "fig1_lines.json").string() + " --out flow.csv 2>&1";
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::string output;
        char buf[4096];
        while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) output.append(buf, got);
        pclose(pipe);
        CHECK(output.find("[info]") != std::string::npos);
    }
}
