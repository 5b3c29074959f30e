#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = QUADTUNE_CLI_PATH;
const fs::path kData = QUADTUNE_DATA_DIR;

int run(const std::string& args) {
    const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

json slurp_json(const fs::path& path) { return json::parse(slurp(path)); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("quadtune_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("tune writes the fixed output layout") {
    const fs::path out = fresh_dir("tune_layout");
    REQUIRE(run("tune --algo pso --trials 2 --seed 7 --iters 3 --pop 12 --out " +
                out.string()) == 0);
    for (int k = 0; k < 2; ++k) {
        const fs::path trial = out / ("trial_" + std::to_string(k));
        CHECK(fs::exists(trial / "trace.csv"));
        CHECK(fs::exists(trial / "trace.json"));
        CHECK(fs::exists(trial / "best_gains.json"));
    }
    CHECK(fs::exists(out / "summary.json"));
    CHECK(fs::exists(out / "best_trajectory.csv"));

    const json summary = slurp_json(out / "summary.json");
    CHECK(summary["algorithm"] == "pso");
    REQUIRE(summary["trials"].size() == 2);
    CHECK(summary["trials"][0]["seed"] == 7);
    CHECK(summary["trials"][1]["seed"] == 8);
    CHECK(summary["mean_best_gains"].contains("Kp_phi"));
    CHECK(summary["stddev_best_gains"].contains("Kd_z"));
}

TEST_CASE("zero iterations reports the best of the initial population") {
    const fs::path out = fresh_dir("tune_iters0");
    REQUIRE(run("tune --algo bbo --trials 1 --seed 3 --iters 0 --pop 10 --out " +
                out.string()) == 0);
    const json summary = slurp_json(out / "summary.json");
    const json trace = slurp_json(out / "trial_0" / "trace.json");
    REQUIRE(trace["iterations"].size() == 1);
    CHECK(summary["best_cost"] == trace["iterations"][0]["best_cost"]);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
    const fs::path a = fresh_dir("tune_det_a");
    const fs::path b = fresh_dir("tune_det_b");
    const std::string args = "tune --algo pso --trials 2 --seed 11 --iters 3 --pop 10 --out ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string()) == 0);
    for (const char* rel : {"summary.json", "best_trajectory.csv", "trial_0/trace.csv",
                            "trial_0/trace.json", "trial_0/best_gains.json",
                            "trial_1/trace.csv"})
        REQUIRE(slurp(a / rel) == slurp(b / rel));
}

TEST_CASE("tune honors a config file with flag overrides") {
    const fs::path out = fresh_dir("tune_config");
    const fs::path cfg = out / "campaign.json";
    {
        std::ofstream f(cfg);
        f << R"({"algorithm": "bbo", "trials": 3, "seed": 5})";
    }
    REQUIRE(run("tune --config " + cfg.string() + " --trials 1 --iters 2 --pop 8 --out " +
                out.string() + "/run") == 0);
    const json summary = slurp_json(out / "run" / "summary.json");
    CHECK(summary["algorithm"] == "bbo");  // from the file
    CHECK(summary["trials"].size() == 1);  // flag override
}

TEST_CASE("simulate replays a gain file") {
    const fs::path out = fresh_dir("simulate");
    REQUIRE(run("simulate --gains " + (kData / "gains_pd.json").string() + " --out " +
                out.string()) == 0);
    REQUIRE(fs::exists(out / "trajectory.csv"));
    REQUIRE(fs::exists(out / "metrics.json"));
    REQUIRE(fs::exists(out / "cost.json"));

    // z climbs from -1 toward the setpoint.
    std::ifstream in(out / "trajectory.csv");
    std::string header, first, last, line;
    std::getline(in, header);
    std::getline(in, first);
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    auto z_of = [](const std::string& row) {
        std::istringstream ss(row);
        std::string cell;
        for (int i = 0; i < 4; ++i) std::getline(ss, cell, ',');
        return std::stod(cell);
    };
    CHECK(z_of(first) == -1.0);
    CHECK(std::abs(z_of(last)) < 0.1);

    const json metrics = slurp_json(out / "metrics.json");
    for (const char* ch : {"phi", "theta", "psi", "z"}) {
        REQUIRE(metrics.contains(ch));
        REQUIRE(metrics[ch].contains("overshoot"));
        REQUIRE(metrics[ch].contains("settling_time"));
    }
    const json cost = slurp_json(out / "cost.json");
    CHECK(cost["aggregate"].get<double>() > 0.0);
}

TEST_CASE("metrics subcommand reads a trajectory CSV") {
    const fs::path out = fresh_dir("metrics");
    REQUIRE(run("simulate --gains " + (kData / "gains_pd.json").string() + " --out " +
                out.string()) == 0);
    REQUIRE(run("metrics " + (out / "trajectory.csv").string() + " --out " +
                (out / "m.json").string()) == 0);
    const json m = slurp_json(out / "m.json");
    CHECK(m["z"]["overshoot"].get<double>() >= 0.0);
}

TEST_CASE("compare accepts two or more gain files") {
    CHECK(run("compare " + (kData / "gains_pd.json").string() + " " +
              (kData / "gains_pso.json").string() + " " +
              (kData / "gains_bbo.json").string()) == 0);
    // Fewer than two files is a usage error.
    CHECK(run("compare " + (kData / "gains_pd.json").string()) != 0);
}

TEST_CASE("invalid inputs exit nonzero") {
    CHECK(run("simulate --gains /nonexistent.json --out /tmp/quadtune_cli_bad") != 0);
    const fs::path out = fresh_dir("badcfg");
    const fs::path cfg = out / "bad.json";
    {
        std::ofstream f(cfg);
        f << R"({"algoritm": "pso"})";
    }
    CHECK(run("tune --config " + cfg.string() + " --out " + out.string()) != 0);
    CHECK(run("tune --algo nsga2 --out " + out.string()) != 0);
}
