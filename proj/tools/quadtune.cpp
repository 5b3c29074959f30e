// quadtune CLI: run PD gain tuning campaigns, replay gain sets through the
// closed-loop simulator, and compute step-response metrics.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadtune/quadtune.hpp"

namespace fs = std::filesystem;
using quadtune::io::json;

namespace {

quadtune::io::json channel_metrics(const std::vector<double>& samples, double dt,
                                   double setpoint) {
    const double x0 = samples.front();
    if (x0 == setpoint) {
        // No step on this channel; report residual excursion only.
        double excursion = 0.0;
        for (double v : samples) excursion = std::max(excursion, std::abs(v - setpoint));
        json j{{"overshoot", excursion},
               {"steady_state_error", std::abs(samples.back() - setpoint)}};
        j["rise_time"] = nullptr;
        j["settling_time"] = 0.0;
        return j;
    }
    return quadtune::io::to_json(quadtune::step_metrics(samples, dt, x0, setpoint));
}

json trajectory_metrics(const quadtune::io::TrajectoryChannels& ch,
                        const quadtune::Reference& ref) {
    const double dt = ch.time.size() > 1 ? ch.time[1] - ch.time[0] : 1.0;
    return json{{"phi", channel_metrics(ch.phi, dt, ref.phi_d)},
                {"theta", channel_metrics(ch.theta, dt, ref.theta_d)},
                {"psi", channel_metrics(ch.psi, dt, ref.psi_d)},
                {"z", channel_metrics(ch.z, dt, ref.z_d)}};
}

quadtune::io::TrajectoryChannels channels_of(const quadtune::Trajectory& traj) {
    quadtune::io::TrajectoryChannels ch;
    ch.time = traj.time;
    for (const auto& s : traj.states) {
        ch.phi.push_back(s.attitude[0]);
        ch.theta.push_back(s.attitude[1]);
        ch.psi.push_back(s.attitude[2]);
        ch.z.push_back(s.position[2]);
    }
    return ch;
}

quadtune::ScenarioConfig load_scenario(const std::string& path) {
    if (path.empty()) return quadtune::default_scenario();
    return quadtune::io::scenario_from_json(quadtune::io::detail::load_file(path));
}

int cmd_tune(const std::string& config_path, const std::string& algo,
             std::optional<std::size_t> trials, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> iters, std::optional<std::size_t> pop,
             const std::string& out_dir) {
    quadtune::CampaignConfig cfg;
    if (!config_path.empty())
        cfg = quadtune::campaign_from_json(quadtune::io::detail::load_file(config_path));
    if (!algo.empty()) cfg.algorithm = quadtune::opt::parse_algorithm(algo);
    if (trials) cfg.trials = *trials;
    if (seed) cfg.base_seed = *seed;
    if (iters) {
        cfg.bbo.iterations = *iters;
        cfg.pso.iterations = *iters;
    }
    if (pop) {
        cfg.bbo.population = *pop;
        cfg.pso.population = *pop;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();

    const auto result = quadtune::run_campaign(cfg);
    quadtune::write_campaign(cfg, result);
    const auto& best = result.trials[result.best_trial];
    std::cout << "best trial " << result.best_trial << " (seed " << best.trace.seed
              << "): cost " << best.best_cost << "\n"
              << "outputs in " << cfg.output_dir.string() << "\n";
    return 0;
}

int cmd_simulate(const std::string& gains_path, const std::string& scenario_path,
                 const std::string& out_dir) {
    const auto gains =
        quadtune::io::gains_from_json(quadtune::io::detail::load_file(gains_path));
    const auto scenario = load_scenario(scenario_path);

    const auto traj = quadtune::simulate_closed_loop(gains, scenario);
    auto cost = quadtune::cost_components(traj, scenario.reference);
    quadtune::ObjectiveWeights weights;
    cost.aggregate = quadtune::aggregate_cost(cost, weights);

    fs::create_directories(out_dir);
    quadtune::io_detail::save_atomic(fs::path(out_dir) / "trajectory.csv",
                                     quadtune::io::trajectory_csv(traj));
    quadtune::io_detail::save_atomic(
        fs::path(out_dir) / "metrics.json",
        trajectory_metrics(channels_of(traj), scenario.reference).dump(2) + "\n");
    quadtune::io_detail::save_atomic(fs::path(out_dir) / "cost.json",
                                     quadtune::io::to_json(cost).dump(2) + "\n");
    if (traj.diverged) {
        std::cerr << "warning: simulation diverged after " << traj.size() << " samples\n";
    }
    std::cout << "aggregate cost " << cost.aggregate << "; outputs in " << out_dir << "\n";
    return 0;
}

int cmd_metrics(const std::string& trajectory_path, const std::string& scenario_path,
                const std::string& out_path) {
    std::ifstream in(trajectory_path);
    if (!in) throw std::runtime_error("cannot open " + trajectory_path);
    const auto channels = quadtune::io::trajectory_channels_from_csv(in);
    const auto scenario = load_scenario(scenario_path);
    const json m = trajectory_metrics(channels, scenario.reference);
    if (out_path.empty())
        std::cout << m.dump(2) << "\n";
    else
        quadtune::io_detail::save_atomic(out_path, m.dump(2) + "\n");
    return 0;
}

int cmd_compare(const std::vector<std::string>& gain_paths, const std::string& scenario_path) {
    const auto scenario = load_scenario(scenario_path);
    quadtune::ObjectiveWeights weights;

    struct Column {
        std::string name;
        quadtune::GainSet gains;
        quadtune::CostVector cost;
        json metrics;
    };
    std::vector<Column> columns;
    for (const auto& path : gain_paths) {
        Column c;
        c.name = fs::path(path).stem().string();
        c.gains = quadtune::io::gains_from_json(quadtune::io::detail::load_file(path));
        const auto traj = quadtune::simulate_closed_loop(c.gains, scenario);
        c.cost = quadtune::cost_components(traj, scenario.reference);
        c.cost.aggregate = quadtune::aggregate_cost(c.cost, weights);
        c.metrics = trajectory_metrics(channels_of(traj), scenario.reference);
        columns.push_back(std::move(c));
    }

    auto row = [&](const std::string& label, auto value_of) {
        std::printf("%-22s", label.c_str());
        for (const auto& c : columns) std::printf(" %14s", value_of(c).c_str());
        std::printf("\n");
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    row("", [](const Column& c) { return c.name; });
    const char* gain_names[8] = {"Kp_phi", "Kd_phi", "Kp_theta", "Kd_theta",
                                 "Kp_psi", "Kd_psi", "Kp_z", "Kd_z"};
    for (int d = 0; d < 8; ++d)
        row(gain_names[d], [&](const Column& c) { return num(c.gains.to_array()[d]); });
    const char* cost_names[4] = {"F1 (phi)", "F2 (theta)", "F3 (psi)", "F4 (z)"};
    for (int i = 0; i < 4; ++i)
        row(cost_names[i], [&](const Column& c) { return num(c.cost.components[i]); });
    row("aggregate", [&](const Column& c) { return num(c.cost.aggregate); });
    for (const char* ch : {"phi", "theta", "psi", "z"}) {
        for (const char* metric :
             {"overshoot", "rise_time", "settling_time", "steady_state_error"}) {
            row(std::string(ch) + " " + metric, [&](const Column& c) {
                const auto& v = c.metrics[ch][metric];
                return v.is_null() ? std::string("-") : num(v.get<double>());
            });
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadrotor PD gain tuning via BBO and PSO"};
    app.require_subcommand(1);

    std::string config_path, algo, out_dir, gains_path, scenario_path, trajectory_path,
        out_path;
    std::optional<std::size_t> trials, iters, pop;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> gain_paths;

    auto* tune = app.add_subcommand("tune", "run a tuning campaign");
    tune->add_option("--config", config_path, "campaign config JSON");
    tune->add_option("--algo", algo, "optimizer")->check(CLI::IsMember({"bbo", "pso"}));
    tune->add_option("--trials", trials, "number of trials");
    tune->add_option("--seed", seed, "base seed (trial k uses seed+k)");
    tune->add_option("--iters", iters, "iteration limit override");
    tune->add_option("--pop", pop, "population size override");
    tune->add_option("--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "replay a gain set through the simulator");
    simulate->add_option("--gains", gains_path, "gain set JSON")->required();
    simulate->add_option("--config", scenario_path, "scenario JSON (default: built-in)");
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* metrics = app.add_subcommand("metrics", "step-response metrics from a trajectory CSV");
    metrics->add_option("trajectory", trajectory_path, "trajectory CSV")->required();
    metrics->add_option("--config", scenario_path, "scenario JSON (default: built-in)");
    metrics->add_option("--out", out_path, "metrics JSON path (default: stdout)");

    auto* compare = app.add_subcommand("compare", "compare two or more gain sets");
    compare->add_option("gains", gain_paths, "gain set JSON files")->expected(2, -1);
    compare->add_option("--config", scenario_path, "scenario JSON (default: built-in)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tune->parsed())
            return cmd_tune(config_path, algo, trials, seed, iters, pop, out_dir);
        if (simulate->parsed()) return cmd_simulate(gains_path, scenario_path, out_dir);
        if (metrics->parsed()) return cmd_metrics(trajectory_path, scenario_path, out_path);
        if (compare->parsed()) return cmd_compare(gain_paths, scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
