#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <stdexcept>
#include <vector>

#include "quadtune/controller.hpp"
#include "quadtune/io.hpp"
#include "quadtune/objective.hpp"
#include "quadtune/optimizer.hpp"

namespace quadtune {

/// Search box for the eight PD gains, in GainSet::to_array order.
inline opt::SearchSpace default_search_space() {
    opt::SearchSpace space;
    space.bounds = {{0.0, 20.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0},
                    {0.0, 10.0}, {0.0, 10.0}, {0.0, 3.0},  {0.0, 3.0}};
    return space;
}

/// Conventional hand-tuned PD baseline the tuners are compared against.
inline GainSet baseline_pd_gains() {
    return GainSet{6.0, 1.75, 6.0, 1.75, 6.0, 1.75, 1.5, 2.5};
}

/// A complete tuning run: scenario, weights, search box, algorithm
/// selection, trial count and seeding.
struct CampaignConfig {
    ScenarioConfig scenario = default_scenario();
    ObjectiveWeights weights;
    opt::SearchSpace space = default_search_space();
    opt::Algorithm algorithm = opt::Algorithm::pso;
    opt::BboConfig bbo;
    opt::PsoConfig pso;
    std::size_t trials = 5;
    std::uint64_t base_seed = 1;
    std::filesystem::path output_dir = "out";

    void validate() const {
        scenario.validate();
        weights.validate();
        space.validate();
        if (space.dimensions() != 8)
            throw std::invalid_argument("campaign: search space must have 8 dimensions");
        bbo.validate();
        pso.validate();
        if (trials < 1) throw std::invalid_argument("campaign: trials must be >= 1");
    }
};

struct CampaignResult {
    std::vector<opt::OptResult> trials;  // trial k uses seed base_seed + k
    std::size_t best_trial = 0;
};

inline opt::ObjectiveFn make_gain_objective(const ScenarioConfig& sc,
                                            const ObjectiveWeights& w) {
    return [sc, w](const std::vector<double>& x) {
        std::array<double, 8> a{};
        std::copy_n(x.begin(), 8, a.begin());
        return evaluate(GainSet::from_array(a), sc, w).aggregate;
    };
}

inline opt::OptResult run_trial(const CampaignConfig& cfg, std::uint64_t seed) {
    const auto objective = make_gain_objective(cfg.scenario, cfg.weights);
    return cfg.algorithm == opt::Algorithm::bbo
               ? opt::optimize_bbo(cfg.space, objective, cfg.bbo, seed)
               : opt::optimize_pso(cfg.space, objective, cfg.pso, seed);
}

/// Runs all trials with seeds base_seed .. base_seed + trials - 1.
/// Trials are independent, each with its own RNG stream.
inline CampaignResult run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    std::vector<std::future<opt::OptResult>> futures;
    futures.reserve(cfg.trials);
    for (std::size_t k = 0; k < cfg.trials; ++k)
        futures.push_back(std::async(std::launch::async, run_trial, cfg,
                                     cfg.base_seed + static_cast<std::uint64_t>(k)));

    CampaignResult res;
    res.trials.reserve(cfg.trials);
    for (auto& f : futures) res.trials.push_back(f.get());
    for (std::size_t k = 1; k < cfg.trials; ++k)
        if (res.trials[k].best_cost < res.trials[res.best_trial].best_cost) res.best_trial = k;
    return res;
}

namespace io_detail {

inline void save_atomic(const std::filesystem::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    io::detail::save_file(tmp, text);
    std::filesystem::rename(tmp, path);
}

}  // namespace io_detail

inline GainSet best_gains(const opt::OptResult& trial) {
    std::array<double, 8> a{};
    std::copy_n(trial.best_position.begin(), 8, a.begin());
    return GainSet::from_array(a);
}

/// Per-trial best gains and costs plus their mean and standard deviation
/// across trials (population standard deviation).
inline io::json campaign_summary(const CampaignConfig& cfg, const CampaignResult& res) {
    io::json trials = io::json::array();
    std::array<double, 8> mean{}, var{};
    double mean_cost = 0.0;
    for (std::size_t k = 0; k < res.trials.size(); ++k) {
        const auto& t = res.trials[k];
        trials.push_back(io::json{{"trial", k},
                                  {"seed", t.trace.seed},
                                  {"best_cost", t.best_cost},
                                  {"best_gains", io::to_json(best_gains(t))}});
        for (int d = 0; d < 8; ++d) mean[d] += t.best_position[d];
        mean_cost += t.best_cost;
    }
    const double n = static_cast<double>(res.trials.size());
    for (int d = 0; d < 8; ++d) mean[d] /= n;
    mean_cost /= n;
    for (const auto& t : res.trials)
        for (int d = 0; d < 8; ++d)
            var[d] += (t.best_position[d] - mean[d]) * (t.best_position[d] - mean[d]);
    std::array<double, 8> stddev{};
    for (int d = 0; d < 8; ++d) stddev[d] = std::sqrt(var[d] / n);

    return io::json{{"algorithm", cfg.algorithm == opt::Algorithm::bbo ? "bbo" : "pso"},
                    {"trials", trials},
                    {"mean_best_gains", io::to_json(GainSet::from_array(mean))},
                    {"stddev_best_gains", io::to_json(GainSet::from_array(stddev))},
                    {"mean_best_cost", mean_cost},
                    {"best_trial", res.best_trial},
                    {"best_cost", res.trials[res.best_trial].best_cost}};
}

/// Writes the fixed output layout: trial_<k>/{trace.csv, trace.json,
/// best_gains.json}, summary.json, best_trajectory.csv.
inline void write_campaign(const CampaignConfig& cfg, const CampaignResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    for (std::size_t k = 0; k < res.trials.size(); ++k) {
        const fs::path dir = cfg.output_dir / ("trial_" + std::to_string(k));
        fs::create_directories(dir);
        io_detail::save_atomic(dir / "trace.csv", io::trace_csv(res.trials[k].trace));
        io_detail::save_atomic(dir / "trace.json",
                               io::trace_sidecar(res.trials[k].trace).dump(2) + "\n");
        io_detail::save_atomic(dir / "best_gains.json",
                               io::to_json(best_gains(res.trials[k])).dump(2) + "\n");
    }
    io_detail::save_atomic(cfg.output_dir / "summary.json",
                           campaign_summary(cfg, res).dump(2) + "\n");
    const auto traj = simulate_closed_loop(best_gains(res.trials[res.best_trial]), cfg.scenario);
    io_detail::save_atomic(cfg.output_dir / "best_trajectory.csv", io::trajectory_csv(traj));
}

// ---- CampaignConfig JSON ----------------------------------------------------

inline io::json to_json(const CampaignConfig& cfg) {
    return io::json{{"scenario", io::to_json(cfg.scenario)},
                    {"weights", cfg.weights.w},
                    {"bounds", io::to_json(cfg.space)},
                    {"algorithm", cfg.algorithm == opt::Algorithm::bbo ? "bbo" : "pso"},
                    {"bbo", io::to_json(cfg.bbo)},
                    {"pso", io::to_json(cfg.pso)},
                    {"trials", cfg.trials},
                    {"seed", cfg.base_seed},
                    {"output_dir", cfg.output_dir.string()}};
}

/// Loads a campaign config; every field is optional and falls back to
/// the defaults above. Unknown fields are rejected.
inline CampaignConfig campaign_from_json(const io::json& j) {
    io::detail::reject_unknown(
        j, {"scenario", "weights", "bounds", "algorithm", "bbo", "pso", "trials", "seed",
            "output_dir"},
        "CampaignConfig");
    CampaignConfig cfg;
    if (j.contains("scenario")) cfg.scenario = io::scenario_from_json(j.at("scenario"));
    if (j.contains("weights")) cfg.weights.w = j.at("weights").get<std::array<double, 4>>();
    if (j.contains("bounds")) cfg.space = io::search_space_from_json(j.at("bounds"));
    if (j.contains("algorithm"))
        cfg.algorithm = opt::parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("bbo")) cfg.bbo = io::bbo_config_from_json(j.at("bbo"));
    if (j.contains("pso")) cfg.pso = io::pso_config_from_json(j.at("pso"));
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.validate();
    return cfg;
}

}  // namespace quadtune
