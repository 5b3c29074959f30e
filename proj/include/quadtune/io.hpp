#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtune/controller.hpp"
#include "quadtune/metrics.hpp"
#include "quadtune/objective.hpp"
#include "quadtune/optimizer.hpp"
#include "quadtune/types.hpp"

namespace quadtune::io {

using nlohmann::json;

namespace detail {

/// Full-precision, locale-independent double formatting (round-trips).
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void reject_unknown(const json& j, const std::vector<std::string>& keys,
                           const std::string& what) {
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw std::invalid_argument(what + ": unknown field '" + k + "'");
    }
}

inline void require_keys(const json& j, const std::vector<std::string>& keys,
                         const std::string& what) {
    for (const auto& k : keys)
        if (!j.contains(k)) throw std::invalid_argument(what + ": missing field '" + k + "'");
    reject_unknown(j, keys, what);
}

inline json load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

inline void save_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace detail

// ---- DroneParams ----------------------------------------------------------

inline json to_json(const DroneParams& p) {
    return json{{"mass", p.mass},
                {"Ixx", p.inertia[0]},
                {"Iyy", p.inertia[1]},
                {"Izz", p.inertia[2]},
                {"arm_length", p.arm_length},
                {"thrust_coeff", p.thrust_coeff},
                {"drag_coeff", p.drag_coeff},
                {"Ax", p.linear_drag[0]},
                {"Ay", p.linear_drag[1]},
                {"Az", p.linear_drag[2]},
                {"gravity", p.gravity}};
}

inline DroneParams params_from_json(const json& j) {
    detail::require_keys(j,
                         {"mass", "Ixx", "Iyy", "Izz", "arm_length", "thrust_coeff",
                          "drag_coeff", "Ax", "Ay", "Az", "gravity"},
                         "DroneParams");
    DroneParams p;
    p.mass = j.at("mass").get<double>();
    p.inertia = {j.at("Ixx").get<double>(), j.at("Iyy").get<double>(), j.at("Izz").get<double>()};
    p.arm_length = j.at("arm_length").get<double>();
    p.thrust_coeff = j.at("thrust_coeff").get<double>();
    p.drag_coeff = j.at("drag_coeff").get<double>();
    p.linear_drag = {j.at("Ax").get<double>(), j.at("Ay").get<double>(), j.at("Az").get<double>()};
    p.gravity = j.at("gravity").get<double>();
    p.validate();
    return p;
}

// ---- GainSet ---------------------------------------------------------------

inline json to_json(const GainSet& g) {
    return json{{"Kp_phi", g.kp_phi},   {"Kd_phi", g.kd_phi},   {"Kp_theta", g.kp_theta},
                {"Kd_theta", g.kd_theta}, {"Kp_psi", g.kp_psi}, {"Kd_psi", g.kd_psi},
                {"Kp_z", g.kp_z},       {"Kd_z", g.kd_z}};
}

inline GainSet gains_from_json(const json& j) {
    detail::require_keys(j,
                         {"Kp_phi", "Kd_phi", "Kp_theta", "Kd_theta", "Kp_psi", "Kd_psi",
                          "Kp_z", "Kd_z"},
                         "GainSet");
    GainSet g;
    g.kp_phi = j.at("Kp_phi").get<double>();
    g.kd_phi = j.at("Kd_phi").get<double>();
    g.kp_theta = j.at("Kp_theta").get<double>();
    g.kd_theta = j.at("Kd_theta").get<double>();
    g.kp_psi = j.at("Kp_psi").get<double>();
    g.kd_psi = j.at("Kd_psi").get<double>();
    g.kp_z = j.at("Kp_z").get<double>();
    g.kd_z = j.at("Kd_z").get<double>();
    for (double v : g.to_array())
        if (!(v >= 0.0)) throw std::invalid_argument("GainSet: gains must be nonnegative");
    return g;
}

// ---- Scenario --------------------------------------------------------------

inline json to_json(const Reference& r) {
    return json{{"z_d", r.z_d}, {"phi_d", r.phi_d}, {"theta_d", r.theta_d}, {"psi_d", r.psi_d}};
}

inline Reference reference_from_json(const json& j) {
    detail::require_keys(j, {"z_d", "phi_d", "theta_d", "psi_d"}, "Reference");
    return Reference{j.at("z_d").get<double>(), j.at("phi_d").get<double>(),
                     j.at("theta_d").get<double>(), j.at("psi_d").get<double>()};
}

inline json to_json(const State& s) {
    return json{{"position", s.position},
                {"attitude", s.attitude},
                {"velocity", s.velocity},
                {"body_rates", s.body_rates}};
}

inline State state_from_json(const json& j) {
    detail::require_keys(j, {"position", "attitude", "velocity", "body_rates"}, "State");
    State s;
    s.position = j.at("position").get<Vec3>();
    s.attitude = j.at("attitude").get<Vec3>();
    s.velocity = j.at("velocity").get<Vec3>();
    s.body_rates = j.at("body_rates").get<Vec3>();
    return s;
}

inline json to_json(const ScenarioConfig& sc) {
    return json{{"initial", to_json(sc.initial)},
                {"reference", to_json(sc.reference)},
                {"duration", sc.duration},
                {"dt", sc.dt},
                {"params", to_json(sc.params)}};
}

inline ScenarioConfig scenario_from_json(const json& j) {
    detail::require_keys(j, {"initial", "reference", "duration", "dt", "params"},
                         "ScenarioConfig");
    ScenarioConfig sc;
    sc.initial = state_from_json(j.at("initial"));
    sc.reference = reference_from_json(j.at("reference"));
    sc.duration = j.at("duration").get<double>();
    sc.dt = j.at("dt").get<double>();
    sc.params = params_from_json(j.at("params"));
    sc.validate();
    return sc;
}

// ---- Optimizer configs -----------------------------------------------------

inline json to_json(const opt::SearchSpace& space) {
    json arr = json::array();
    for (const auto& [lo, hi] : space.bounds) arr.push_back(json::array({lo, hi}));
    return arr;
}

inline opt::SearchSpace search_space_from_json(const json& j) {
    opt::SearchSpace space;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("SearchSpace: each bound must be a [min, max] pair");
        space.bounds.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    space.validate();
    return space;
}

inline json to_json(const opt::BboConfig& c) {
    return json{{"population", c.population},
                {"iterations", c.iterations},
                {"elites", c.elites},
                {"mutation_prob", c.mutation_prob},
                {"mutation_scale", c.mutation_scale}};
}

inline opt::BboConfig bbo_config_from_json(const json& j) {
    detail::require_keys(
        j, {"population", "iterations", "elites", "mutation_prob", "mutation_scale"},
        "BboConfig");
    opt::BboConfig c;
    c.population = j.at("population").get<std::size_t>();
    c.iterations = j.at("iterations").get<std::size_t>();
    c.elites = j.at("elites").get<std::size_t>();
    c.mutation_prob = j.at("mutation_prob").get<double>();
    c.mutation_scale = j.at("mutation_scale").get<double>();
    c.validate();
    return c;
}

inline json to_json(const opt::PsoConfig& c) {
    return json{{"population", c.population},   {"iterations", c.iterations},
                {"inertia", c.inertia},         {"inertia_damping", c.inertia_damping},
                {"cognitive", c.cognitive},     {"social", c.social},
                {"velocity_clamp", c.velocity_clamp}};
}

inline opt::PsoConfig pso_config_from_json(const json& j) {
    detail::require_keys(j,
                         {"population", "iterations", "inertia", "inertia_damping",
                          "cognitive", "social", "velocity_clamp"},
                         "PsoConfig");
    opt::PsoConfig c;
    c.population = j.at("population").get<std::size_t>();
    c.iterations = j.at("iterations").get<std::size_t>();
    c.inertia = j.at("inertia").get<double>();
    c.inertia_damping = j.at("inertia_damping").get<double>();
    c.cognitive = j.at("cognitive").get<double>();
    c.social = j.at("social").get<double>();
    c.velocity_clamp = j.at("velocity_clamp").get<double>();
    c.validate();
    return c;
}

// ---- Metrics / cost --------------------------------------------------------

inline json to_json(const StepMetrics& m) {
    json j{{"overshoot", m.overshoot}, {"steady_state_error", m.steady_state_error}};
    j["rise_time"] = m.rise_time ? json(*m.rise_time) : json(nullptr);
    j["settling_time"] = m.settling_time ? json(*m.settling_time) : json(nullptr);
    return j;
}

inline json to_json(const CostVector& c) {
    return json{{"F1_phi", c.components[0]},
                {"F2_theta", c.components[1]},
                {"F3_psi", c.components[2]},
                {"F4_z", c.components[3]},
                {"aggregate", c.aggregate}};
}

// ---- CSV -------------------------------------------------------------------

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,x,y,z,phi,theta,psi,p,q,r,T,tau_phi,tau_theta,tau_psi\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const State& s = traj.states[k];
        const ControlInput& u = traj.inputs[k];
        out << detail::fmt(traj.time[k]);
        for (double v : s.position) out << ',' << detail::fmt(v);
        for (double v : s.attitude) out << ',' << detail::fmt(v);
        for (double v : s.body_rates) out << ',' << detail::fmt(v);
        out << ',' << detail::fmt(u.thrust);
        for (double v : u.torque) out << ',' << detail::fmt(v);
        out << '\n';
    }
    return out.str();
}

struct TrajectoryChannels {
    std::vector<double> time;
    std::vector<double> phi, theta, psi, z;
};

/// Reads back the channels needed for metrics from a trajectory CSV.
inline TrajectoryChannels trajectory_channels_from_csv(std::istream& in) {
    TrajectoryChannels ch;
    std::string line;
    if (!std::getline(in, line) ||
        line != "t,x,y,z,phi,theta,psi,p,q,r,T,tau_phi,tau_theta,tau_psi")
        throw std::invalid_argument("trajectory CSV: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::array<double, 14> vals{};
        std::string cell;
        for (double& v : vals) {
            if (!std::getline(row, cell, ','))
                throw std::invalid_argument("trajectory CSV: short row");
            v = std::stod(cell);
        }
        ch.time.push_back(vals[0]);
        ch.z.push_back(vals[3]);
        ch.phi.push_back(vals[4]);
        ch.theta.push_back(vals[5]);
        ch.psi.push_back(vals[6]);
    }
    if (ch.time.empty()) throw std::invalid_argument("trajectory CSV: no samples");
    return ch;
}

inline std::string trace_csv(const opt::OptimizationTrace& trace) {
    std::ostringstream out;
    out << "iteration,best_cost,mean_cost\n";
    for (std::size_t k = 0; k < trace.best_cost.size(); ++k)
        out << k << ',' << detail::fmt(trace.best_cost[k]) << ','
            << detail::fmt(trace.mean_cost[k]) << '\n';
    return out.str();
}

/// JSON sidecar for a trace: the seed plus the best gain set per iteration.
inline json trace_sidecar(const opt::OptimizationTrace& trace) {
    json iterations = json::array();
    for (std::size_t k = 0; k < trace.best_cost.size(); ++k) {
        std::array<double, 8> a{};
        std::copy_n(trace.best_position[k].begin(), 8, a.begin());
        iterations.push_back(json{{"iteration", k},
                                  {"best_cost", trace.best_cost[k]},
                                  {"best_gains", to_json(GainSet::from_array(a))}});
    }
    return json{{"seed", trace.seed}, {"iterations", iterations}};
}

}  // namespace quadtune::io
