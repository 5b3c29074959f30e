#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "quadtune/controller.hpp"
#include "quadtune/dynamics.hpp"
#include "quadtune/types.hpp"

namespace quadtune {

/// Cost applied per component when a candidate's closed loop diverges.
inline constexpr double kDivergencePenalty = 1e6;

struct ScenarioConfig {
    State initial;
    Reference reference;
    double duration = 10.0;  // [s]
    double dt = 0.01;        // [s]
    DroneParams params;

    void validate() const {
        if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
        if (!(dt > 0.0 && dt <= duration))
            throw std::invalid_argument("dt must satisfy 0 < dt <= duration");
        if (!initial.finite()) throw std::invalid_argument("initial state must be finite");
        if (std::abs(std::cos(initial.attitude[1])) < kSingularCosThreshold)
            throw std::invalid_argument("initial attitude is singular");
        params.validate();
    }
};

/// Paper scenario: start 1 m below the altitude setpoint with all three
/// Euler angles at -0.7 rad, regulate everything to zero.
inline ScenarioConfig default_scenario() {
    ScenarioConfig sc;
    sc.initial.position = {0.0, 0.0, -1.0};
    sc.initial.attitude = {-0.7, -0.7, -0.7};
    return sc;
}

/// Uniformly sampled closed-loop record. When `diverged` is set the
/// sample arrays stop at the last finite state.
struct Trajectory {
    std::vector<double> time;
    std::vector<State> states;
    std::vector<ControlInput> inputs;
    bool diverged = false;

    std::size_t size() const { return time.size(); }
};

struct ObjectiveWeights {
    std::array<double, 4> w{1.0, 1.0, 1.0, 1.0};  // phi, theta, psi, z

    void validate() const {
        double sum = 0.0;
        for (double v : w) {
            if (!(v >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
            sum += v;
        }
        if (sum == 0.0) throw std::invalid_argument("weights must not all be zero");
    }
};

/// Absolute-error integrals for (phi, theta, psi, z) plus their
/// weighted aggregate.
struct CostVector {
    std::array<double, 4> components{};  // F1..F4
    double aggregate = 0.0;
};

/// Integrates the PD loop over the scenario. The controller runs at the
/// integrator rate with zero-order hold. Divergence (non-finite state,
/// singular attitude, or roll/pitch leaving the |angle| < pi/2 envelope
/// the model is valid on) truncates the trajectory and sets the flag.
inline Trajectory simulate_closed_loop(const GainSet& gains, const ScenarioConfig& sc) {
    sc.validate();
    const std::size_t steps = static_cast<std::size_t>(std::floor(sc.duration / sc.dt));

    Trajectory traj;
    traj.time.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.inputs.reserve(steps + 1);

    constexpr double half_pi = 1.5707963267948966;
    State s = sc.initial;
    for (std::size_t k = 0; k <= steps; ++k) {
        if (std::abs(s.attitude[0]) >= half_pi || std::abs(s.attitude[1]) >= half_pi) {
            traj.diverged = true;
            break;
        }
        ControlInput u;
        try {
            u = pd_control(s, sc.reference, gains, sc.params);
        } catch (const SingularAttitudeError&) {
            traj.diverged = true;
            break;
        }
        traj.time.push_back(static_cast<double>(k) * sc.dt);
        traj.states.push_back(s);
        traj.inputs.push_back(u);
        if (k == steps) break;
        try {
            s = rk4_step(s, u, sc.params, sc.dt);
        } catch (const DivergedStateError&) {
            traj.diverged = true;
            break;
        } catch (const SingularAttitudeError&) {
            traj.diverged = true;
            break;
        }
    }
    return traj;
}

/// Trapezoidal IAE per tracked channel. A diverged trajectory maps to
/// the fixed penalty on every component.
inline CostVector cost_components(const Trajectory& traj, const Reference& r) {
    if (traj.size() == 0 && !traj.diverged)
        throw std::invalid_argument("cost_components: empty trajectory");

    CostVector c;
    if (traj.diverged) {
        c.components = {kDivergencePenalty, kDivergencePenalty, kDivergencePenalty,
                        kDivergencePenalty};
        return c;
    }
    const std::array<double, 4> setpoints{r.phi_d, r.theta_d, r.psi_d, r.z_d};
    auto channel = [&](const State& s, int i) {
        return i < 3 ? s.attitude[i] : s.position[2];
    };
    for (int i = 0; i < 4; ++i) {
        double acc = 0.0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const double e0 = std::abs(channel(traj.states[k - 1], i) - setpoints[i]);
            const double e1 = std::abs(channel(traj.states[k], i) - setpoints[i]);
            acc += 0.5 * (e0 + e1) * (traj.time[k] - traj.time[k - 1]);
        }
        c.components[i] = acc;
    }
    return c;
}

inline double aggregate_cost(const CostVector& c, const ObjectiveWeights& w) {
    w.validate();
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += w.w[i] * c.components[i];
    return sum;
}

/// Full candidate evaluation: simulate, integrate errors, aggregate.
/// This is the objective handed to the optimizers.
inline CostVector evaluate(const GainSet& gains, const ScenarioConfig& sc,
                           const ObjectiveWeights& w) {
    CostVector c = cost_components(simulate_closed_loop(gains, sc), sc.reference);
    c.aggregate = aggregate_cost(c, w);
    return c;
}

}  // namespace quadtune
