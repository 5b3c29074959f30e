#pragma once

#include <array>
#include <cmath>

#include "quadtune/types.hpp"

namespace quadtune {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Body-to-inertial rotation matrix for ZYX (yaw-pitch-roll) Euler angles.
inline Mat3 euler_to_rotation(const Vec3& attitude) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]), sth = std::sin(attitude[1]);
    const double cpsi = std::cos(attitude[2]), spsi = std::sin(attitude[2]);
    return Mat3{{
        {cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi},
        {spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi},
        {-sth, cth * sphi, cth * cphi},
    }};
}

inline constexpr double kSingularCosThreshold = 1e-6;

/// Maps Euler-angle rates to body rates: nu = W(eta) * etadot.
inline Vec3 euler_rate_to_body(const Vec3& attitude, const Vec3& euler_rates) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]), sth = std::sin(attitude[1]);
    if (std::abs(cth) < kSingularCosThreshold)
        throw SingularAttitudeError("euler rate transform singular: |cos(theta)| < 1e-6");
    return Vec3{
        euler_rates[0] - sth * euler_rates[2],
        cphi * euler_rates[1] + sphi * cth * euler_rates[2],
        -sphi * euler_rates[1] + cphi * cth * euler_rates[2],
    };
}

/// Inverse transform: etadot = W(eta)^-1 * nu. Singular at |theta| = pi/2.
inline Vec3 body_rate_to_euler(const Vec3& attitude, const Vec3& body_rates) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]), sth = std::sin(attitude[1]);
    if (std::abs(cth) < kSingularCosThreshold)
        throw SingularAttitudeError("euler rate transform singular: |cos(theta)| < 1e-6");
    const double tth = sth / cth;
    return Vec3{
        body_rates[0] + sphi * tth * body_rates[1] + cphi * tth * body_rates[2],
        cphi * body_rates[1] - sphi * body_rates[2],
        (sphi * body_rates[1] + cphi * body_rates[2]) / cth,
    };
}

struct StateDerivative {
    Vec3 position{};    // = velocity
    Vec3 attitude{};    // Euler-angle rates
    Vec3 velocity{};    // inertial acceleration
    Vec3 body_rates{};  // body angular acceleration
};

/// Rigid-body quadrotor ODE right-hand side. Translational model: gravity
/// down inertial z, thrust along body z rotated to the inertial frame,
/// per-axis linear drag. Rotational model: full Euler rigid-body equation
/// nudot = I^-1 (tau - nu x I nu) for diagonal inertia.
inline StateDerivative state_derivative(const State& s, const ControlInput& u,
                                        const DroneParams& p) {
    StateDerivative d;
    d.position = s.velocity;
    d.attitude = body_rate_to_euler(s.attitude, s.body_rates);

    const Mat3 r = euler_to_rotation(s.attitude);
    const double t_over_m = u.thrust / p.mass;
    d.velocity = Vec3{
        t_over_m * r[0][2] - (p.linear_drag[0] / p.mass) * s.velocity[0],
        t_over_m * r[1][2] - (p.linear_drag[1] / p.mass) * s.velocity[1],
        -p.gravity + t_over_m * r[2][2] - (p.linear_drag[2] / p.mass) * s.velocity[2],
    };

    const double pr = s.body_rates[0], qr = s.body_rates[1], rr = s.body_rates[2];
    const double ixx = p.inertia[0], iyy = p.inertia[1], izz = p.inertia[2];
    d.body_rates = Vec3{
        (u.torque[0] - qr * rr * (izz - iyy)) / ixx,
        (u.torque[1] - pr * rr * (ixx - izz)) / iyy,
        (u.torque[2] - pr * qr * (iyy - ixx)) / izz,
    };
    return d;
}

namespace detail {

inline State axpy(const State& s, const StateDerivative& d, double h) {
    State out;
    for (int i = 0; i < 3; ++i) {
        out.position[i] = s.position[i] + h * d.position[i];
        out.attitude[i] = s.attitude[i] + h * d.attitude[i];
        out.velocity[i] = s.velocity[i] + h * d.velocity[i];
        out.body_rates[i] = s.body_rates[i] + h * d.body_rates[i];
    }
    return out;
}

}  // namespace detail

/// Classical RK4 step with the control held constant over the step.
inline State rk4_step(const State& s, const ControlInput& u, const DroneParams& p,
                      double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    const StateDerivative k1 = state_derivative(s, u, p);
    const StateDerivative k2 = state_derivative(detail::axpy(s, k1, dt / 2.0), u, p);
    const StateDerivative k3 = state_derivative(detail::axpy(s, k2, dt / 2.0), u, p);
    const StateDerivative k4 = state_derivative(detail::axpy(s, k3, dt), u, p);

    State out = s;
    for (int i = 0; i < 3; ++i) {
        out.position[i] += dt / 6.0 * (k1.position[i] + 2 * k2.position[i] + 2 * k3.position[i] + k4.position[i]);
        out.attitude[i] += dt / 6.0 * (k1.attitude[i] + 2 * k2.attitude[i] + 2 * k3.attitude[i] + k4.attitude[i]);
        out.velocity[i] += dt / 6.0 * (k1.velocity[i] + 2 * k2.velocity[i] + 2 * k3.velocity[i] + k4.velocity[i]);
        out.body_rates[i] += dt / 6.0 * (k1.body_rates[i] + 2 * k2.body_rates[i] + 2 * k3.body_rates[i] + k4.body_rates[i]);
    }
    if (!out.finite()) throw DivergedStateError("rk4_step produced a non-finite state");
    return out;
}

/// Forward allocation: squared rotor speeds to (thrust, torques),
/// plus-configuration.
inline ControlInput forward_allocation(const RotorCommand& cmd, const DroneParams& p) {
    const auto& w = cmd.omega_sq;
    ControlInput u;
    u.thrust = p.thrust_coeff * (w[0] + w[1] + w[2] + w[3]);
    u.torque[0] = p.arm_length * p.thrust_coeff * (w[3] - w[1]);
    u.torque[1] = p.arm_length * p.thrust_coeff * (w[2] - w[0]);
    u.torque[2] = p.drag_coeff * (w[0] - w[1] + w[2] - w[3]);
    return u;
}

/// Inverts the allocation map. Throws when the requested input is not
/// realizable with nonnegative squared speeds.
inline RotorCommand mix_rotors(const ControlInput& u, const DroneParams& p) {
    const double base = u.thrust / (4.0 * p.thrust_coeff);
    const double roll = u.torque[0] / (2.0 * p.arm_length * p.thrust_coeff);
    const double pitch = u.torque[1] / (2.0 * p.arm_length * p.thrust_coeff);
    const double yaw = u.torque[2] / (4.0 * p.drag_coeff);
    RotorCommand cmd;
    cmd.omega_sq = {base - pitch + yaw, base - roll - yaw,
                    base + pitch + yaw, base + roll - yaw};
    for (double w : cmd.omega_sq)
        if (w < 0.0)
            throw InfeasibleCommandError("mix_rotors: control input requires negative omega^2");
    return cmd;
}

}  // namespace quadtune
