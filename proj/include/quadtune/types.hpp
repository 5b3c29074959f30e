#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace quadtune {

using Vec3 = std::array<double, 3>;

/// 12-component rigid-body state: inertial position, Euler attitude
/// (roll phi, pitch theta, yaw psi), inertial linear velocity, and
/// body-frame angular velocity (p, q, r).
struct State {
    Vec3 position{0.0, 0.0, 0.0};       // x, y, z [m]
    Vec3 attitude{0.0, 0.0, 0.0};       // phi, theta, psi [rad]
    Vec3 velocity{0.0, 0.0, 0.0};       // xdot, ydot, zdot [m/s]
    Vec3 body_rates{0.0, 0.0, 0.0};     // p, q, r [rad/s]

    bool finite() const {
        for (const auto* v : {&position, &attitude, &velocity, &body_rates})
            for (double c : *v)
                if (!std::isfinite(c)) return false;
        return true;
    }
};

/// Total thrust along body z plus body-frame torques.
struct ControlInput {
    double thrust = 0.0;                 // T [N], >= 0
    Vec3 torque{0.0, 0.0, 0.0};          // tau_phi, tau_theta, tau_psi [N m]
};

/// Squared rotor speeds, plus-configuration indexing.
struct RotorCommand {
    std::array<double, 4> omega_sq{};    // [rad^2/s^2], each >= 0
};

/// Physical parameters, fixed per campaign.
struct DroneParams {
    double mass = 0.468;                 // [kg]
    Vec3 inertia{4.856e-3, 4.856e-3, 8.801e-3};  // Ixx, Iyy, Izz [kg m^2]
    double arm_length = 0.225;           // l [m]
    double thrust_coeff = 2.980e-6;      // k [N s^2/rad^2]
    double drag_coeff = 1.140e-7;        // b [N m s^2/rad^2]
    Vec3 linear_drag{0.25, 0.25, 0.25};  // Ax, Ay, Az [kg/s]
    double gravity = 9.81;               // g [m/s^2]

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
        for (double i : inertia)
            if (!(i > 0.0)) throw std::invalid_argument("inertia must be positive");
        if (!(arm_length > 0.0)) throw std::invalid_argument("arm_length must be positive");
        if (!(thrust_coeff > 0.0)) throw std::invalid_argument("thrust_coeff must be positive");
        if (!(drag_coeff > 0.0)) throw std::invalid_argument("drag_coeff must be positive");
        for (double a : linear_drag)
            if (!(a >= 0.0)) throw std::invalid_argument("linear drag must be nonnegative");
        if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be positive");
    }
};

struct SingularAttitudeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DivergedStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleCommandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace quadtune
