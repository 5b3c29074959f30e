#pragma once

#include <algorithm>
#include <cmath>

#include "quadtune/dynamics.hpp"
#include "quadtune/types.hpp"

namespace quadtune {

/// The eight PD gains under tuning: proportional and derivative gains for
/// roll, pitch, yaw and altitude.
struct GainSet {
    double kp_phi = 0.0, kd_phi = 0.0;
    double kp_theta = 0.0, kd_theta = 0.0;
    double kp_psi = 0.0, kd_psi = 0.0;
    double kp_z = 0.0, kd_z = 0.0;

    std::array<double, 8> to_array() const {
        return {kp_phi, kd_phi, kp_theta, kd_theta, kp_psi, kd_psi, kp_z, kd_z};
    }
    static GainSet from_array(const std::array<double, 8>& a) {
        return GainSet{a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
    }
};

/// Constant regulation setpoints; desired rates are identically zero.
struct Reference {
    double z_d = 0.0;
    double phi_d = 0.0;
    double theta_d = 0.0;
    double psi_d = 0.0;
};

/// Four independent PD loops. Thrust carries a gravity feedforward and
/// tilt compensation by 1/(cos phi cos theta), clamped below at zero;
/// torques are inertia-scaled PD terms on the Euler angles, with angle
/// rates recovered from body rates via the inverse Euler-rate transform.
inline ControlInput pd_control(const State& s, const Reference& r, const GainSet& g,
                               const DroneParams& p, double thrust_ceiling = -1.0) {
    const double tilt = std::cos(s.attitude[0]) * std::cos(s.attitude[1]);
    if (std::abs(tilt) <= kSingularCosThreshold)
        throw SingularAttitudeError("pd_control: |cos(phi) cos(theta)| <= 1e-6");

    const Vec3 euler_rates = body_rate_to_euler(s.attitude, s.body_rates);

    ControlInput u;
    const double az = g.kd_z * (0.0 - s.velocity[2]) + g.kp_z * (r.z_d - s.position[2]);
    u.thrust = p.mass * (p.gravity + az) / tilt;
    u.thrust = std::max(u.thrust, 0.0);
    if (thrust_ceiling >= 0.0) u.thrust = std::min(u.thrust, thrust_ceiling);

    u.torque[0] = p.inertia[0] * (g.kd_phi * (0.0 - euler_rates[0]) + g.kp_phi * (r.phi_d - s.attitude[0]));
    u.torque[1] = p.inertia[1] * (g.kd_theta * (0.0 - euler_rates[1]) + g.kp_theta * (r.theta_d - s.attitude[1]));
    u.torque[2] = p.inertia[2] * (g.kd_psi * (0.0 - euler_rates[2]) + g.kp_psi * (r.psi_d - s.attitude[2]));
    return u;
}

}  // namespace quadtune
