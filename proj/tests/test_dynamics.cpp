#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "quadtune/dynamics.hpp"
#include "quadtune/rng.hpp"

using namespace quadtune;

namespace {

Mat3 transpose_times(const Mat3& r) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += r[k][i] * r[k][j];
    return out;
}

double determinant(const Mat3& r) {
    return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

DroneParams zero_drag_params() {
    DroneParams p;
    p.linear_drag = {0.0, 0.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("euler_to_rotation at zero attitude is the identity") {
    const Mat3 r = euler_to_rotation({0.0, 0.0, 0.0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(r[i][j] == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-15));
}

TEST_CASE("pure yaw by pi/2 maps body x to inertial y") {
    const Mat3 r = euler_to_rotation({0.0, 0.0, M_PI / 2.0});
    // First column is the image of the body x axis.
    CHECK(r[0][0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(r[1][0] == Catch::Approx(1.0).margin(1e-15));
    CHECK(r[2][0] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("rotation is orthonormal with unit determinant") {
    const Mat3 r = euler_to_rotation({0.3, -0.2, 0.9});
    const Mat3 rtr = transpose_times(r);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(rtr[i][j] == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    CHECK(determinant(r) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rotation orthonormality over 1000 random attitudes") {
    Rng rng(42);
    for (int n = 0; n < 1000; ++n) {
        const Vec3 att{rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4),
                       rng.uniform(-M_PI, M_PI)};
        const Mat3 r = euler_to_rotation(att);
        const Mat3 rtr = transpose_times(r);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(rtr[i][j] == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
        REQUIRE(determinant(r) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("euler rate transform is identity at zero attitude") {
    const Vec3 rates = euler_rate_to_body({0.0, 0.0, 0.0}, {0.1, -0.2, 0.3});
    CHECK(rates[0] == Catch::Approx(0.1).margin(1e-15));
    CHECK(rates[1] == Catch::Approx(-0.2).margin(1e-15));
    CHECK(rates[2] == Catch::Approx(0.3).margin(1e-15));
}

TEST_CASE("zero euler rates map to zero body rates") {
    const Vec3 rates = euler_rate_to_body({0.4, 0.5, -1.0}, {0.0, 0.0, 0.0});
    for (double v : rates) CHECK(v == 0.0);
}

TEST_CASE("euler rate transform round-trips through its inverse") {
    const Vec3 att{0.4, 0.5, -1.0};
    const Vec3 body{0.7, -0.3, 0.25};
    const Vec3 euler = body_rate_to_euler(att, body);
    const Vec3 back = euler_rate_to_body(att, euler);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == Catch::Approx(body[i]).margin(1e-12));
}

TEST_CASE("euler rate transform throws near gimbal lock") {
    CHECK_THROWS_AS(euler_rate_to_body({0.0, M_PI / 2.0, 0.0}, {1.0, 0.0, 0.0}),
                    SingularAttitudeError);
    CHECK_THROWS_AS(body_rate_to_euler({0.0, M_PI / 2.0, 0.0}, {1.0, 0.0, 0.0}),
                    SingularAttitudeError);
}

TEST_CASE("hover is an equilibrium of the dynamics") {
    DroneParams p;
    State s;
    ControlInput u;
    u.thrust = p.mass * p.gravity;
    const StateDerivative d = state_derivative(s, u, p);
    for (const auto* v : {&d.position, &d.attitude, &d.velocity, &d.body_rates})
        for (double c : *v) CHECK(std::abs(c) <= 1e-12);
}

TEST_CASE("free fall accelerates at -g only") {
    const DroneParams p = zero_drag_params();
    State s;
    const StateDerivative d = state_derivative(s, ControlInput{}, p);
    CHECK(d.velocity[0] == 0.0);
    CHECK(d.velocity[1] == 0.0);
    CHECK(d.velocity[2] == Catch::Approx(-p.gravity).margin(1e-15));
    for (double c : d.body_rates) CHECK(c == 0.0);
}

TEST_CASE("pure yaw torque at rest gives psi_ddot = tau/Izz") {
    DroneParams p;
    State s;
    ControlInput u;
    u.thrust = p.mass * p.gravity;
    u.torque = {0.0, 0.0, 0.004};
    const StateDerivative d = state_derivative(s, u, p);
    CHECK(d.body_rates[2] == Catch::Approx(0.004 / p.inertia[2]).margin(1e-15));
    CHECK(d.body_rates[0] == 0.0);
    CHECK(d.body_rates[1] == 0.0);
}

TEST_CASE("torque-free spin about body z keeps r constant") {
    // Diagonal inertia, p = q = 0: the gyroscopic terms vanish on every axis.
    DroneParams p;
    State s;
    s.body_rates = {0.0, 0.0, 3.0};
    ControlInput u;
    u.thrust = p.mass * p.gravity;
    for (int k = 0; k < 200; ++k) s = rk4_step(s, u, p, 0.01);
    CHECK(s.body_rates[2] == Catch::Approx(3.0).margin(1e-12));
    CHECK(std::abs(s.body_rates[0]) <= 1e-12);
    CHECK(std::abs(s.body_rates[1]) <= 1e-12);
}

TEST_CASE("rk4 free fall matches the ballistic solution") {
    const DroneParams p = zero_drag_params();
    State s;
    for (int k = 0; k < 100; ++k) s = rk4_step(s, ControlInput{}, p, 0.01);
    CHECK(s.position[2] == Catch::Approx(-0.5 * p.gravity).margin(1e-9));
    CHECK(s.velocity[2] == Catch::Approx(-p.gravity).margin(1e-9));
}

TEST_CASE("hover input is a fixed point of rk4") {
    DroneParams p;
    State s;
    s.position = {1.0, 2.0, 3.0};
    ControlInput u;
    u.thrust = p.mass * p.gravity;
    const State next = rk4_step(s, u, p, 0.01);
    for (int i = 0; i < 3; ++i) {
        CHECK(next.position[i] == Catch::Approx(s.position[i]).margin(1e-12));
        CHECK(std::abs(next.velocity[i]) <= 1e-12);
        CHECK(std::abs(next.attitude[i]) <= 1e-12);
        CHECK(std::abs(next.body_rates[i]) <= 1e-12);
    }
}

TEST_CASE("rk4 shows 4th-order convergence on free fall with drag") {
    DroneParams p;
    const double a = p.linear_drag[2] / p.mass;
    const double vt = p.mass * p.gravity / p.linear_drag[2];
    // Analytic: z(t) = -vt*t + (vt/a)(1 - exp(-a t)), from rest, thrust 0.
    auto analytic_z = [&](double t) { return -vt * t + vt / a * (1.0 - std::exp(-a * t)); };

    auto global_error = [&](double dt) {
        State s;
        const int steps = static_cast<int>(std::round(1.0 / dt));
        for (int k = 0; k < steps; ++k) s = rk4_step(s, ControlInput{}, p, dt);
        return std::abs(s.position[2] - analytic_z(1.0));
    };

    const double e_coarse = global_error(0.2);
    const double e_fine = global_error(0.1);
    const double ratio = e_coarse / e_fine;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("rk4 rejects nonpositive dt") {
    DroneParams p;
    CHECK_THROWS_AS(rk4_step(State{}, ControlInput{}, p, 0.0), std::invalid_argument);
}

TEST_CASE("symmetric hover thrust splits equally across rotors") {
    DroneParams p;
    ControlInput u;
    u.thrust = 4.0 * p.thrust_coeff;
    const RotorCommand cmd = mix_rotors(u, p);
    for (double w : cmd.omega_sq) CHECK(w == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("zero torque implies equal rotor speeds") {
    DroneParams p;
    ControlInput u;
    u.thrust = 3.7;
    const RotorCommand cmd = mix_rotors(u, p);
    for (double w : cmd.omega_sq) CHECK(w == Catch::Approx(cmd.omega_sq[0]).margin(1e-12));
}

TEST_CASE("rotor mix round-trips through the forward allocation") {
    DroneParams p;
    Rng rng(7);
    for (int n = 0; n < 200; ++n) {
        RotorCommand feasible;
        for (double& w : feasible.omega_sq) w = rng.uniform(0.0, 1e6);
        const ControlInput u = forward_allocation(feasible, p);
        const ControlInput back = forward_allocation(mix_rotors(u, p), p);
        REQUIRE(back.thrust == Catch::Approx(u.thrust).margin(1e-9));
        for (int i = 0; i < 3; ++i)
            REQUIRE(back.torque[i] == Catch::Approx(u.torque[i]).margin(1e-9));
    }
}

TEST_CASE("infeasible control input is rejected") {
    DroneParams p;
    ControlInput u;
    u.thrust = 0.01;
    u.torque = {0.0, 0.0, 1.0};  // yaw torque far beyond what the thrust allows
    CHECK_THROWS_AS(mix_rotors(u, p), InfeasibleCommandError);
}
