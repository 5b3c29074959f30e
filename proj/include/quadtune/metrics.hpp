#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

namespace quadtune {

/// Step-response summary for one channel. Times are seconds from the
/// start of the record; absent values mean the threshold was never met.
struct StepMetrics {
    double overshoot = 0.0;
    std::optional<double> rise_time;      // 10% -> 90% of the step magnitude
    std::optional<double> settling_time;  // entry into the +/-2% band, final
    double steady_state_error = 0.0;
};

inline constexpr double kSettlingBandFraction = 0.02;

/// Computes overshoot, 10-90% rise time, 2% settling time and
/// steady-state error for a uniformly sampled channel stepping from x0
/// toward setpoint xd.
inline StepMetrics step_metrics(std::span<const double> samples, double dt, double x0,
                                double xd) {
    if (x0 == xd) throw std::invalid_argument("step_metrics: degenerate step (x0 == xd)");
    if (samples.empty()) throw std::invalid_argument("step_metrics: empty channel");
    if (!(dt > 0.0)) throw std::invalid_argument("step_metrics: dt must be positive");

    const double magnitude = std::abs(xd - x0);
    const double direction = xd > x0 ? 1.0 : -1.0;

    StepMetrics m;
    m.steady_state_error = std::abs(samples.back() - xd);

    for (double v : samples)
        m.overshoot = std::max(m.overshoot, direction * (v - xd));
    m.overshoot = std::max(m.overshoot, 0.0);

    // Progress toward the setpoint, 0 at x0 and 1 at xd; crossings are
    // linearly interpolated between samples.
    auto progress = [&](double v) { return direction * (v - x0) / magnitude; };
    auto first_crossing = [&](double level) -> std::optional<double> {
        if (progress(samples[0]) >= level) return 0.0;
        for (std::size_t k = 1; k < samples.size(); ++k) {
            const double p0 = progress(samples[k - 1]);
            const double p1 = progress(samples[k]);
            if (p1 >= level) {
                const double frac = p1 > p0 ? (level - p0) / (p1 - p0) : 1.0;
                return (static_cast<double>(k - 1) + frac) * dt;
            }
        }
        return std::nullopt;
    };
    const auto t10 = first_crossing(0.1);
    const auto t90 = first_crossing(0.9);
    if (t10 && t90) m.rise_time = *t90 - *t10;

    const double band = kSettlingBandFraction * magnitude;
    if (std::abs(samples.back() - xd) <= band) {
        std::size_t settled_from = 0;
        for (std::size_t k = samples.size(); k-- > 0;) {
            if (std::abs(samples[k] - xd) > band) {
                settled_from = k + 1;
                break;
            }
        }
        m.settling_time = static_cast<double>(settled_from) * dt;
    }
    return m;
}

}  // namespace quadtune
