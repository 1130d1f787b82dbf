#pragma once

// Tracking-quality summaries over a session log.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "omniteleop/error.hpp"
#include "omniteleop/geometry.hpp"
#include "omniteleop/session.hpp"

namespace omniteleop {

struct ErrorStats {
    double max = 0.0;
    double mean = 0.0;
};

struct Metrics {
    std::size_t samples = 0;
    std::vector<double> position_error; // |robot - command| per record [m]
    std::vector<double> attitude_error; // angle(robot, hand) per record [rad]
    ErrorStats position;
    ErrorStats attitude;
    std::optional<int> tracking_lag_ticks;   // robot behind command
    std::optional<double> hand_command_lag_s; // command behind hand
    double mean_input_latency_s = 0.0;        // tick time minus applied frame stamp
};

namespace detail {

inline ErrorStats stats_of(const std::vector<double>& v) {
    ErrorStats s;
    double sum = 0.0;
    for (double e : v) {
        s.max = std::max(s.max, e);
        sum += e;
    }
    s.mean = v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    return s;
}

inline double component(const Vec3& v, int axis) { return axis == 0 ? v.x : (axis == 1 ? v.y : v.z); }

} // namespace detail

/// Lag (in samples, 0..max_lag) maximizing the normalized cross-correlation of
/// delayed[i + lag] against reference[i], pooled over the three axes. Empty if
/// neither signal varies. Ties resolve to the smaller lag.
inline std::optional<int> estimate_lag(std::span<const Vec3> reference, std::span<const Vec3> delayed, int max_lag) {
    const std::size_t n = std::min(reference.size(), delayed.size());
    if (n < 2) return std::nullopt;
    max_lag = std::clamp(max_lag, 0, static_cast<int>(n / 2));

    std::optional<int> best;
    double best_corr = -2.0;
    for (int lag = 0; lag <= max_lag; ++lag) {
        const std::size_t m = n - static_cast<std::size_t>(lag);
        double num = 0.0, den_a = 0.0, den_b = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            double mean_a = 0.0, mean_b = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                mean_a += detail::component(reference[i], axis);
                mean_b += detail::component(delayed[i + lag], axis);
            }
            mean_a /= static_cast<double>(m);
            mean_b /= static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double a = detail::component(reference[i], axis) - mean_a;
                const double b = detail::component(delayed[i + lag], axis) - mean_b;
                num += a * b;
                den_a += a * a;
                den_b += b * b;
            }
        }
        if (den_a <= 0.0 || den_b <= 0.0) continue;
        const double corr = num / std::sqrt(den_a * den_b);
        if (corr > best_corr + 1e-12) {
            best_corr = corr;
            best = lag;
        }
    }
    return best;
}

/// Hand positions resampled onto each record's tick time (zero-order hold over
/// the frame stamps seen in the log).
inline std::vector<Vec3> hand_on_tick_grid(std::span<const LogRecord> log, double tick_rate) {
    std::vector<std::pair<double, Vec3>> samples;
    for (const auto& rec : log)
        if (samples.empty() || rec.frame.t > samples.back().first) samples.emplace_back(rec.frame.t, rec.frame.hand.position);

    std::vector<Vec3> out;
    out.reserve(log.size());
    std::size_t j = 0;
    for (const auto& rec : log) {
        const double tau = static_cast<double>(rec.tick) / tick_rate;
        while (j + 1 < samples.size() && samples[j + 1].first <= tau + 1e-9) ++j;
        out.push_back(samples[j].second);
    }
    return out;
}

inline Metrics compute_metrics(std::span<const LogRecord> log, double tick_rate, double max_lag_s = 5.0) {
    if (log.empty()) throw EmptyLog();
    Metrics m;
    m.samples = log.size();
    std::vector<Vec3> command, robot;
    command.reserve(log.size());
    robot.reserve(log.size());
    double latency_sum = 0.0;
    for (const auto& rec : log) {
        m.position_error.push_back(norm(rec.robot.position - rec.command.position));
        m.attitude_error.push_back(quat_error_angle(rec.robot.orientation, rec.frame.hand.orientation));
        command.push_back(rec.command.position);
        robot.push_back(rec.robot.position);
        latency_sum += static_cast<double>(rec.tick) / tick_rate - rec.frame.t;
    }
    m.position = detail::stats_of(m.position_error);
    m.attitude = detail::stats_of(m.attitude_error);
    m.mean_input_latency_s = latency_sum / static_cast<double>(log.size());

    const int max_lag = static_cast<int>(std::lround(max_lag_s * tick_rate));
    m.tracking_lag_ticks = estimate_lag(command, robot, max_lag);
    const std::vector<Vec3> hand = hand_on_tick_grid(log, tick_rate);
    if (auto lag = estimate_lag(hand, command, max_lag)) m.hand_command_lag_s = *lag / tick_rate;
    return m;
}

} // namespace omniteleop
