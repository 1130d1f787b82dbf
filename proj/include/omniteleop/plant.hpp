#pragma once

// First-order closed-loop model of the flying robot. Position and attitude
// both relax exponentially toward the commanded pose; the step below is the
// exact solution over dt, so it is stable for any step size.

#include <cmath>

#include "omniteleop/error.hpp"
#include "omniteleop/geometry.hpp"

namespace omniteleop {

/// Target pose produced by the interaction layer.
struct PoseCommand {
    Vec3 position;
    UnitQuat orientation;

    static PoseCommand from_pose(const Pose& p) { return {p.position, p.orientation}; }
    [[nodiscard]] Pose pose() const { return {position, orientation}; }

    friend constexpr bool operator==(const PoseCommand&, const PoseCommand&) = default;
};

struct PlantParams {
    Vec3 t_p{0.8, 0.8, 0.8}; // per-axis position time constants [s]
    double t_q = 0.8;        // attitude time constant [s]

    void validate() const {
        if (!(t_p.x > 0.0 && t_p.y > 0.0 && t_p.z > 0.0) || !t_p.finite())
            throw InvalidParameter("plant t_p components must be positive");
        if (!(t_q > 0.0) || !std::isfinite(t_q)) throw InvalidParameter("plant t_q must be positive");
    }
};

struct RobotState {
    Pose pose;
    PlantParams params;
};

/// Advances the plant by dt seconds toward cmd.
inline RobotState step_plant(const RobotState& state, const PoseCommand& cmd, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw NonPositiveDt(dt);
    const Vec3& tp = state.params.t_p;
    const Vec3 decay{std::exp(-dt / tp.x), std::exp(-dt / tp.y), std::exp(-dt / tp.z)};
    const Vec3& p = state.pose.position;
    const Vec3& pc = cmd.position;

    RobotState next = state;
    next.pose.position = pc + hadamard(p - pc, decay);
    const double alpha = 1.0 - std::exp(-dt / state.params.t_q);
    next.pose.orientation = slerp(state.pose.orientation, cmd.orientation, alpha);
    return next;
}

} // namespace omniteleop
