#pragma once

// The four hand-based interaction modes. Each mode is a pure function from
// (mode state, operator frame) to a pose command; the supervisor owns the
// state and decides which mode runs.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "omniteleop/error.hpp"
#include "omniteleop/geometry.hpp"
#include "omniteleop/plant.hpp"

namespace omniteleop {

/// One timestamped operator sample.
struct OperatorFrame {
    double t = 0.0;
    Pose hand;
    Vec3 shoulder;
    std::vector<double> knuckles; // raw glove stretch channels

    friend bool operator==(const OperatorFrame&, const OperatorFrame&) = default;
};

// ---------------------------------------------------------------- Operation

struct OperationState {
    Pose robot_anchor;
    Vec3 hand_anchor_pos;
    Vec3 k{1.0, 1.0, 1.0};
};

inline void validate_scaling(const Vec3& k) {
    for (double ki : {k.x, k.y, k.z})
        if (!(ki >= 0.0 && ki <= 1.0)) throw InvalidParameter("operation scaling k must satisfy 0 <= k_i <= 1");
}

/// Captures the anchors at mode entry.
inline OperationState operation_enter(const Pose& robot, const OperatorFrame& frame, const Vec3& k) {
    validate_scaling(k);
    return {robot, frame.hand.position, k};
}

/// Relative position mapping scaled per axis; hand attitude passed through unscaled.
inline PoseCommand operation_update(const OperationState& s, const OperatorFrame& frame) {
    return {s.robot_anchor.position + hadamard(s.k, frame.hand.position - s.hand_anchor_pos), frame.hand.orientation};
}

// ------------------------------------------------------------------ Locking

struct LockState {
    Pose locked;
};

inline LockState lock_enter(const Pose& robot) { return {robot}; }
inline PoseCommand lock_update(const LockState& s) { return PoseCommand::from_pose(s.locked); }

// ---------------------------------------------------------------- Spherical

struct SphericalParams {
    double r_min = 0.5;    // m
    double r_max = 5.0;    // m
    double d_min = 0.25;   // hand-shoulder distance below which r shrinks [m]
    double d_max = 0.45;   // hand-shoulder distance above which r grows [m]
    double delta_r = 0.01; // m per tick

    void validate() const {
        if (!(r_min > 0.0 && r_min <= r_max && std::isfinite(r_max)))
            throw InvalidParameter("spherical limits must satisfy 0 < r_min <= r_max");
        if (!(d_min > 0.0 && d_min < d_max && std::isfinite(d_max)))
            throw InvalidParameter("spherical thresholds must satisfy 0 < d_min < d_max");
        if (!(delta_r > 0.0) || !std::isfinite(delta_r)) throw InvalidParameter("spherical delta_r must be positive");
    }
};

struct SphericalState {
    double r = 1.0;
    SphericalParams params;
};

/// Starts the radius at the robot's current shoulder distance so entry causes no jump.
inline SphericalState spherical_enter(const Pose& robot, const OperatorFrame& frame, const SphericalParams& params) {
    params.validate();
    const double r = norm(robot.position - frame.shoulder);
    return {std::max(std::min(r, params.r_max), params.r_min), params};
}

/// One pass of the radial update. Throws DegenerateDirection if the hand sits on the shoulder.
inline std::pair<PoseCommand, SphericalState> spherical_update(const SphericalState& s, const OperatorFrame& frame) {
    const Vec3 to_hand = frame.hand.position - frame.shoulder;
    const Vec3 dir = normalize(to_hand);
    const double dist = norm(to_hand);
    const SphericalParams& p = s.params;

    SphericalState next = s;
    if (dist < p.d_min)
        next.r = next.r - p.delta_r;
    else if (dist > p.d_max)
        next.r = next.r + p.delta_r;
    next.r = std::max(std::min(next.r, p.r_max), p.r_min);
    return {PoseCommand{frame.shoulder + next.r * dir, frame.hand.orientation}, next};
}

// ---------------------------------------------------------------- Cartesian

struct CartesianParams {
    Vec3 origin_offset{0.3, 0.0, 0.0}; // joystick origin relative to the shoulder, world axes [m]
    double d_threshold = 0.15;         // stop-zone radius [m]
    double delta_d = 0.02;             // m per tick

    void validate() const {
        if (!origin_offset.finite()) throw InvalidParameter("cartesian origin_offset must be finite");
        if (!(d_threshold > kDirectionEpsilon) || !std::isfinite(d_threshold))
            throw InvalidParameter("cartesian d_threshold must exceed 1e-6 m");
        if (!(delta_d > 0.0) || !std::isfinite(delta_d)) throw InvalidParameter("cartesian delta_d must be positive");
    }
};

inline Vec3 cartesian_origin(const CartesianParams& p, const Vec3& shoulder) { return shoulder + p.origin_offset; }

/// Joystick-style step: move delta_d along origin->hand once the hand leaves the stop zone.
inline PoseCommand cartesian_update(const CartesianParams& p, const Vec3& robot_pos, const OperatorFrame& frame) {
    const Vec3 d = frame.hand.position - cartesian_origin(p, frame.shoulder);
    if (norm(d) > p.d_threshold) return {robot_pos + p.delta_d * normalize(d), frame.hand.orientation};
    return {robot_pos, frame.hand.orientation};
}

// ----------------------------------------------------------- Height override

struct HeightOverride {
    bool enabled = false;
    double z_offset = 0.0;
};

/// Replaces the commanded altitude with the hand height when enabled.
inline PoseCommand apply_height_override(PoseCommand cmd, const OperatorFrame& frame, const HeightOverride& h) {
    if (h.enabled) cmd.position.z = frame.hand.position.z + h.z_offset;
    return cmd;
}

} // namespace omniteleop
