#pragma once

// Mode-switch state machine and the operator-facing mode display.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "omniteleop/error.hpp"
#include "omniteleop/gestures.hpp"
#include "omniteleop/interaction.hpp"

namespace omniteleop {

enum class ModeId { Operation, Locking, Spherical, Cartesian };

inline constexpr std::array<ModeId, 4> kAllModes{ModeId::Operation, ModeId::Locking, ModeId::Spherical,
                                                 ModeId::Cartesian};

inline std::string_view mode_name(ModeId m) {
    switch (m) {
    case ModeId::Operation: return "Operation";
    case ModeId::Locking: return "Locking";
    case ModeId::Spherical: return "Spherical";
    case ModeId::Cartesian: return "Cartesian";
    }
    return "?";
}

/// Case-insensitive lookup of a mode by name.
inline std::optional<ModeId> mode_from_name(std::string_view name) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (char& c : out) c = static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
        return out;
    };
    const std::string key = lower(name);
    for (ModeId m : kAllModes)
        if (lower(mode_name(m)) == key) return m;
    return std::nullopt;
}

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

/// One display color per mode, indexed by ModeId.
struct FeedbackPalette {
    std::array<Rgb, 4> colors{{{46, 204, 64}, {255, 65, 54}, {0, 116, 217}, {255, 133, 27}}};

    [[nodiscard]] Rgb of(ModeId m) const { return colors[static_cast<std::size_t>(m)]; }

    void validate() const {
        for (std::size_t i = 0; i < colors.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (colors[i] == colors[j]) throw InvalidConfig("feedback colors must differ between modes");
    }
};

struct FeedbackState {
    std::string mode_name;
    Rgb color;
    friend bool operator==(const FeedbackState&, const FeedbackState&) = default;
};

struct InteractionParams {
    Vec3 k{1.0, 1.0, 1.0};
    SphericalParams spherical;
    CartesianParams cartesian;
    HeightOverride height;

    void validate() const {
        validate_scaling(k);
        spherical.validate();
        cartesian.validate();
        if (!std::isfinite(height.z_offset)) throw InvalidParameter("height z_offset must be finite");
    }
};

struct SupervisorConfig {
    InteractionParams interaction;
    std::map<GestureId, ModeId> bindings; // gestures without a binding are ignored
    FeedbackPalette palette;

    static SupervisorConfig defaults() {
        SupervisorConfig cfg;
        cfg.bindings = {{{"fist"}, ModeId::Locking},
                        {{"open"}, ModeId::Operation},
                        {{"point"}, ModeId::Spherical},
                        {{"two"}, ModeId::Cartesian}};
        return cfg;
    }
};

struct ModeState {
    ModeId active = ModeId::Operation;
    std::optional<OperationState> operation;
    std::optional<LockState> lock;
    std::optional<SphericalState> spherical;
    std::optional<CartesianParams> cartesian;
    PoseCommand last_command; // held when the active mode cannot produce a command
};

struct SupervisorStep {
    ModeState state;
    PoseCommand command;
    bool switched = false;
};

namespace detail {

inline ModeState enter_mode(ModeId mode, const Pose& robot, const OperatorFrame& frame,
                            const InteractionParams& params, const PoseCommand& last) {
    ModeState ms;
    ms.active = mode;
    ms.last_command = last;
    switch (mode) {
    case ModeId::Operation: ms.operation = operation_enter(robot, frame, params.k); break;
    case ModeId::Locking: ms.lock = lock_enter(robot); break;
    case ModeId::Spherical: ms.spherical = spherical_enter(robot, frame, params.spherical); break;
    case ModeId::Cartesian: ms.cartesian = params.cartesian; break;
    }
    return ms;
}

} // namespace detail

/// Entry point of the state machine; always starts in Operation.
inline ModeState supervisor_init(const Pose& robot, const OperatorFrame& frame, const InteractionParams& params) {
    return detail::enter_mode(ModeId::Operation, robot, frame, params, PoseCommand::from_pose(robot));
}

/// Applies a pending switch (anchors captured now), then runs the active mode.
inline SupervisorStep supervisor_step(const ModeState& ms, const std::optional<ModeSwitchEvent>& ev, const Pose& robot,
                                      const OperatorFrame& frame, const SupervisorConfig& cfg) {
    SupervisorStep out{ms, ms.last_command, false};
    if (ev) {
        if (auto it = cfg.bindings.find(ev->gesture); it != cfg.bindings.end() && it->second != ms.active) {
            out.state = detail::enter_mode(it->second, robot, frame, cfg.interaction, ms.last_command);
            out.switched = true;
        }
    }

    ModeState& s = out.state;
    PoseCommand cmd;
    switch (s.active) {
    case ModeId::Operation: cmd = operation_update(*s.operation, frame); break;
    case ModeId::Locking: cmd = lock_update(*s.lock); break;
    case ModeId::Spherical:
        try {
            auto [c, next] = spherical_update(*s.spherical, frame);
            s.spherical = next;
            cmd = c;
        } catch (const DegenerateDirection&) {
            out.command = s.last_command;
            return out;
        }
        break;
    case ModeId::Cartesian: cmd = cartesian_update(*s.cartesian, robot.position, frame); break;
    }
    if (s.active != ModeId::Locking) cmd = apply_height_override(cmd, frame, cfg.interaction.height);
    s.last_command = cmd;
    out.command = cmd;
    return out;
}

inline FeedbackState feedback_of(const ModeState& ms, const FeedbackPalette& palette = {}) {
    return {std::string(mode_name(ms.active)), palette.of(ms.active)};
}

} // namespace omniteleop
