#pragma once

// Wire schema shared by the datagram input and the cockpit stream.
//
// Input frame (one JSON object per datagram or per line):
//   {"schema_version":1,"t":<s>,"hand_pos":[x,y,z],"hand_quat":[w,x,y,z],
//    "shoulder_pos":[x,y,z],"knuckles":[...]}
// Stream lines may also carry "type":"frame". Outbound lines are StateMsg
// objects with "type":"state".

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omniteleop/jsonio.hpp"
#include "omniteleop/session.hpp"

namespace omniteleop {

inline constexpr int kSchemaVersion = 1;

struct InputFrameMsg {
    int schema_version = kSchemaVersion;
    double t = 0.0;
    std::array<double, 3> hand_pos{};
    std::array<double, 4> hand_quat{1.0, 0.0, 0.0, 0.0};
    std::array<double, 3> shoulder_pos{};
    std::vector<double> knuckles;

    friend bool operator==(const InputFrameMsg&, const InputFrameMsg&) = default;
};

/// Parses one input frame. Any quaternion with norm > 1e-6 is renormalized and
/// put in the w >= 0 hemisphere.
inline InputFrameMsg decode_input(std::string_view bytes) {
    jsonio::Json j;
    try {
        j = jsonio::Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFrame(std::string("unparseable frame: ") + e.what());
    }
    if (!j.is_object()) throw MalformedFrame("frame must be a JSON object");
    if (auto it = j.find("type"); it != j.end() && (!it->is_string() || it->get<std::string>() != "frame"))
        throw MalformedFrame("not a frame message");
    auto version = j.find("schema_version");
    if (version == j.end() || !version->is_number_integer()) throw MalformedFrame("missing schema_version");
    if (version->get<int>() != kSchemaVersion) throw VersionMismatch(version->get<int>());

    const OperatorFrame f = jsonio::read_frame(j);
    InputFrameMsg m;
    m.t = f.t;
    m.hand_pos = {f.hand.position.x, f.hand.position.y, f.hand.position.z};
    m.hand_quat = {f.hand.orientation.w(), f.hand.orientation.x(), f.hand.orientation.y(), f.hand.orientation.z()};
    m.shoulder_pos = {f.shoulder.x, f.shoulder.y, f.shoulder.z};
    m.knuckles = f.knuckles;
    return m;
}

inline jsonio::Json input_to_json(const InputFrameMsg& m) {
    return jsonio::Json{{"schema_version", m.schema_version}, {"t", m.t},           {"hand_pos", m.hand_pos},
                        {"hand_quat", m.hand_quat},           {"shoulder_pos", m.shoulder_pos},
                        {"knuckles", m.knuckles}};
}

inline std::string encode_input(const InputFrameMsg& m) { return input_to_json(m).dump(); }

inline OperatorFrame to_frame(const InputFrameMsg& m) {
    OperatorFrame f;
    f.t = m.t;
    f.hand.position = {m.hand_pos[0], m.hand_pos[1], m.hand_pos[2]};
    f.hand.orientation = UnitQuat::from_components(m.hand_quat[0], m.hand_quat[1], m.hand_quat[2], m.hand_quat[3]);
    f.shoulder = {m.shoulder_pos[0], m.shoulder_pos[1], m.shoulder_pos[2]};
    f.knuckles = m.knuckles;
    return f;
}

inline InputFrameMsg from_frame(const OperatorFrame& f) {
    const UnitQuat q = f.hand.orientation.canonical();
    InputFrameMsg m;
    m.t = f.t;
    m.hand_pos = {f.hand.position.x, f.hand.position.y, f.hand.position.z};
    m.hand_quat = {q.w(), q.x(), q.y(), q.z()};
    m.shoulder_pos = {f.shoulder.x, f.shoulder.y, f.shoulder.z};
    m.knuckles = f.knuckles;
    return m;
}

/// State broadcast to cockpit subscribers once per tick.
struct StateMsg {
    std::int64_t tick = 0;
    double t = 0.0;
    Pose robot;
    Pose command;
    std::string mode_name;
    Rgb color;
    Pose hand;
    Vec3 shoulder;
    std::optional<std::string> gesture;
    std::optional<double> r;
    double r_min = 0.0, r_max = 0.0, d_min = 0.0, d_max = 0.0;
    Vec3 p_j;
    double d_threshold = 0.0;
};

inline StateMsg make_state_msg(const Snapshot& s) {
    StateMsg m;
    m.tick = s.tick;
    m.t = s.t;
    m.robot = s.robot;
    m.command = s.command.pose();
    m.mode_name = s.feedback.mode_name;
    m.color = s.feedback.color;
    m.hand = s.hand;
    m.shoulder = s.shoulder;
    m.gesture = s.gesture;
    m.r = s.zones.r;
    m.r_min = s.zones.spherical.r_min;
    m.r_max = s.zones.spherical.r_max;
    m.d_min = s.zones.spherical.d_min;
    m.d_max = s.zones.spherical.d_max;
    m.p_j = s.zones.cartesian_origin;
    m.d_threshold = s.zones.d_threshold;
    return m;
}

inline std::string encode_state(const StateMsg& m) {
    using jsonio::Json;
    Json zones{{"r", m.r ? Json(*m.r) : Json(nullptr)},
               {"r_min", m.r_min},
               {"r_max", m.r_max},
               {"d_min", m.d_min},
               {"d_max", m.d_max},
               {"p_j", jsonio::vec(m.p_j)},
               {"d_threshold", m.d_threshold}};
    Json j{{"type", "state"},
           {"tick", m.tick},
           {"t", m.t},
           {"robot", jsonio::pose(m.robot)},
           {"command", jsonio::pose(m.command)},
           {"mode_name", m.mode_name},
           {"color", Json::array({m.color.r, m.color.g, m.color.b})},
           {"hand", jsonio::pose(m.hand)},
           {"shoulder", jsonio::vec(m.shoulder)},
           {"gesture", m.gesture ? Json(*m.gesture) : Json(nullptr)},
           {"zones", zones}};
    return j.dump();
}

} // namespace omniteleop
