#pragma once

// JSON encoding of domain values. Quaternions are written scalar-first and
// canonicalized to w >= 0; doubles round-trip exactly.

#include <array>
#include <string>

#include <json.hpp>

#include "omniteleop/error.hpp"
#include "omniteleop/geometry.hpp"
#include "omniteleop/metrics.hpp"
#include "omniteleop/session.hpp"

namespace omniteleop::jsonio {

using Json = nlohmann::ordered_json;

inline Json vec(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

inline Json quat(const UnitQuat& q) {
    const UnitQuat c = q.canonical();
    return Json::array({c.w(), c.x(), c.y(), c.z()});
}

inline Json pose(const Pose& p) { return Json{{"position", vec(p.position)}, {"orientation", quat(p.orientation)}}; }
inline Json pose(const PoseCommand& p) { return pose(p.pose()); }

template <std::size_t N>
std::array<double, N> read_array(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != N)
        throw MalformedFrame(std::string(what) + ": expected array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j[i].is_number()) throw MalformedFrame(std::string(what) + ": non-numeric element");
        out[i] = j[i].get<double>();
        if (!std::isfinite(out[i])) throw MalformedFrame(std::string(what) + ": non-finite element");
    }
    return out;
}

inline Vec3 read_vec(const Json& j, const char* what) {
    const auto a = read_array<3>(j, what);
    return {a[0], a[1], a[2]};
}

inline UnitQuat read_quat(const Json& j, const char* what) {
    const auto a = read_array<4>(j, what);
    const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
    if (!(n > 1e-6)) throw MalformedFrame(std::string(what) + ": degenerate quaternion");
    return UnitQuat::from_components(a[0], a[1], a[2], a[3]).canonical();
}

inline Pose read_pose(const Json& j, const char* what) {
    if (!j.is_object()) throw MalformedFrame(std::string(what) + ": expected object");
    return {read_vec(j.at("position"), what), read_quat(j.at("orientation"), what)};
}

inline Json frame(const OperatorFrame& f) {
    return Json{{"t", f.t},
                {"hand_pos", vec(f.hand.position)},
                {"hand_quat", quat(f.hand.orientation)},
                {"shoulder_pos", vec(f.shoulder)},
                {"knuckles", f.knuckles}};
}

inline OperatorFrame read_frame(const Json& j) {
    if (!j.is_object()) throw MalformedFrame("frame: expected object");
    for (const char* key : {"t", "hand_pos", "hand_quat", "shoulder_pos", "knuckles"})
        if (!j.contains(key)) throw MalformedFrame(std::string("frame: missing field '") + key + "'");
    OperatorFrame f;
    if (!j["t"].is_number()) throw MalformedFrame("frame: t must be a number");
    f.t = j["t"].get<double>();
    if (!std::isfinite(f.t)) throw MalformedFrame("frame: t must be finite");
    f.hand.position = read_vec(j["hand_pos"], "hand_pos");
    f.hand.orientation = read_quat(j["hand_quat"], "hand_quat");
    f.shoulder = read_vec(j["shoulder_pos"], "shoulder_pos");
    const Json& k = j["knuckles"];
    if (!k.is_array()) throw MalformedFrame("knuckles: expected array");
    for (const auto& v : k) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) throw MalformedFrame("knuckles: non-finite element");
        f.knuckles.push_back(v.get<double>());
    }
    return f;
}

inline Json record(const LogRecord& r) {
    return Json{{"tick", r.tick},
                {"frame", frame(r.frame)},
                {"mode", std::string(mode_name(r.mode))},
                {"command", pose(r.command)},
                {"robot", pose(r.robot)}};
}

inline LogRecord read_record(const Json& j) {
    LogRecord r;
    try {
        r.tick = j.at("tick").get<std::int64_t>();
        r.frame = read_frame(j.at("frame"));
        const auto mode = mode_from_name(j.at("mode").get<std::string>());
        if (!mode) throw MalformedFrame("record: unknown mode");
        r.mode = *mode;
        const Pose c = read_pose(j.at("command"), "command");
        r.command = PoseCommand::from_pose(c);
        r.robot = read_pose(j.at("robot"), "robot");
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFrame(std::string("record: ") + e.what());
    }
    return r;
}

inline Json summary(const SessionSummary& s) {
    return Json{{"ticks", s.ticks},
                {"records", s.records},
                {"frames_received", s.frames_received},
                {"frames_applied", s.frames_applied},
                {"frames_superseded", s.frames_superseded},
                {"frames_out_of_order", s.frames_out_of_order},
                {"gap_ticks", s.gap_ticks},
                {"gap_detected", s.gap_detected},
                {"mode_switches", s.mode_switches},
                {"stop_reason", s.stop_reason}};
}

inline Json metrics(const Metrics& m) {
    Json j{{"samples", m.samples},
           {"position_error", {{"max", m.position.max}, {"mean", m.position.mean}}},
           {"attitude_error", {{"max", m.attitude.max}, {"mean", m.attitude.mean}}}};
    j["tracking_lag_ticks"] = m.tracking_lag_ticks ? Json(*m.tracking_lag_ticks) : Json(nullptr);
    j["hand_command_lag_s"] = m.hand_command_lag_s ? Json(*m.hand_command_lag_s) : Json(nullptr);
    j["mean_input_latency_s"] = m.mean_input_latency_s;
    return j;
}

} // namespace omniteleop::jsonio
