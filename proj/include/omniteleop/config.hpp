#pragma once

// Configuration file (JSON). Every key is optional and falls back to the
// default below; unknown keys are rejected so typos do not pass silently.
//
// {
//   "session":   {"tick_rate": 100, "latency": 0.4, "gap_timeout": 1.0, "seed": 0, "record_path": null},
//   "plant":     {"t_p": [0.8, 0.8, 0.8], "t_q": 0.8,
//                 "initial_position": [0, 0, 1], "initial_orientation": [1, 0, 0, 0]},
//   "operation": {"k": [1, 1, 1]},
//   "spherical": {"r_min": 0.5, "r_max": 5.0, "d_min": 0.25, "d_max": 0.45, "delta_r": 0.01},
//   "cartesian": {"origin_offset": [0.3, 0, 0], "d_threshold": 0.15, "delta_d": 0.02},
//   "height_override": {"enabled": false, "z_offset": 0.0},
//   "gestures":  {"contract_thresh": [0.7 x5], "extend_thresh": [0.3 x5], "hold_duration": 1.0,
//                 "channel_map": [[0], [1], [2], [3], [4]],
//                 "patterns": {"fist": ["contracted", ...5], ...},
//                 "bindings": {"fist": "locking", "open": "operation", "point": "spherical", "two": "cartesian"}},
//   "feedback":  {"colors": {"operation": [46,204,64], "locking": [255,65,54],
//                            "spherical": [0,116,217], "cartesian": [255,133,27]}},
//   "gateway":   {"udp_listen": "127.0.0.1:9870", "stream_listen": "127.0.0.1:9871",
//                 "max_subscriber_queue": 256, "restamp": true}
// }
//
// OMNITELEOP_LISTEN and OMNITELEOP_UDP_LISTEN override the gateway addresses.

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "omniteleop/jsonio.hpp"
#include "omniteleop/session.hpp"

namespace omniteleop {

struct GatewayConfig {
    std::string udp_listen = "127.0.0.1:9870";
    std::string stream_listen = "127.0.0.1:9871";
    std::size_t max_subscriber_queue = 256; // messages buffered per subscriber before it is dropped
    bool restamp = true;                    // replace sender stamps with arrival time on the session clock

    void validate() const {
        if (max_subscriber_queue == 0) throw InvalidConfig("gateway max_subscriber_queue must be positive");
        if (udp_listen.empty() || stream_listen.empty()) throw InvalidConfig("gateway listen addresses must be set");
    }
};

struct Config {
    EngineConfig engine;
    GatewayConfig gateway;

    void validate() const {
        engine.validate();
        gateway.validate();
    }
};

namespace detail {

using jsonio::Json;

inline void check_keys(const Json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw InvalidConfig("'" + section + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.contains(key)) throw InvalidConfig("unknown key '" + section + "." + key + "'");
}

inline double num(const Json& j, const std::string& name) {
    if (!j.is_number()) throw InvalidConfig("'" + name + "' must be a number");
    return j.get<double>();
}

inline Vec3 vec3(const Json& j, const std::string& name) {
    if (!j.is_array() || j.size() != 3) throw InvalidConfig("'" + name + "' must be an array of 3 numbers");
    return {num(j[0], name), num(j[1], name), num(j[2], name)};
}

inline FingerValues fingers(const Json& j, const std::string& name) {
    if (!j.is_array() || j.size() != kFingerCount) throw InvalidConfig("'" + name + "' must list 5 values");
    FingerValues out{};
    for (std::size_t i = 0; i < kFingerCount; ++i) out[i] = num(j[i], name);
    return out;
}

inline FingerState finger_state(const Json& j) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "contracted" || s == "C") return FingerState::Contracted;
    if (s == "extended" || s == "E") return FingerState::Extended;
    throw InvalidConfig("finger state must be \"contracted\" or \"extended\"");
}

inline const char* finger_state_name(FingerState f) {
    return f == FingerState::Contracted ? "contracted" : (f == FingerState::Extended ? "extended" : "indeterminate");
}

inline std::string lower_mode(ModeId m) {
    std::string s(mode_name(m));
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline Rgb rgb(const Json& j, const std::string& name) {
    if (!j.is_array() || j.size() != 3) throw InvalidConfig("'" + name + "' must be [r, g, b]");
    std::array<std::uint8_t, 3> c{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255)
            throw InvalidConfig("'" + name + "' components must be integers in [0, 255]");
        c[i] = static_cast<std::uint8_t>(j[i].get<int>());
    }
    return {c[0], c[1], c[2]};
}

} // namespace detail

inline Config config_from_json(const jsonio::Json& j) {
    using detail::num;
    using detail::vec3;
    Config cfg;
    EngineConfig& e = cfg.engine;
    try {
        detail::check_keys(j, "<root>", {"session", "plant", "operation", "spherical", "cartesian", "height_override",
                                         "gestures", "feedback", "gateway"});
        if (j.contains("session")) {
            const auto& s = j["session"];
            detail::check_keys(s, "session", {"tick_rate", "latency", "gap_timeout", "seed", "record_path"});
            if (s.contains("tick_rate")) e.session.tick_rate = num(s["tick_rate"], "session.tick_rate");
            if (s.contains("latency")) e.session.latency = num(s["latency"], "session.latency");
            if (s.contains("gap_timeout")) e.session.gap_timeout = num(s["gap_timeout"], "session.gap_timeout");
            if (s.contains("seed")) {
                if (!s["seed"].is_number_unsigned()) throw InvalidConfig("'session.seed' must be a non-negative integer");
                e.session.seed = s["seed"].get<std::uint64_t>();
            }
            if (s.contains("record_path") && !s["record_path"].is_null()) {
                if (!s["record_path"].is_string()) throw InvalidConfig("'session.record_path' must be a string");
                e.session.record_path = s["record_path"].get<std::string>();
            }
        }
        if (j.contains("plant")) {
            const auto& p = j["plant"];
            detail::check_keys(p, "plant", {"t_p", "t_q", "initial_position", "initial_orientation"});
            if (p.contains("t_p")) e.plant.t_p = vec3(p["t_p"], "plant.t_p");
            if (p.contains("t_q")) e.plant.t_q = num(p["t_q"], "plant.t_q");
            if (p.contains("initial_position")) e.initial_pose.position = vec3(p["initial_position"], "plant.initial_position");
            if (p.contains("initial_orientation")) {
                const auto& q = p["initial_orientation"];
                if (!q.is_array() || q.size() != 4) throw InvalidConfig("'plant.initial_orientation' must be [w,x,y,z]");
                try {
                    e.initial_pose.orientation = UnitQuat::from_components(
                        num(q[0], "plant.initial_orientation"), num(q[1], "plant.initial_orientation"),
                        num(q[2], "plant.initial_orientation"), num(q[3], "plant.initial_orientation"));
                } catch (const InvalidParameter& err) {
                    throw InvalidConfig(std::string("plant.initial_orientation: ") + err.what());
                }
            }
        }
        InteractionParams& ip = e.supervisor.interaction;
        if (j.contains("operation")) {
            detail::check_keys(j["operation"], "operation", {"k"});
            if (j["operation"].contains("k")) ip.k = vec3(j["operation"]["k"], "operation.k");
        }
        if (j.contains("spherical")) {
            const auto& s = j["spherical"];
            detail::check_keys(s, "spherical", {"r_min", "r_max", "d_min", "d_max", "delta_r"});
            if (s.contains("r_min")) ip.spherical.r_min = num(s["r_min"], "spherical.r_min");
            if (s.contains("r_max")) ip.spherical.r_max = num(s["r_max"], "spherical.r_max");
            if (s.contains("d_min")) ip.spherical.d_min = num(s["d_min"], "spherical.d_min");
            if (s.contains("d_max")) ip.spherical.d_max = num(s["d_max"], "spherical.d_max");
            if (s.contains("delta_r")) ip.spherical.delta_r = num(s["delta_r"], "spherical.delta_r");
        }
        if (j.contains("cartesian")) {
            const auto& c = j["cartesian"];
            detail::check_keys(c, "cartesian", {"origin_offset", "d_threshold", "delta_d"});
            if (c.contains("origin_offset")) ip.cartesian.origin_offset = vec3(c["origin_offset"], "cartesian.origin_offset");
            if (c.contains("d_threshold")) ip.cartesian.d_threshold = num(c["d_threshold"], "cartesian.d_threshold");
            if (c.contains("delta_d")) ip.cartesian.delta_d = num(c["delta_d"], "cartesian.delta_d");
        }
        if (j.contains("height_override")) {
            const auto& h = j["height_override"];
            detail::check_keys(h, "height_override", {"enabled", "z_offset"});
            if (h.contains("enabled")) {
                if (!h["enabled"].is_boolean()) throw InvalidConfig("'height_override.enabled' must be a boolean");
                ip.height.enabled = h["enabled"].get<bool>();
            }
            if (h.contains("z_offset")) ip.height.z_offset = num(h["z_offset"], "height_override.z_offset");
        }
        if (j.contains("gestures")) {
            const auto& g = j["gestures"];
            detail::check_keys(g, "gestures",
                               {"contract_thresh", "extend_thresh", "hold_duration", "channel_map", "patterns", "bindings"});
            GestureConfig& gc = e.gestures;
            if (g.contains("contract_thresh")) gc.contract_thresh = detail::fingers(g["contract_thresh"], "gestures.contract_thresh");
            if (g.contains("extend_thresh")) gc.extend_thresh = detail::fingers(g["extend_thresh"], "gestures.extend_thresh");
            if (g.contains("hold_duration")) gc.hold_duration = num(g["hold_duration"], "gestures.hold_duration");
            if (g.contains("channel_map")) {
                const auto& cm = g["channel_map"];
                if (!cm.is_array() || cm.size() != kFingerCount)
                    throw InvalidConfig("'gestures.channel_map' must list channels for 5 fingers");
                for (std::size_t i = 0; i < kFingerCount; ++i) {
                    if (!cm[i].is_array()) throw InvalidConfig("'gestures.channel_map' entries must be arrays");
                    gc.channel_map[i].clear();
                    for (const auto& ch : cm[i]) {
                        if (!ch.is_number_unsigned()) throw InvalidConfig("channel indices must be non-negative integers");
                        gc.channel_map[i].push_back(ch.get<std::size_t>());
                    }
                }
            }
            if (g.contains("patterns")) {
                const auto& pats = g["patterns"];
                if (!pats.is_object()) throw InvalidConfig("'gestures.patterns' must be an object");
                gc.patterns.clear();
                for (const auto& [name, states] : pats.items()) {
                    if (!states.is_array() || states.size() != kFingerCount)
                        throw InvalidConfig("pattern '" + name + "' must list 5 finger states");
                    GesturePattern p{{name}, {}};
                    for (std::size_t i = 0; i < kFingerCount; ++i) p.fingers[i] = detail::finger_state(states[i]);
                    gc.patterns.push_back(p);
                }
            }
            if (g.contains("bindings")) {
                const auto& b = g["bindings"];
                if (!b.is_object()) throw InvalidConfig("'gestures.bindings' must be an object");
                e.supervisor.bindings.clear();
                for (const auto& [name, mode] : b.items()) {
                    if (mode.is_null()) continue;
                    const auto m = mode.is_string() ? mode_from_name(mode.get<std::string>()) : std::nullopt;
                    if (!m) throw InvalidConfig("binding '" + name + "' names an unknown mode");
                    e.supervisor.bindings[GestureId{name}] = *m;
                }
            }
        }
        if (j.contains("feedback")) {
            detail::check_keys(j["feedback"], "feedback", {"colors"});
            if (j["feedback"].contains("colors")) {
                const auto& c = j["feedback"]["colors"];
                detail::check_keys(c, "feedback.colors", {"operation", "locking", "spherical", "cartesian"});
                for (ModeId m : kAllModes) {
                    const std::string key = detail::lower_mode(m);
                    if (c.contains(key))
                        e.supervisor.palette.colors[static_cast<std::size_t>(m)] = detail::rgb(c[key], "feedback.colors." + key);
                }
            }
        }
        if (j.contains("gateway")) {
            const auto& g = j["gateway"];
            detail::check_keys(g, "gateway", {"udp_listen", "stream_listen", "max_subscriber_queue", "restamp"});
            if (g.contains("udp_listen")) cfg.gateway.udp_listen = g["udp_listen"].get<std::string>();
            if (g.contains("stream_listen")) cfg.gateway.stream_listen = g["stream_listen"].get<std::string>();
            if (g.contains("max_subscriber_queue")) {
                if (!g["max_subscriber_queue"].is_number_unsigned())
                    throw InvalidConfig("'gateway.max_subscriber_queue' must be a positive integer");
                cfg.gateway.max_subscriber_queue = g["max_subscriber_queue"].get<std::size_t>();
            }
            if (g.contains("restamp")) cfg.gateway.restamp = g["restamp"].get<bool>();
        }
    } catch (const nlohmann::json::exception& err) {
        throw InvalidConfig(std::string("config: ") + err.what());
    }
    cfg.validate();
    return cfg;
}

inline jsonio::Json config_to_json(const Config& cfg) {
    using jsonio::Json;
    using jsonio::vec;
    const EngineConfig& e = cfg.engine;
    const InteractionParams& ip = e.supervisor.interaction;

    Json patterns = Json::object();
    for (const auto& p : e.gestures.patterns) {
        Json states = Json::array();
        for (FingerState f : p.fingers) states.push_back(detail::finger_state_name(f));
        patterns[p.id.name] = states;
    }
    Json bindings = Json::object();
    for (const auto& [g, m] : e.supervisor.bindings) bindings[g.name] = detail::lower_mode(m);
    Json colors = Json::object();
    for (ModeId m : kAllModes) {
        const Rgb c = e.supervisor.palette.of(m);
        colors[detail::lower_mode(m)] = Json::array({c.r, c.g, c.b});
    }
    Json channel_map = Json::array();
    for (const auto& chans : e.gestures.channel_map) channel_map.push_back(chans);

    return Json{
        {"session",
         {{"tick_rate", e.session.tick_rate},
          {"latency", e.session.latency},
          {"gap_timeout", e.session.gap_timeout},
          {"seed", e.session.seed},
          {"record_path", e.session.record_path ? Json(*e.session.record_path) : Json(nullptr)}}},
        {"plant",
         {{"t_p", vec(e.plant.t_p)},
          {"t_q", e.plant.t_q},
          {"initial_position", vec(e.initial_pose.position)},
          {"initial_orientation", jsonio::quat(e.initial_pose.orientation)}}},
        {"operation", {{"k", vec(ip.k)}}},
        {"spherical",
         {{"r_min", ip.spherical.r_min},
          {"r_max", ip.spherical.r_max},
          {"d_min", ip.spherical.d_min},
          {"d_max", ip.spherical.d_max},
          {"delta_r", ip.spherical.delta_r}}},
        {"cartesian",
         {{"origin_offset", vec(ip.cartesian.origin_offset)},
          {"d_threshold", ip.cartesian.d_threshold},
          {"delta_d", ip.cartesian.delta_d}}},
        {"height_override", {{"enabled", ip.height.enabled}, {"z_offset", ip.height.z_offset}}},
        {"gestures",
         {{"contract_thresh", e.gestures.contract_thresh},
          {"extend_thresh", e.gestures.extend_thresh},
          {"hold_duration", e.gestures.hold_duration},
          {"channel_map", channel_map},
          {"patterns", patterns},
          {"bindings", bindings}}},
        {"feedback", {{"colors", colors}}},
        {"gateway",
         {{"udp_listen", cfg.gateway.udp_listen},
          {"stream_listen", cfg.gateway.stream_listen},
          {"max_subscriber_queue", cfg.gateway.max_subscriber_queue},
          {"restamp", cfg.gateway.restamp}}}};
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
    jsonio::Json j;
    try {
        j = jsonio::Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// Applies OMNITELEOP_LISTEN / OMNITELEOP_UDP_LISTEN if set.
inline void apply_env_overrides(GatewayConfig& g) {
    if (const char* v = std::getenv("OMNITELEOP_LISTEN"); v && *v) g.stream_listen = v;
    if (const char* v = std::getenv("OMNITELEOP_UDP_LISTEN"); v && *v) g.udp_listen = v;
}

} // namespace omniteleop
