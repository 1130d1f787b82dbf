#pragma once

// Top-level drivers behind the CLI: offline replay, live simulation and
// pass-through recording.

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "omniteleop/config.hpp"
#include "omniteleop/gateway.hpp"
#include "omniteleop/jsonio.hpp"
#include "omniteleop/metrics.hpp"
#include "omniteleop/session.hpp"
#include "omniteleop/wire.hpp"

namespace omniteleop {

/// Reads a JSON Lines file holding either input frames or session log records
/// (whose "frame" field is used). Blank lines are skipped.
inline std::vector<OperatorFrame> read_frames_jsonl(std::istream& in) {
    std::vector<OperatorFrame> frames;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = jsonio::Json::parse(line);
            if (j.is_object() && j.contains("frame"))
                frames.push_back(jsonio::read_frame(j["frame"]));
            else
                frames.push_back(to_frame(decode_input(line)));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedFrame("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw MalformedFrame("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return frames;
}

inline std::vector<OperatorFrame> read_frames_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_frames_jsonl(in);
}

inline void write_frames_jsonl(std::ostream& out, const std::vector<OperatorFrame>& frames) {
    for (const auto& f : frames) out << encode_input(from_frame(f)) << '\n';
}

struct ReplayResult {
    std::vector<LogRecord> log;
    SessionSummary summary;
    std::optional<Metrics> metrics;
};

inline ReplayResult replay(const EngineConfig& cfg, std::vector<OperatorFrame> frames) {
    ReplayResult out;
    VectorFrameSource source(std::move(frames));
    out.summary = run_session(cfg, source, [&](const LogRecord& r) { out.log.push_back(r); });
    if (!out.log.empty()) out.metrics = compute_metrics(out.log, cfg.session.tick_rate);
    return out;
}

/// Summary plus metrics as one JSON document.
inline std::string replay_report(const ReplayResult& r) {
    jsonio::Json j{{"summary", jsonio::summary(r.summary)}};
    j["metrics"] = r.metrics ? jsonio::metrics(*r.metrics) : jsonio::Json(nullptr);
    return j.dump(2);
}

inline void write_log_jsonl(std::ostream& out, const std::vector<LogRecord>& log) {
    for (const auto& rec : log) out << jsonio::record(rec).dump() << '\n';
}

struct LiveOptions {
    double duration = 0.0; // s; 0 runs until stop is set
    bool headless = false;
};

/// Paced live loop: gateway frames -> session, one state broadcast per tick.
inline SessionSummary run_live(const Config& cfg, const LiveOptions& opts, const std::atomic<bool>& stop,
                               std::ostream& status = std::cerr) {
    using clock = std::chrono::steady_clock;
    Session session(cfg.engine);
    std::optional<std::ofstream> record;
    if (cfg.engine.session.record_path) {
        record.emplace(*cfg.engine.session.record_path);
        if (!*record) throw Error("cannot open record file '" + *cfg.engine.session.record_path + "'");
    }

    const auto start = clock::now();
    Gateway gateway(cfg.gateway, [&session](OperatorFrame f) { session.push(std::move(f)); },
                    [start] { return std::chrono::duration<double>(clock::now() - start).count(); });
    gateway.start();
    if (!opts.headless)
        status << "gateway: udp port " << gateway.udp_port() << ", stream port " << gateway.stream_port() << "\n";

    const double dt = session.dt();
    const auto max_ticks = static_cast<std::int64_t>(opts.duration * cfg.engine.session.tick_rate);
    while (!stop && (opts.duration <= 0.0 || session.tick_index() < max_ticks)) {
        const auto due = start + std::chrono::duration_cast<clock::duration>(
                                     std::chrono::duration<double>(static_cast<double>(session.tick_index()) * dt));
        std::this_thread::sleep_until(due);
        if (auto rec = session.tick(); rec && record) *record << jsonio::record(*rec).dump() << '\n';
        const Snapshot snap = session.snapshot();
        gateway.publish(encode_state(make_state_msg(snap)));
        if (!opts.headless && snap.tick % static_cast<std::int64_t>(cfg.engine.session.tick_rate) == 0)
            status << "t=" << snap.t << "s mode=" << snap.feedback.mode_name
                   << " subscribers=" << gateway.subscriber_count() << "\n";
    }
    gateway.stop();
    SessionSummary summary = session.summary();
    summary.stop_reason = stop ? "stopped" : "duration_elapsed";
    return summary;
}

/// Captures decoded (and restamped) input frames to a JSON Lines file.
inline std::int64_t run_record(const GatewayConfig& gcfg, std::ostream& out, double duration,
                               const std::atomic<bool>& stop) {
    std::mutex m;
    std::int64_t count = 0;
    Gateway gateway(gcfg, [&](OperatorFrame f) {
        std::lock_guard lock(m);
        out << encode_input(from_frame(f)) << '\n';
        ++count;
    });
    gateway.start();
    const auto start = std::chrono::steady_clock::now();
    while (!stop && (duration <= 0.0 || std::chrono::steady_clock::now() - start < std::chrono::duration<double>(duration)))
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    gateway.stop();
    std::lock_guard lock(m);
    out.flush();
    return count;
}

} // namespace omniteleop
