#pragma once

// Fixed-timestep loop: operator frames -> gestures -> supervisor -> plant.
//
// Frames are delayed by a pure transport latency: at tick time `now` the loop
// applies the newest frame whose timestamp is <= now - latency and drops any
// older ones still queued (latest-wins). Results depend only on frame
// timestamps and the tick index.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "omniteleop/error.hpp"
#include "omniteleop/gestures.hpp"
#include "omniteleop/interaction.hpp"
#include "omniteleop/plant.hpp"
#include "omniteleop/supervisor.hpp"

namespace omniteleop {

struct SessionConfig {
    double tick_rate = 100.0;  // Hz
    double latency = 0.4;      // s, applied to operator frames
    double gap_timeout = 1.0;  // s without a fresh frame before commands are held
    std::optional<std::string> record_path;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) throw InvalidConfig("session tick_rate must be positive");
        if (!(latency >= 0.0) || !std::isfinite(latency)) throw InvalidConfig("session latency must be >= 0");
        if (!(gap_timeout > 0.0) || !std::isfinite(gap_timeout))
            throw InvalidConfig("session gap_timeout must be positive");
    }
};

/// Everything the core loop needs.
struct EngineConfig {
    SessionConfig session;
    PlantParams plant;
    Pose initial_pose{{0.0, 0.0, 1.0}, UnitQuat::identity()};
    GestureConfig gestures = GestureConfig::defaults();
    SupervisorConfig supervisor = SupervisorConfig::defaults();

    void validate() const {
        session.validate();
        try {
            plant.validate();
            supervisor.interaction.validate();
        } catch (const InvalidParameter& e) {
            throw InvalidConfig(e.what());
        }
        if (!initial_pose.position.finite()) throw InvalidConfig("initial position must be finite");
        gestures.validate();
        supervisor.palette.validate();
        for (const auto& [gesture, mode] : supervisor.bindings) {
            bool known = false;
            for (const auto& p : gestures.patterns) known = known || p.id == gesture;
            if (!known) throw InvalidConfig("binding refers to unknown gesture '" + gesture.name + "'");
        }
    }
};

struct LogRecord {
    std::int64_t tick = 0;
    OperatorFrame frame;
    ModeId mode = ModeId::Operation;
    PoseCommand command;
    Pose robot; // plant pose after this tick's step
};

/// Geometry the cockpit needs to draw the moving-mode zones.
struct ZoneInfo {
    std::optional<double> r; // present while Spherical is active
    SphericalParams spherical;
    Vec3 cartesian_origin;
    double d_threshold = 0.0;
};

/// Immutable view of the loop after a tick, published to subscribers.
struct Snapshot {
    std::int64_t tick = 0;
    double t = 0.0;
    bool has_frame = false;
    Pose robot;
    PoseCommand command;
    ModeId mode = ModeId::Operation;
    FeedbackState feedback;
    Pose hand;
    Vec3 shoulder;
    std::optional<std::string> gesture;
    ZoneInfo zones;
};

struct SessionSummary {
    std::int64_t ticks = 0;
    std::int64_t records = 0;
    std::int64_t frames_received = 0;
    std::int64_t frames_applied = 0;
    std::int64_t frames_superseded = 0;
    std::int64_t frames_out_of_order = 0;
    std::int64_t gap_ticks = 0;
    bool gap_detected = false;
    std::int64_t mode_switches = 0;
    std::string stop_reason = "running";
};

class Session {
public:
    explicit Session(EngineConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        robot_ = RobotState{cfg_.initial_pose, cfg_.plant};
        last_command_ = PoseCommand::from_pose(robot_.pose);
    }

    /// Thread-safe; frames older than the newest accepted one are dropped.
    bool push(OperatorFrame frame) {
        std::lock_guard lock(inbox_mutex_);
        if (!std::isfinite(frame.t) || (newest_t_ && frame.t < *newest_t_)) {
            ++out_of_order_;
            return false;
        }
        newest_t_ = frame.t;
        inbox_.push_back(std::move(frame));
        ++received_;
        return true;
    }

    [[nodiscard]] double now() const { return static_cast<double>(tick_) / cfg_.session.tick_rate; }
    [[nodiscard]] double dt() const { return 1.0 / cfg_.session.tick_rate; }
    [[nodiscard]] std::int64_t tick_index() const { return tick_; }

    /// Frames received but not yet applied.
    [[nodiscard]] std::size_t pending() const {
        std::lock_guard lock(inbox_mutex_);
        return inbox_.size() + pending_.size();
    }

    /// Runs one tick. Returns a record once the first frame has been applied.
    std::optional<LogRecord> tick() {
        drain_inbox();
        const double t_now = now();
        const double horizon = t_now - cfg_.session.latency + kTimeSlack;

        bool took = false;
        while (!pending_.empty() && pending_.front().t <= horizon) {
            if (took) ++summary_.frames_superseded;
            current_ = std::move(pending_.front());
            pending_.pop_front();
            took = true;
            ++summary_.frames_applied;
        }

        std::optional<LogRecord> record;
        if (current_) {
            if (!modes_) modes_ = supervisor_init(robot_.pose, *current_, cfg_.supervisor.interaction);

            const bool gap = (t_now - cfg_.session.latency) - current_->t > cfg_.session.gap_timeout;
            PoseCommand cmd = modes_->last_command;
            if (gap) {
                ++summary_.gap_ticks;
                summary_.gap_detected = true;
                hold_ = HoldTracker{};
                gesture_.reset();
            } else {
                const auto fingers = aggregate_knuckles(current_->knuckles, cfg_.gestures);
                gesture_ = fingers ? recognize_gesture(*fingers, cfg_.gestures) : std::nullopt;
                auto [tracker, ev] = update_hold(hold_, t_now, gesture_, cfg_.gestures.hold_duration);
                hold_ = tracker;
                SupervisorStep step = supervisor_step(*modes_, ev, robot_.pose, *current_, cfg_.supervisor);
                if (step.switched) ++summary_.mode_switches;
                modes_ = std::move(step.state);
                cmd = step.command;
            }
            last_command_ = cmd;
            robot_ = step_plant(robot_, cmd, dt());
            record = LogRecord{tick_, *current_, modes_->active, cmd, robot_.pose};
            ++summary_.records;
        }

        last_tick_ = tick_;
        ++tick_;
        summary_.ticks = tick_;
        return record;
    }

    [[nodiscard]] Snapshot snapshot() const {
        Snapshot s;
        s.tick = last_tick_;
        s.t = static_cast<double>(last_tick_) / cfg_.session.tick_rate;
        s.has_frame = current_.has_value();
        s.robot = robot_.pose;
        s.command = last_command_;
        s.mode = modes_ ? modes_->active : ModeId::Operation;
        s.feedback = FeedbackState{std::string(mode_name(s.mode)), cfg_.supervisor.palette.of(s.mode)};
        if (current_) {
            s.hand = current_->hand;
            s.shoulder = current_->shoulder;
        }
        if (gesture_) s.gesture = gesture_->name;
        s.zones.spherical = cfg_.supervisor.interaction.spherical;
        s.zones.d_threshold = cfg_.supervisor.interaction.cartesian.d_threshold;
        s.zones.cartesian_origin = cartesian_origin(cfg_.supervisor.interaction.cartesian, s.shoulder);
        if (modes_ && modes_->spherical && modes_->active == ModeId::Spherical) s.zones.r = modes_->spherical->r;
        return s;
    }

    [[nodiscard]] SessionSummary summary() const {
        SessionSummary out = summary_;
        std::lock_guard lock(inbox_mutex_);
        out.frames_received = received_;
        out.frames_out_of_order = out_of_order_;
        return out;
    }

    [[nodiscard]] const RobotState& robot() const { return robot_; }
    [[nodiscard]] const std::optional<ModeState>& modes() const { return modes_; }
    [[nodiscard]] const EngineConfig& config() const { return cfg_; }

private:
    // Absorbs rounding in tick * (1 / rate) vs. frame stamps on the same grid.
    static constexpr double kTimeSlack = 1e-9;

    void drain_inbox() {
        std::lock_guard lock(inbox_mutex_);
        while (!inbox_.empty()) {
            pending_.push_back(std::move(inbox_.front()));
            inbox_.pop_front();
        }
    }

    EngineConfig cfg_;
    RobotState robot_;
    PoseCommand last_command_;
    std::optional<ModeState> modes_;
    std::optional<OperatorFrame> current_;
    std::optional<GestureId> gesture_;
    HoldTracker hold_;
    std::deque<OperatorFrame> pending_;
    std::int64_t tick_ = 0;
    std::int64_t last_tick_ = 0;
    SessionSummary summary_;

    mutable std::mutex inbox_mutex_;
    std::deque<OperatorFrame> inbox_;
    std::optional<double> newest_t_;
    std::int64_t received_ = 0;
    std::int64_t out_of_order_ = 0;
};

/// Pull-based frame stream, ordered by timestamp.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<OperatorFrame> next() = 0;
};

class VectorFrameSource : public FrameSource {
public:
    explicit VectorFrameSource(std::vector<OperatorFrame> frames) : frames_(std::move(frames)) {}
    std::optional<OperatorFrame> next() override {
        if (pos_ >= frames_.size()) return std::nullopt;
        return frames_[pos_++];
    }

private:
    std::vector<OperatorFrame> frames_;
    std::size_t pos_ = 0;
};

using RecordSink = std::function<void(const LogRecord&)>;

/// Offline run: each frame arrives at its own timestamp; stops once the source
/// is exhausted and every queued frame has been applied.
inline SessionSummary run_session(const EngineConfig& cfg, FrameSource& source, const RecordSink& sink) {
    Session session(cfg);
    std::optional<OperatorFrame> lookahead = source.next();
    while (lookahead || session.pending() > 0) {
        while (lookahead && lookahead->t <= session.now()) {
            session.push(std::move(*lookahead));
            lookahead = source.next();
        }
        if (auto rec = session.tick(); rec && sink) sink(*rec);
    }
    SessionSummary summary = session.summary();
    summary.stop_reason = "source_exhausted";
    return summary;
}

} // namespace omniteleop
