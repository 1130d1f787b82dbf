// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.
//
//   acceptance [--write-mission-log <path>]
//
// --write-mission-log also dumps the scripted mission's operator frames as
// JSON Lines for the CLI replay tests.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "omniteleop/omniteleop.hpp"
#include "support/generators.hpp"
#include "support/mission.hpp"
#include "support/oracles.hpp"

using namespace omniteleop;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s; // 0 = none
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ------------------------------------------------------------------ plant

constexpr double kDecayTol = 1e-6;
constexpr double kSemigroupTol = 1e-9;

Outcome plant_decay() {
    gen::Rng rng(101);
    double worst_decay = 0.0, worst_semigroup = 0.0;
    for (int i = 0; i < 20000; ++i) {
        RobotState s;
        s.pose = gen::pose(rng);
        s.params.t_p = {gen::uniform(rng, 0.05, 3), gen::uniform(rng, 0.05, 3), gen::uniform(rng, 0.05, 3)};
        s.params.t_q = gen::uniform(rng, 0.05, 3);
        const PoseCommand cmd{gen::vec(rng, -5, 5), gen::quat(rng)};
        const double dt = gen::uniform(rng, 0.001, 0.5);

        const RobotState n = step_plant(s, cmd, dt);
        const Vec3 e0 = s.pose.position - cmd.position, e1 = n.pose.position - cmd.position;
        worst_decay = std::max({worst_decay, std::abs(e1.x - e0.x * std::exp(-dt / s.params.t_p.x)),
                                std::abs(e1.y - e0.y * std::exp(-dt / s.params.t_p.y)),
                                std::abs(e1.z - e0.z * std::exp(-dt / s.params.t_p.z))});
        const double a0 = quat_error_angle(s.pose.orientation, cmd.orientation);
        const double a1 = quat_error_angle(n.pose.orientation, cmd.orientation);
        worst_decay = std::max(worst_decay, std::abs(a1 - a0 * std::exp(-dt / s.params.t_q)));

        const RobotState h = step_plant(step_plant(s, cmd, dt / 2), cmd, dt / 2);
        const Vec3 dp = h.pose.position - n.pose.position;
        worst_semigroup = std::max({worst_semigroup, std::abs(dp.x), std::abs(dp.y), std::abs(dp.z),
                                    quat_error_angle(h.pose.orientation, n.pose.orientation)});
    }
    return {worst_decay <= kDecayTol && worst_semigroup <= kSemigroupTol,
            "max decay err " + fmt("%.2e", worst_decay) + ", max semigroup err " + fmt("%.2e", worst_semigroup)};
}

// ------------------------------------------------------------- algorithms

Outcome algorithm_oracles() {
    gen::Rng rng(202);
    const SphericalParams sp;
    const CartesianParams cp;
    SphericalState s{1.0, sp};
    double r = 1.0;
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const OperatorFrame f = gen::frame(rng, i * 0.01);
        const oracle::Arr3 h{f.hand.position.x, f.hand.position.y, f.hand.position.z};
        const oracle::Arr3 sh{f.shoulder.x, f.shoulder.y, f.shoulder.z};

        const auto [cmd, next] = spherical_update(s, f);
        const auto want = oracle::spherical_step(h, sh, r, sp.r_max, sp.r_min, sp.d_min, sp.d_max, sp.delta_r);
        if (cmd.position.x != want[0] || cmd.position.y != want[1] || cmd.position.z != want[2] || next.r != r)
            ++mismatches;
        s = next;

        const Vec3 robot = gen::vec(rng, -4, 4);
        const auto want_c = oracle::cartesian_step(h, {robot.x, robot.y, robot.z}, sh, cp.d_threshold, cp.delta_d);
        const PoseCommand c = cartesian_update(cp, robot, f);
        if (c.position.x != want_c[0] || c.position.y != want_c[1] || c.position.z != want_c[2]) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 10000 frames x 2 modes"};
}

// ------------------------------------------------------- spherical geometry

Outcome spherical_ray() {
    gen::Rng rng(303);
    double worst_cross = 0.0;
    int out_of_range = 0;
    for (int stream = 0; stream < 1000; ++stream) {
        SphericalParams p;
        p.r_min = gen::uniform(rng, 0.2, 1.0);
        p.r_max = gen::uniform(rng, p.r_min, 6.0);
        p.delta_r = gen::uniform(rng, 0.001, 0.2);
        Pose robot = gen::pose(rng);
        OperatorFrame f = gen::frame(rng, 0.0);
        SphericalState s = spherical_enter(robot, f, p);
        const int len = 50 + static_cast<int>(gen::uniform(rng, 0, 150));
        for (int i = 0; i < len; ++i) {
            f = gen::frame(rng, i * 0.01, 0.8);
            if (norm(f.hand.position - f.shoulder) <= kDirectionEpsilon) continue;
            const auto [cmd, next] = spherical_update(s, f);
            s = next;
            const Vec3 ray = normalize(f.hand.position - f.shoulder);
            const Vec3 off = cmd.position - f.shoulder;
            worst_cross = std::max(worst_cross, norm(cross(off, ray)));
            if (dot(off, ray) < 0.0 || s.r < p.r_min || s.r > p.r_max) ++out_of_range;
        }
    }
    return {worst_cross <= 1e-9 && out_of_range == 0,
            "max cross-norm " + fmt("%.2e", worst_cross) + ", " + std::to_string(out_of_range) + " radius violations"};
}

// -------------------------------------------------------- cartesian stop zone

Outcome cartesian_zone() {
    gen::Rng rng(404);
    int violations = 0, moved = 0, held = 0;
    for (int i = 0; i < 20000; ++i) {
        CartesianParams p;
        p.d_threshold = gen::uniform(rng, 0.05, 0.3);
        p.delta_d = gen::uniform(rng, 0.001, 0.1);
        OperatorFrame f = gen::frame(rng, i * 0.01, 0.6);
        if (i % 4 == 0) // land exactly on the boundary
            p.d_threshold = norm(f.hand.position - cartesian_origin(p, f.shoulder));
        const Vec3 robot = gen::vec(rng, -4, 4);
        const PoseCommand c = cartesian_update(p, robot, f);
        const double d = norm(f.hand.position - cartesian_origin(p, f.shoulder));
        const double disp = norm(c.position - robot);
        if (d <= p.d_threshold) {
            ++held;
            if (c.position != robot) ++violations;
        } else {
            ++moved;
            if (std::abs(disp - p.delta_d) > 1e-12 * (1.0 + norm(robot))) ++violations;
        }
    }
    return {violations == 0 && held > 0 && moved > 0,
            std::to_string(violations) + " violations (" + std::to_string(held) + " held, " + std::to_string(moved) +
                " moved)"};
}

// ------------------------------------------------------ operation / locking

Outcome operation_locking() {
    gen::Rng rng(505);
    double worst = 0.0;
    const Pose robot = gen::pose(rng);
    const OperatorFrame first = gen::frame(rng, 0.0);
    const OperationState op = operation_enter(robot, first, {1, 1, 1});
    for (int i = 0; i < 10000; ++i) {
        const OperatorFrame f = gen::frame(rng, i * 0.01);
        const PoseCommand c = operation_update(op, f);
        const Vec3 moved = c.position - robot.position, hand = f.hand.position - first.hand.position;
        worst = std::max(worst, norm(moved - hand));
        if (!(c.orientation == f.hand.orientation)) worst = 1.0;
    }

    const LockState lock = lock_enter(gen::pose(rng));
    const PoseCommand ref = lock_update(lock);
    int changed = 0;
    SupervisorConfig cfg = SupervisorConfig::defaults();
    ModeState ms = detail::enter_mode(ModeId::Locking, lock.locked, first, cfg.interaction, ref);
    for (int i = 0; i < 10000; ++i) {
        const OperatorFrame f = gen::frame(rng, i * 0.01);
        if (!(lock_update(lock) == ref)) ++changed;
        const SupervisorStep st = supervisor_step(ms, std::nullopt, gen::pose(rng), f, cfg);
        if (!(st.command == ref)) ++changed;
        ms = st.state;
    }
    return {worst <= 1e-12 && changed == 0,
            "max 1:1 deviation " + fmt("%.2e", worst) + ", " + std::to_string(changed) + " lock changes"};
}

// --------------------------------------------------------- gesture debounce

Outcome gesture_debounce() {
    gen::Rng rng(606);
    const GestureConfig gc = GestureConfig::defaults();
    const double hold = gc.hold_duration;
    const double rate = 100.0;
    const std::vector<std::optional<GestureId>> choices{std::nullopt, GestureId{"fist"}, GestureId{"open"},
                                                        GestureId{"point"}, GestureId{"two"}};
    int early = 0, wrong_count = 0, blocked = 0, holds = 0;
    for (int stream = 0; stream < 500; ++stream) {
        HoldTracker tr;
        std::int64_t tick = 0;
        std::optional<GestureId> prev;
        bool first = true;
        for (int seg = 0; seg < 20; ++seg) {
            std::optional<GestureId> g = choices[static_cast<std::size_t>(gen::uniform(rng, 0, 4.999))];
            if (!first && g == prev) continue; // keep segments maximal
            first = false;
            prev = g;
            const int n = 1 + static_cast<int>(gen::uniform(rng, 0, 250));
            const double start = static_cast<double>(tick) / rate;
            int events = 0;
            bool reaches = false;
            for (int i = 0; i < n; ++i, ++tick) {
                const double now = static_cast<double>(tick) / rate;
                reaches = reaches || now - start >= hold;
                auto [next, ev] = update_hold(tr, now, g, hold);
                tr = next;
                if (ev) {
                    ++events;
                    if (now - start < hold || !g || !(ev->gesture == *g)) ++early;
                }
            }
            if (g && reaches) ++holds;
            if (events != ((g && reaches) ? 1 : 0)) ++wrong_count;
        }
    }

    // Any finger in the indeterminate band blocks recognition.
    for (int i = 0; i < 20000; ++i) {
        FingerValues v{};
        for (double& x : v) x = gen::uniform(rng, 0, 1) < 0.5 ? gen::uniform(rng, 0.71, 1.0) : gen::uniform(rng, 0, 0.29);
        v[static_cast<std::size_t>(gen::uniform(rng, 0, 4.999))] = gen::uniform(rng, 0.3, 0.7);
        if (recognize_gesture(v, gc)) ++blocked;
    }

    // End to end: a gesture shown for just under the hold never switches mode.
    int session_early = 0;
    for (int trial = 0; trial < 50; ++trial) {
        EngineConfig cfg;
        cfg.session.latency = 0.0;
        Session session(cfg);
        const double shown = gen::uniform(rng, 0.05, hold - 0.02);
        OperatorFrame f = gen::frame(rng, 0.0);
        for (int i = 0; i < 300; ++i) {
            f.t = i / rate;
            f.knuckles = (f.t >= 0.5 && f.t < 0.5 + shown) ? std::vector<double>{0.9, 0.9, 0.9, 0.9, 0.9}
                                                           : std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5};
            session.push(f);
            session.tick();
        }
        if (session.summary().mode_switches != 0) ++session_early;
    }

    const bool ok = early == 0 && wrong_count == 0 && blocked == 0 && session_early == 0 && holds > 0;
    return {ok, std::to_string(holds) + " holds; " + std::to_string(early) + " early, " + std::to_string(wrong_count) +
                    " miscounted, " + std::to_string(blocked) + " indeterminate recognized, " +
                    std::to_string(session_early) + " premature session switches"};
}

// ------------------------------------------------------------------ mission

std::string serialize(const std::vector<LogRecord>& log) {
    std::ostringstream out;
    write_log_jsonl(out, log);
    return out.str();
}

Outcome mission_replay(const mission::Run& run) {
    const mission::Geometry g;
    std::vector<std::string> failures;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    };
    need(run.completed, "scenario did not finish");

    std::vector<ModeId> sequence;
    for (const auto& rec : run.log)
        if (sequence.empty() || sequence.back() != rec.mode) sequence.push_back(rec.mode);
    const std::vector<ModeId> expected{ModeId::Operation, ModeId::Spherical, ModeId::Operation,
                                       ModeId::Locking,   ModeId::Operation, ModeId::Cartesian};
    need(sequence == expected, "mode sequence");

    // segment boundaries
    std::vector<std::size_t> seg_start;
    for (std::size_t i = 0; i < run.log.size(); ++i)
        if (i == 0 || run.log[i].mode != run.log[i - 1].mode) seg_start.push_back(i);
    seg_start.push_back(run.log.size());
    auto segment = [&](std::size_t k) {
        return std::pair{seg_start[std::min(k, seg_start.size() - 1)], seg_start[std::min(k + 1, seg_start.size() - 1)]};
    };

    // Spherical: waypoints reached in order, obstacle never touched.
    double worst_wp = 0.0, clearance = 1e9;
    {
        auto [b, e] = segment(1);
        std::size_t from = b;
        for (std::size_t w = 0; w < g.waypoints.size(); ++w) {
            double best = 1e9;
            std::size_t at = from;
            for (std::size_t i = from; i < e; ++i) {
                const double d = norm(run.log[i].robot.position - g.waypoint(w));
                if (d < best) best = d, at = i;
            }
            worst_wp = std::max(worst_wp, best);
            from = at;
        }
        for (const auto& rec : run.log) {
            const Vec3 rel = rec.robot.position - g.obstacle;
            clearance = std::min(clearance, std::hypot(rel.x, rel.y) - g.obstacle_radius);
        }
    }
    need(worst_wp <= 0.1, "waypoint miss");
    need(clearance > 0.0, "obstacle collision");

    // Final alignment before the Cartesian switch.
    double align_pos = 1e9, align_deg = 1e9;
    {
        auto [b, e] = segment(4);
        if (e > b) {
            const Pose& p = run.log[e - 1].robot;
            align_pos = norm(p.position - g.dock);
            align_deg = quat_error_angle(p.orientation, g.dock_q) / mission::kDeg;
        }
    }
    need(align_pos <= 0.02 && align_deg <= 2.0, "valve alignment");

    // Locking: the robot does not move at all.
    double drift = 1e9;
    {
        auto [b, e] = segment(3);
        if (e > b) {
            drift = 0.0;
            const Pose ref = run.log[b].command.pose();
            for (std::size_t i = b; i < e; ++i) {
                drift = std::max(drift, norm(run.log[i].robot.position - ref.position));
                drift = std::max(drift, quat_error_angle(run.log[i].robot.orientation, ref.orientation));
                if (!(run.log[i].command.pose() == ref) || !(run.log[i].robot == ref)) drift = std::max(drift, 1e-300);
            }
        }
    }
    need(drift == 0.0, "lock drift");

    // Cartesian: stay inside the L-shaped corridor (1 m wide).
    double excursion = 1e9;
    {
        auto [b, e] = segment(5);
        const Vec3 c = run.corridor_start;
        const double L = g.corridor_leg, w = g.corridor_half_width;
        auto inside = [&](const Vec3& p) {
            const bool leg1 = p.x >= c.x - w && p.x <= c.x + w && p.y >= c.y - w && p.y <= c.y + L + w;
            const bool leg2 = p.y >= c.y + L - w && p.y <= c.y + L + w && p.x >= c.x - w && p.x <= c.x + L + w;
            return leg1 || leg2;
        };
        int outside = 0;
        double reach_x = -1e9, reach_y = -1e9;
        for (std::size_t i = b; i < e; ++i) {
            const Vec3& p = run.log[i].robot.position;
            outside += inside(p) ? 0 : 1;
            reach_x = std::max(reach_x, p.x - c.x);
            reach_y = std::max(reach_y, p.y - c.y);
        }
        excursion = outside;
        need(e > b && reach_y >= L - 0.05 && reach_x >= L - 0.05, "corridor not traversed");
    }
    need(excursion == 0, "left corridor");

    // Replay of the recorded frames reproduces the closed-loop log byte for byte.
    const ReplayResult replayed = replay(mission::engine_config(g), run.frames);
    need(serialize(replayed.log) == serialize(run.log), "replay differs from live run");

    std::string detail = "waypoint err " + fmt("%.3f m", worst_wp) + ", clearance " + fmt("%.3f m", clearance) +
                         ", align " + fmt("%.4f m", align_pos) + "/" + fmt("%.3f deg", align_deg) + ", lock drift " +
                         fmt("%g", drift) + ", corridor exits " + fmt("%g", excursion) + ", sim " +
                         fmt("%.1f s", run.log.empty() ? 0.0 : static_cast<double>(run.log.back().tick) / 100.0);
    for (const auto& f : failures) detail += "; FAILED: " + f;
    return {failures.empty(), detail};
}

// ------------------------------------------------------------------ latency

Outcome latency() {
    EngineConfig cfg;
    cfg.session.latency = 0.4;
    const double rate = cfg.session.tick_rate;
    std::vector<OperatorFrame> frames;
    for (int i = 0; i < 3000; ++i) {
        const double t = i / rate;
        OperatorFrame f;
        f.t = t;
        f.shoulder = {0, 0, 1.4};
        f.hand.position = Vec3{0.4, 0, 1.2} + Vec3{0.15 * std::sin(0.9 * t) + 0.05 * std::sin(2.3 * t + 0.4),
                                                    0.12 * std::sin(0.6 * t + 1.0), 0.08 * std::cos(1.7 * t)};
        f.knuckles = {0.5, 0.5, 0.5, 0.5, 0.5};
        frames.push_back(f);
    }
    const ReplayResult r = replay(cfg, frames);
    if (!r.metrics || !r.metrics->hand_command_lag_s) return {false, "no correlation peak"};
    const double lag = *r.metrics->hand_command_lag_s;
    return {std::abs(lag - 0.4) <= 1.0 / rate + 1e-12,
            "peak at " + fmt("%.3f s", lag) + " (mean input latency " + fmt("%.3f s", r.metrics->mean_input_latency_s) +
                ")"};
}

// ------------------------------------------------------------ determinism

Outcome determinism(const mission::Run& run) {
    auto once = [&] {
        const ReplayResult r = replay(mission::engine_config(), run.frames);
        return serialize(r.log) + replay_report(r);
    };
    const std::string a = once(), b = once();
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

} // namespace

int main(int argc, char** argv) {
    std::string mission_log;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--write-mission-log" && i + 1 < argc) {
            mission_log = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--write-mission-log <path>]\n";
            return 2;
        }
    }

    using clock = std::chrono::steady_clock;
    std::optional<mission::Run> run;
    double mission_s = 0.0;
    auto ensure_mission = [&]() -> const mission::Run& {
        if (!run) {
            const auto t0 = clock::now();
            run = mission::fly();
            mission_s = std::chrono::duration<double>(clock::now() - t0).count();
        }
        return *run;
    };

    const std::vector<Criterion> criteria{
        {"plant-decay-law", 5.0, plant_decay},
        {"algorithm-oracle-equivalence", 10.0, algorithm_oracles},
        {"spherical-ray-invariant", 0.0, spherical_ray},
        {"cartesian-stop-zone", 0.0, cartesian_zone},
        {"operation-locking-contracts", 0.0, operation_locking},
        {"gesture-debounce", 0.0, gesture_debounce},
        {"mission-replay", 30.0, [&] { return mission_replay(ensure_mission()); }},
        {"latency-reproduction", 0.0, latency},
        {"replay-determinism", 0.0, [&] { return determinism(ensure_mission()); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        if (c.name == "mission-replay") secs = std::max(secs, mission_s);
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            o.pass = false;
            o.detail += "; too slow (limit " + fmt("%.0f s", c.time_limit_s) + ")";
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt("%.2f s", secs) << "]"
                  << std::endl;
    }

    if (!mission_log.empty()) {
        std::ofstream out(mission_log);
        write_frames_jsonl(out, ensure_mission().frames);
        if (!out) {
            std::cerr << "cannot write " << mission_log << "\n";
            return 1;
        }
    }

    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}
