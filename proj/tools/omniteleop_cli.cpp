// omniteleop command line: live simulation, replay, recording, config checks.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "omniteleop/omniteleop.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct CommonFlags {
    std::string config_path;
    std::optional<double> rate;
    std::optional<double> latency;
    std::optional<std::string> listen;
    bool headless = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Configuration file (JSON)");
    cmd->add_option("--rate", f.rate, "Session tick rate [Hz]");
    cmd->add_option("--latency", f.latency, "Injected operator-frame latency [s]");
    cmd->add_option("--listen", f.listen, "Cockpit stream listen address host:port");
    cmd->add_flag("--headless", f.headless, "No console status output");
}

omniteleop::Config resolve_config(const CommonFlags& f) {
    omniteleop::Config cfg = f.config_path.empty() ? omniteleop::Config{} : omniteleop::load_config(f.config_path);
    omniteleop::apply_env_overrides(cfg.gateway);
    if (f.rate) cfg.engine.session.tick_rate = *f.rate;
    if (f.latency) cfg.engine.session.latency = *f.latency;
    if (f.listen) cfg.gateway.stream_listen = *f.listen;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hand-based teleoperation engine for omnidirectional aerial robots"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* sim = app.add_subcommand("sim", "Run the live gateway and session loop");
    add_common(sim, flags);
    double sim_duration = 0.0;
    std::optional<std::string> sim_record;
    sim->add_option("--duration", sim_duration, "Stop after this many seconds (0 = until interrupted)");
    sim->add_option("--record", sim_record, "Write session log records (JSON Lines) to this path");

    auto* rep = app.add_subcommand("replay", "Re-run a recorded frame or session log and print metrics");
    add_common(rep, flags);
    std::string replay_path;
    std::optional<std::string> replay_out;
    rep->add_option("log", replay_path, "Input JSON Lines file")->required();
    rep->add_option("--out", replay_out, "Write the regenerated session log here");

    auto* rec = app.add_subcommand("record", "Capture incoming operator frames to a JSON Lines file");
    add_common(rec, flags);
    std::string record_out;
    double record_duration = 0.0;
    rec->add_option("--out", record_out, "Output file")->required();
    rec->add_option("--duration", record_duration, "Stop after this many seconds (0 = until interrupted)");

    auto* chk = app.add_subcommand("check-config", "Validate a configuration file");
    std::string check_path;
    bool check_print = false;
    chk->add_option("file", check_path, "Configuration file")->required();
    chk->add_flag("--print", check_print, "Print the resolved configuration");

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        if (*chk) {
            const auto cfg = omniteleop::load_config(check_path);
            if (check_print) std::cout << omniteleop::config_to_json(cfg).dump(2) << "\n";
            std::cerr << "config ok\n";
            return 0;
        }

        auto cfg = resolve_config(flags);

        if (*sim) {
            if (sim_record) cfg.engine.session.record_path = *sim_record;
            const auto summary = omniteleop::run_live(cfg, {sim_duration, flags.headless}, g_stop);
            std::cout << omniteleop::jsonio::summary(summary).dump(2) << "\n";
            return 0;
        }
        if (*rep) {
            const auto result = omniteleop::replay(cfg.engine, omniteleop::read_frames_jsonl(replay_path));
            if (replay_out) {
                std::ofstream out(*replay_out);
                if (!out) throw omniteleop::Error("cannot open '" + *replay_out + "'");
                omniteleop::write_log_jsonl(out, result.log);
            }
            std::cout << omniteleop::replay_report(result) << "\n";
            return 0;
        }
        if (*rec) {
            std::ofstream out(record_out);
            if (!out) throw omniteleop::Error("cannot open '" + record_out + "'");
            const auto n = omniteleop::run_record(cfg.gateway, out, record_duration, g_stop);
            if (!flags.headless) std::cerr << "recorded " << n << " frames\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
