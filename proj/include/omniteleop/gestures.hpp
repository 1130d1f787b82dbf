#pragma once

// Glove gesture recognition: per-finger two-threshold classification, exact
// five-finger pattern lookup, and a hold timer that turns a sustained gesture
// into a single mode-switch event.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omniteleop/error.hpp"

namespace omniteleop {

inline constexpr std::size_t kFingerCount = 5;

enum class FingerState { Contracted, Extended, Indeterminate };

using FingerPattern = std::array<FingerState, kFingerCount>;
using FingerValues = std::array<double, kFingerCount>;

/// Name of a configured gesture ("fist", "open", ...).
struct GestureId {
    std::string name;

    friend auto operator<=>(const GestureId&, const GestureId&) = default;
};

struct GesturePattern {
    GestureId id;
    FingerPattern fingers;
};

struct GestureConfig {
    // Finger order: thumb, index, middle, ring, pinky.
    FingerValues contract_thresh{0.7, 0.7, 0.7, 0.7, 0.7};
    FingerValues extend_thresh{0.3, 0.3, 0.3, 0.3, 0.3};
    std::vector<GesturePattern> patterns;
    double hold_duration = 1.0; // s
    // Glove channel indices averaged into each finger's flexion value.
    std::array<std::vector<std::size_t>, kFingerCount> channel_map{{{0}, {1}, {2}, {3}, {4}}};

    static GestureConfig defaults() {
        using enum FingerState;
        GestureConfig cfg;
        cfg.patterns = {
            {{"fist"}, {Contracted, Contracted, Contracted, Contracted, Contracted}},
            {{"open"}, {Extended, Extended, Extended, Extended, Extended}},
            {{"point"}, {Contracted, Extended, Contracted, Contracted, Contracted}},
            {{"two"}, {Contracted, Extended, Extended, Contracted, Contracted}},
            {{"three"}, {Contracted, Extended, Extended, Extended, Contracted}},
        };
        return cfg;
    }

    void validate() const {
        for (std::size_t i = 0; i < kFingerCount; ++i) {
            if (!std::isfinite(contract_thresh[i]) || !std::isfinite(extend_thresh[i]) ||
                !(extend_thresh[i] < contract_thresh[i]))
                throw InvalidConfig("gesture thresholds: finger " + std::to_string(i) +
                                    " needs extend_thresh < contract_thresh");
            if (channel_map[i].empty())
                throw InvalidConfig("gesture channel_map: finger " + std::to_string(i) + " has no channels");
        }
        if (!(hold_duration > 0.0) || !std::isfinite(hold_duration))
            throw InvalidConfig("gesture hold_duration must be positive");
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            for (FingerState f : patterns[i].fingers)
                if (f == FingerState::Indeterminate)
                    throw InvalidConfig("gesture pattern '" + patterns[i].id.name + "' contains an indeterminate finger");
            for (std::size_t j = 0; j < i; ++j) {
                if (patterns[j].id == patterns[i].id)
                    throw InvalidConfig("gesture '" + patterns[i].id.name + "' defined twice");
                if (patterns[j].fingers == patterns[i].fingers)
                    throw InvalidConfig("gestures '" + patterns[j].id.name + "' and '" + patterns[i].id.name +
                                        "' share a finger pattern");
            }
        }
    }
};

inline FingerState classify_finger(double stretch, double contract_thresh, double extend_thresh) {
    if (stretch > contract_thresh) return FingerState::Contracted;
    if (stretch < extend_thresh) return FingerState::Extended;
    return FingerState::Indeterminate;
}

/// Averages the configured channels per finger. Empty if the glove sent too few channels.
inline std::optional<FingerValues> aggregate_knuckles(std::span<const double> knuckles, const GestureConfig& cfg) {
    FingerValues out{};
    for (std::size_t i = 0; i < kFingerCount; ++i) {
        double sum = 0.0;
        for (std::size_t ch : cfg.channel_map[i]) {
            if (ch >= knuckles.size()) return std::nullopt;
            sum += knuckles[ch];
        }
        out[i] = sum / static_cast<double>(cfg.channel_map[i].size());
    }
    return out;
}

inline std::optional<GestureId> recognize_gesture(const FingerValues& fingers, const GestureConfig& cfg) {
    FingerPattern observed{};
    for (std::size_t i = 0; i < kFingerCount; ++i) {
        observed[i] = classify_finger(fingers[i], cfg.contract_thresh[i], cfg.extend_thresh[i]);
        if (observed[i] == FingerState::Indeterminate) return std::nullopt;
    }
    for (const auto& p : cfg.patterns)
        if (p.fingers == observed) return p.id;
    return std::nullopt;
}

struct ModeSwitchEvent {
    GestureId gesture;
    double at = 0.0; // stream time the hold completed [s]
};

struct HoldTracker {
    std::optional<GestureId> candidate;
    double since = 0.0;
    bool fired = false; // event already emitted for the current hold
};

/// Feeds one observation into the debounce timer.
inline std::pair<HoldTracker, std::optional<ModeSwitchEvent>> update_hold(HoldTracker tr, double now,
                                                                          const std::optional<GestureId>& g,
                                                                          double hold) {
    if (!g) return {HoldTracker{}, std::nullopt};
    if (tr.candidate != g) {
        tr.candidate = g;
        tr.since = now;
        tr.fired = false;
    }
    std::optional<ModeSwitchEvent> ev;
    if (!tr.fired && now - tr.since >= hold) {
        tr.fired = true;
        ev = ModeSwitchEvent{*g, now};
    }
    return {tr, ev};
}

} // namespace omniteleop
