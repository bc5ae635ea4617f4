#pragma once

#include <vector>

#include "isokit/engine.hpp"
#include "isokit/topologies.hpp"
#include "isokit/trace.hpp"

namespace isokit {

/// Drive for the A/B inputs (0/5 V logic waveforms).
struct BridgeStimulus {
    Stimulus a_waveform;
    Stimulus b_waveform;

    /// Complementary square wave at `frequency`; A starts low / B starts
    /// high, so the low-side channel activates first.
    static BridgeStimulus complementary_square(double frequency, double t_stop,
                                               double high = 5.0,
                                               double edge = 10e-9);
    void validate() const;
};

/// Transmit-stack voltage for a logic input pair: (0,1)->+5, (1,0)->-5,
/// equal inputs -> 0.
double vtx_level(int a, int b, double supply = 5.0);

/// Event-level model of the bridge: each output asserts (active low)
/// delay_on after its enabling V_TX polarity appears and releases delay_off
/// after it disappears. Channels: V(DLS), V(DHS), V_TX.
Trace behavioral_bridge(const BridgeStimulus& stim, double delay_on,
                        double delay_off, double t_stop, double dt = 10e-9);

/// Full engine transient of the stacked-oscillator circuit.
/// Adds the derived V_TX channel (rail difference).
Trace transient_bridge(const HalfBridgeConfig& cfg, const BridgeStimulus& stim,
                       const SimOptions& opts);

struct LockoutResult {
    bool lockout_ok = false;
    double overlap_worst = 0.0;  // s, worst simultaneous-active span
};

/// Scans the whole trace for spans where both outputs are active at once.
LockoutResult lockout_check(const Trace& trace, double v_active = 0.8,
                            const std::string& low_channel = "V(DLS)",
                            const std::string& high_channel = "V(DHS)");

struct DeadTimeStats {
    double min = 0.0;
    double mean = 0.0;
    int count = 0;
};

struct DeadTimeResult {
    DeadTimeStats low_to_high;  // DLS releases, DHS asserts
    DeadTimeStats high_to_low;
};

/// Handover gaps between one output releasing and the other asserting.
/// Negative values indicate overlap. Throws if no handovers are present.
DeadTimeResult dead_time(const Trace& trace, double v_active = 0.8,
                         double v_inactive = 4.2,
                         const std::string& low_channel = "V(DLS)",
                         const std::string& high_channel = "V(DHS)");

struct BridgeMetrics {
    bool lockout_ok = false;
    double overlap_worst = 0.0;
    DeadTimeResult dead;
    std::vector<double> v_tx_levels;
};

}  // namespace isokit
