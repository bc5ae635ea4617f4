#pragma once

#include "isokit/circuit.hpp"
#include "isokit/devices.hpp"
#include "isokit/magnetics.hpp"
#include "isokit/trace.hpp"

namespace isokit {

/// Component values for the single-channel isolator. r_drain_a (R12) is
/// optional; 0 means omitted, which is the default and also the faster
/// startup configuration.
struct IsolatorConfig {
    TransformerModel transformer;
    double r_drain_a = 0.0;     // R12, ohms; 0 = omitted
    double r_drain_b = 1000.0;  // R9, ohms
    double r_base = 1000.0;     // R18, ohms
    double r_divider = 1000.0;  // R17, ohms
    double r_pullup = 5600.0;   // R16, ohms
    double r_gate = 10.0;       // drive source series resistance, ohms
    double supply = 5.0;        // V
    MosfetParams mosfet;
    BjtParams bjt;

    void validate() const;
};

/// Component values for the stacked dual-oscillator half-bridge signaller.
struct HalfBridgeConfig {
    TransformerModel transformer_low;   // L1/L2, low-side channel
    TransformerModel transformer_high;  // L3/L4, high-side channel
    double r_shared = 2200.0;           // R21, ohms
    double r_base = 1000.0;
    double r_divider = 1000.0;
    double r_pullup = 5600.0;
    double r_gate = 10.0;
    double supply_pos = 5.0;
    double supply_neg = -5.0;
    MosfetParams mosfet;
    BjtParams bjt;

    void validate() const;
};

/// Transmitter oscillator only (input DX gating the cross-coupled pair
/// across the primary; secondary left open). Nodes: DX, VOSC, D1, D2, S1.
Circuit build_transmitter(const IsolatorConfig& cfg, const Stimulus& drive);

/// Full isolator: transmitter plus the full-wave rectifying receiver.
/// Output node DY is open-collector with pull-up, inverted vs DX.
Circuit build_isolator(const IsolatorConfig& cfg, const Stimulus& drive);

/// Stacked dual-oscillator link with complementary polarity, nodes A and B
/// driving V_TX; receivers produce active-low DLS and DHS.
Circuit build_halfbridge(const HalfBridgeConfig& cfg, const Stimulus& drive_a,
                         const Stimulus& drive_b);

}  // namespace isokit
