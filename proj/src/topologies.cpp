#include "isokit/topologies.hpp"

#include <stdexcept>

namespace isokit {

namespace {

constexpr double kStartupPulseAmps = 1e-6;
constexpr double kStartupPulseSeconds = 1e-9;

void add_receiver(Circuit& c, const std::string& sec_hot,
                  const std::string& prefix, const std::string& out,
                  double r_base, double r_divider, double r_pullup,
                  double supply, const BjtParams& bjt) {
    const std::string x = prefix + "X";
    const std::string vcc = prefix + "VCC";
    c.add_resistor(sec_hot, x, r_base);     // R18 role
    c.add_resistor(x, "0", r_divider);      // R17 role
    c.add_bjt(prefix + "Q7", out, x, "0", bjt);
    c.add_bjt(prefix + "Q8", out, x, sec_hot, bjt);
    c.add_vsource(prefix + "VRX", vcc, "0", Stimulus::dc(supply));
    c.add_resistor(vcc, out, r_pullup);     // R16 role
}

}  // namespace

void IsolatorConfig::validate() const {
    transformer.validate();
    if (transformer.coupling_k >= 1.0)
        throw std::invalid_argument("isolator: transformer k must be < 1");
    if (r_drain_a < 0) throw std::invalid_argument("isolator: r_drain_a must be >= 0");
    for (double r : {r_drain_b, r_base, r_divider, r_pullup, r_gate})
        if (r <= 0) throw std::invalid_argument("isolator: resistances must be > 0");
    if (supply <= 0) throw std::invalid_argument("isolator: supply must be > 0");
    mosfet.validate();
    bjt.validate();
}

void HalfBridgeConfig::validate() const {
    transformer_low.validate();
    transformer_high.validate();
    for (double r : {r_shared, r_base, r_divider, r_pullup, r_gate})
        if (r <= 0) throw std::invalid_argument("halfbridge: resistances must be > 0");
    if (supply_pos <= 0) throw std::invalid_argument("halfbridge: supply_pos must be > 0");
    if (supply_neg >= 0) throw std::invalid_argument("halfbridge: supply_neg must be < 0");
    mosfet.validate();
    bjt.validate();
}

static void add_transmitter(Circuit& c, const IsolatorConfig& cfg,
                            const Stimulus& drive) {
    c.add_vsource("VDX", "DX", "0", drive);
    c.add_resistor("DX", "VOSC", cfg.r_gate);
    if (cfg.r_drain_a > 0) c.add_resistor("VOSC", "D1", cfg.r_drain_a);  // R12
    c.add_resistor("VOSC", "D2", cfg.r_drain_b);                        // R9
    c.add_mosfet("Q5", "D1", "D2", "0", cfg.mosfet);
    c.add_mosfet("Q6", "D2", "D1", "0", cfg.mosfet);
    c.add_coupled_pair("XFMR", "D1", "D2", "S1", "0", cfg.transformer);
    // deterministic replacement for startup noise, one step long
    c.add_current_pulse("D1", kStartupPulseAmps, kStartupPulseSeconds);
}

Circuit build_transmitter(const IsolatorConfig& cfg, const Stimulus& drive) {
    cfg.validate();
    Circuit c;
    add_transmitter(c, cfg, drive);
    return c;
}

Circuit build_isolator(const IsolatorConfig& cfg, const Stimulus& drive) {
    cfg.validate();
    Circuit c;
    add_transmitter(c, cfg, drive);
    add_receiver(c, "S1", "", "DY", cfg.r_base, cfg.r_divider, cfg.r_pullup,
                 cfg.supply, cfg.bjt);
    return c;
}

Circuit build_halfbridge(const HalfBridgeConfig& cfg, const Stimulus& drive_a,
                         const Stimulus& drive_b) {
    cfg.validate();
    Circuit c;
    c.add_vsource("VA", "A", "0", drive_a);
    c.add_vsource("VB", "B", "0", drive_b);
    c.add_resistor("A", "RAILA", cfg.r_gate);
    c.add_resistor("B", "RAILB", cfg.r_gate);

    // top oscillator (sources at the B rail); conducts via body diodes
    // when the stack current flows downward
    c.add_mosfet("Q12", "M1", "M2", "RAILB", cfg.mosfet);
    c.add_mosfet("Q13", "M2", "M1", "RAILB", cfg.mosfet);
    c.add_coupled_pair("XFH", "M1", "M2", "SH1", "0", cfg.transformer_high);

    // bottom oscillator (sources at the A rail)
    c.add_mosfet("Q14", "N1", "N2", "RAILA", cfg.mosfet);
    c.add_mosfet("Q15", "N2", "N1", "RAILA", cfg.mosfet);
    c.add_coupled_pair("XFL", "N1", "N2", "SL1", "0", cfg.transformer_low);

    // single shared bias resistor between the two tanks
    c.add_resistor("M2", "N2", cfg.r_shared);  // R21

    add_receiver(c, "SL1", "L_", "DLS", cfg.r_base, cfg.r_divider, cfg.r_pullup,
                 cfg.supply_pos, cfg.bjt);
    add_receiver(c, "SH1", "H_", "DHS", cfg.r_base, cfg.r_divider, cfg.r_pullup,
                 cfg.supply_pos, cfg.bjt);

    c.add_current_pulse("N1", kStartupPulseAmps, kStartupPulseSeconds);
    c.add_current_pulse("M1", kStartupPulseAmps, kStartupPulseSeconds);
    return c;
}

}  // namespace isokit
