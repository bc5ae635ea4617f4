#include "isokit/circuit.hpp"

#include <stdexcept>

namespace isokit {

int Circuit::node(const std::string& name) {
    const int existing = find_node(name);
    if (existing >= 0) return existing;
    node_names_.push_back(name);
    return static_cast<int>(node_names_.size()) - 1;
}

int Circuit::find_node(const std::string& name) const {
    for (size_t i = 0; i < node_names_.size(); ++i)
        if (node_names_[i] == name) return static_cast<int>(i);
    if (name == "gnd" || name == "GND") return 0;
    return -1;
}

void Circuit::add_resistor(const std::string& a, const std::string& b, double ohms) {
    if (ohms <= 0) throw std::invalid_argument("resistor: ohms must be > 0");
    resistors.push_back({node(a), node(b), ohms});
}

void Circuit::add_capacitor(const std::string& a, const std::string& b,
                            double farads, double v0) {
    if (farads <= 0) throw std::invalid_argument("capacitor: farads must be > 0");
    capacitors.push_back({node(a), node(b), farads, v0});
}

void Circuit::add_inductor(const std::string& name, const std::string& a,
                           const std::string& b, double henries, double r_series,
                           double i0) {
    if (henries <= 0) throw std::invalid_argument("inductor: henries must be > 0");
    if (r_series < 0) throw std::invalid_argument("inductor: r_series must be >= 0");
    inductors.push_back({node(a), node(b), henries, r_series, i0, name});
}

void Circuit::add_coupled_pair(const std::string& name, const std::string& p1,
                               const std::string& p2, const std::string& s1,
                               const std::string& s2, const TransformerModel& xf) {
    xf.validate();
    coupled_pairs.push_back({node(p1), node(p2), node(s1), node(s2), xf, 0.0, 0.0, name});
}

void Circuit::add_vsource(const std::string& name, const std::string& pos,
                          const std::string& neg, Stimulus wave) {
    wave.validate();
    vsources.push_back({node(pos), node(neg), std::move(wave), name});
}

void Circuit::add_mosfet(const std::string& name, const std::string& d,
                         const std::string& g, const std::string& s,
                         const MosfetParams& p) {
    p.validate();
    mosfets.push_back({node(d), node(g), node(s), p, name});
}

void Circuit::add_bjt(const std::string& name, const std::string& c,
                      const std::string& b, const std::string& e,
                      const BjtParams& p) {
    p.validate();
    bjts.push_back({node(c), node(b), node(e), p, name});
}

void Circuit::add_diode(const std::string& name, const std::string& a,
                        const std::string& k, const DiodeParams& p) {
    p.validate();
    diodes.push_back({node(a), node(k), p, name});
}

void Circuit::add_current_pulse(const std::string& node_name, double amps,
                                double t_end) {
    current_pulses.push_back({node(node_name), amps, t_end});
}

}  // namespace isokit
