#pragma once

#include <string>
#include <vector>

#include "isokit/devices.hpp"
#include "isokit/magnetics.hpp"
#include "isokit/trace.hpp"

namespace isokit {

/// Fixed-topology netlist over named nodes. Node 0 is ground ("0").
class Circuit {
public:
    Circuit() { node_names_.push_back("0"); }

    /// Returns the index for `name`, creating the node if needed.
    int node(const std::string& name);
    int find_node(const std::string& name) const;  // -1 if absent
    int node_count() const { return static_cast<int>(node_names_.size()); }
    const std::string& node_name(int idx) const { return node_names_[static_cast<size_t>(idx)]; }

    struct Resistor {
        int a, b;
        double ohms;
    };
    struct Capacitor {
        int a, b;
        double farads;
        double v0 = 0.0;
    };
    struct Inductor {
        int a, b;
        double henries;
        double r_series = 0.0;
        double i0 = 0.0;
        std::string name;
    };
    struct CoupledPair {
        int p1, p2;  // primary terminals
        int s1, s2;  // secondary terminals
        TransformerModel xf;
        double ip0 = 0.0, is0 = 0.0;
        std::string name;
    };
    struct VSource {
        int pos, neg;
        Stimulus wave;
        std::string name;
    };
    struct Mosfet {
        int d, g, s;
        MosfetParams p;
        std::string name;
    };
    struct Bjt {
        int c, b, e;
        BjtParams p;
        std::string name;
    };
    struct Diode {
        int a, k;
        DiodeParams p;
        std::string name;
    };
    /// Constant current injected into a node for t in [0, t_end); used as
    /// the deterministic startup imbalance for symmetric oscillators.
    struct CurrentPulse {
        int node;
        double amps;
        double t_end;
    };

    void add_resistor(const std::string& a, const std::string& b, double ohms);
    void add_capacitor(const std::string& a, const std::string& b, double farads,
                       double v0 = 0.0);
    void add_inductor(const std::string& name, const std::string& a,
                      const std::string& b, double henries, double r_series = 0.0,
                      double i0 = 0.0);
    void add_coupled_pair(const std::string& name, const std::string& p1,
                          const std::string& p2, const std::string& s1,
                          const std::string& s2, const TransformerModel& xf);
    void add_vsource(const std::string& name, const std::string& pos,
                     const std::string& neg, Stimulus wave);
    void add_mosfet(const std::string& name, const std::string& d,
                    const std::string& g, const std::string& s,
                    const MosfetParams& p);
    void add_bjt(const std::string& name, const std::string& c,
                 const std::string& b, const std::string& e, const BjtParams& p);
    void add_diode(const std::string& name, const std::string& a,
                   const std::string& k, const DiodeParams& p);
    void add_current_pulse(const std::string& node_name, double amps, double t_end);

    std::vector<Resistor> resistors;
    std::vector<Capacitor> capacitors;
    std::vector<Inductor> inductors;
    std::vector<CoupledPair> coupled_pairs;
    std::vector<VSource> vsources;
    std::vector<Mosfet> mosfets;
    std::vector<Bjt> bjts;
    std::vector<Diode> diodes;
    std::vector<CurrentPulse> current_pulses;

private:
    std::vector<std::string> node_names_;
};

}  // namespace isokit
