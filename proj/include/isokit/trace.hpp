#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace isokit {

/// Piecewise-linear waveform; holds its last value beyond the final point.
struct Stimulus {
    std::vector<std::pair<double, double>> points;  // (time_s, volts)

    static Stimulus dc(double volts) { return Stimulus{{{0.0, volts}}}; }

    void validate() const;
    double at(double t) const;
};

/// Uniformly sampled simulation output: node voltages and branch currents.
struct Trace {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> data;  // one vector per channel
    std::map<std::string, std::string> metadata;

    size_t size() const { return data.empty() ? 0 : data[0].size(); }
    double time(size_t i) const { return t0 + dt * static_cast<double>(i); }
    bool has_channel(const std::string& name) const;
    const std::vector<double>& channel(const std::string& name) const;

    /// Appends a derived channel (must match the sample count).
    void add_channel(const std::string& name, std::vector<double> samples);

    /// CSV: header "time_s,<ch>,...", full-precision decimal values.
    void write_csv(std::ostream& os) const;
};

}  // namespace isokit
