#pragma once

#include <string>
#include <vector>

#include "isokit/circuit.hpp"
#include "isokit/trace.hpp"

namespace isokit {

struct SimOptions {
    double t_stop = 1e-6;
    double dt_max = 1e-9;
    double dt_min = 0.0;  // 0 -> dt_max / 4096
    double newton_tol = 1e-6;
    int newton_max_iter = 50;
    int output_decimation = 1;

    void validate() const;
};

/// Structural summary of the assembled MNA system.
struct SystemInfo {
    int node_unknowns = 0;
    int inductor_currents = 0;
    int source_currents = 0;
    int storage_charges = 0;
    int total() const {
        return node_unknowns + inductor_currents + source_currents + storage_charges;
    }
};

/// Validates topology (ground reachability, passivity, source presence) and
/// reports the unknown layout. Throws with the offending node named.
SystemInfo assemble(const Circuit& circuit);

/// Nonlinear transient: trapezoidal integration with Newton at each step and
/// dt halving on non-convergence. Deterministic for identical inputs.
Trace transient(const Circuit& circuit, const SimOptions& opts);

struct FrequencyMeasurement {
    double mean_hz = 0.0;
    double stddev_hz = 0.0;
    int periods = 0;
};

/// Oscillation frequency from rising mean-crossing intervals over
/// [w0, w1] (absolute trace times).
FrequencyMeasurement measure_frequency(const std::vector<double>& v, double dt,
                                       double t0, double w0, double w1);

/// First time the sliding one-period peak-to-peak envelope exceeds the
/// threshold. Throws if the threshold is never reached.
double measure_startup(const std::vector<double>& v, double dt, double t0,
                       double amplitude_threshold);

/// Mean supply power: mean(v * i) over [w0, w1].
double measure_power(const Trace& trace, const std::string& v_channel,
                     const std::string& i_channel, double w0, double w1);

}  // namespace isokit
