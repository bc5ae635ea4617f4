#pragma once

#include <cstdint>
#include <vector>

#include "isokit/trace.hpp"

namespace isokit {

/// NRZ bit pattern with drive levels and edge rate.
struct BitPattern {
    std::vector<int> bits;       // 0/1
    double bit_rate = 1e6;       // bits/s
    double level_low = 0.0;      // V
    double level_high = 5.0;     // V
    double rise_fall = 10e-9;    // s

    double bit_period() const { return 1.0 / bit_rate; }
    void validate() const;
};

/// Maximal-length PRBS7 bits (x^7 + x^6 + 1, output = feedback bit).
std::vector<int> prbs7(uint8_t seed, size_t n);

/// Piecewise-linear 0/5 V NRZ waveform with trapezoidal edges.
Stimulus nrz_stimulus(const BitPattern& p);

struct EdgeDelayStats {
    double mean = 0.0;
    double max = 0.0;
    int count = 0;
};

struct DelayResult {
    EdgeDelayStats rise;  // keyed to the input edge direction
    EdgeDelayStats fall;
    int lost_edges = 0;
};

/// Per-input-edge delay to the matching (polarity-corrected) output
/// threshold crossing. Edges before t_start are ignored.
DelayResult propagation_delay(const std::vector<double>& input,
                              const std::vector<double>& output, double dt,
                              double t0, double v_threshold = 2.5,
                              bool output_inverted = false,
                              double t_start = 0.0);

struct EyeSample {
    double phase_s;
    double voltage_v;
    int bit_class;  // recovered bit of the owning interval
};

struct EyeResult {
    double eye_height = 0.0;  // V
    double eye_width = 0.0;   // s
    std::vector<EyeSample> folded;
};

/// Eye metrics over the trace folded modulo the bit period.
/// alignment_offset shifts the folding origin (use the measured delay).
EyeResult eye_diagram(const std::vector<double>& output, double dt, double t0,
                      double bit_period, double alignment_offset,
                      double v_threshold = 2.5, double band_half_width = 0.5);

struct BitCheckResult {
    int errors = 0;
    int checked = 0;
    int latency_bits = 0;
};

/// Samples each bit at center + sample_offset and compares with the sent
/// pattern, auto-resolving integer-bit latency by best correlation.
BitCheckResult check_bits(const std::vector<double>& output, double dt,
                          double t0, const BitPattern& sent,
                          double sample_offset, bool output_inverted,
                          double v_threshold = 2.5);

struct LinkMetrics {
    DelayResult delay;
    double eye_height = 0.0;
    double eye_width = 0.0;
    int bit_errors = 0;
    int bits_checked = 0;
};

}  // namespace isokit
