#pragma once

#include <string>

namespace isokit {

/// Planar square spiral coil, described by its printed geometry.
struct CoilGeometry {
    int turns = 8;
    double trace_width = 200e-6;      // m
    double trace_spacing = 200e-6;    // m
    double inner_side = 9.7e-3;       // m, inner square side length
    double copper_thickness = 35e-6;  // m

    void validate() const;
};

/// PCB laminate the coils are printed on.
struct BoardStack {
    double board_thickness = 1.6e-3;        // m
    double dielectric_strength = 20e6;      // V/m
    double copper_resistivity = 1.68e-8;    // ohm*m, Cu at 20 C

    void validate() const;
};

/// Lumped electrical image of the two-coil PCB transformer.
struct TransformerModel {
    double l_primary = 0.0;           // H
    double l_secondary = 0.0;         // H
    double mutual = 0.0;              // H
    double coupling_k = 0.0;          // mutual / sqrt(l1*l2)
    double r_series_primary = 0.0;    // ohm
    double r_series_secondary = 0.0;  // ohm
    double extraction_frequency = 1e6;  // Hz

    void validate() const;
};

/// Outer side length of the spiral: inner side plus the wound traces.
double outer_side(const CoilGeometry& geom);

/// Self inductance via the current-sheet approximation for square spirals.
double self_inductance(const CoilGeometry& geom);

/// Mutual inductance between two identical coaxial coils a vertical
/// `separation` apart, by per-turn square-filament summation.
/// Returns {M, k} with k referenced to self_inductance().
struct MutualResult {
    double mutual;      // H
    double coupling_k;  // dimensionless, clamped below 1
};
MutualResult mutual_inductance(const CoilGeometry& geom, double separation);

/// Series trace resistance with first-order skin-effect thickness clamping.
double series_resistance(const CoilGeometry& geom, const BoardStack& stack,
                         double frequency);

/// Dielectric breakdown voltage of the bare laminate between the coils.
double breakdown_voltage(const BoardStack& stack);

/// Full extraction: both coils identical, separated by the board thickness.
TransformerModel extract_transformer(const CoilGeometry& geom,
                                     const BoardStack& stack,
                                     double extraction_frequency);

}  // namespace isokit
