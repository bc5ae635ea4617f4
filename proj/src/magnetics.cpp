#include "isokit/magnetics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace isokit {

namespace {

constexpr double kMu0 = 4e-7 * std::numbers::pi;

// Mutual inductance of two parallel coaxial filament segments of lengths a
// and b (centered on a common perpendicular) at perpendicular distance rho.
// Closed-form Neumann integral.
double segment_mutual(double a, double b, double rho) {
    auto g = [rho](double u) {
        return u * std::asinh(u / rho) - std::sqrt(u * u + rho * rho);
    };
    const double a1 = -a / 2, a2 = a / 2, b1 = -b / 2, b2 = b / 2;
    return kMu0 / (4.0 * std::numbers::pi) *
           (g(a2 - b1) - g(a1 - b1) - g(a2 - b2) + g(a1 - b2));
}

// Mutual inductance of two concentric coaxial square filament loops with
// side lengths a and b, axially offset by d. Opposite sides carry
// antiparallel current, hence the subtraction.
double square_loop_mutual(double a, double b, double d) {
    const double rho_near = std::hypot((a - b) / 2, d);
    const double rho_far = std::hypot((a + b) / 2, d);
    return 4.0 * (segment_mutual(a, b, rho_near) - segment_mutual(a, b, rho_far));
}

// Centerline side length of each turn, innermost first.
std::vector<double> turn_sides(const CoilGeometry& g) {
    std::vector<double> sides;
    sides.reserve(static_cast<size_t>(g.turns));
    const double pitch = g.trace_width + g.trace_spacing;
    for (int j = 0; j < g.turns; ++j)
        sides.push_back(g.inner_side + g.trace_width + 2.0 * j * pitch);
    return sides;
}

}  // namespace

void CoilGeometry::validate() const {
    if (turns < 1) throw std::invalid_argument("coil: turns must be >= 1");
    if (trace_width <= 0) throw std::invalid_argument("coil: trace_width must be > 0");
    if (trace_spacing < 0) throw std::invalid_argument("coil: trace_spacing must be >= 0");
    if (inner_side <= 0) throw std::invalid_argument("coil: inner_side must be > 0");
    if (copper_thickness <= 0) throw std::invalid_argument("coil: copper_thickness must be > 0");
}

void BoardStack::validate() const {
    if (board_thickness <= 0) throw std::invalid_argument("board: thickness must be > 0");
    if (dielectric_strength <= 0) throw std::invalid_argument("board: dielectric_strength must be > 0");
    if (copper_resistivity <= 0) throw std::invalid_argument("board: copper_resistivity must be > 0");
}

void TransformerModel::validate() const {
    if (l_primary <= 0 || l_secondary <= 0)
        throw std::invalid_argument("transformer: inductances must be > 0");
    if (coupling_k < 0 || coupling_k >= 1.0)
        throw std::invalid_argument("transformer: coupling_k must be in [0,1)");
    if (mutual > std::sqrt(l_primary * l_secondary))
        throw std::invalid_argument("transformer: M exceeds sqrt(L1*L2)");
    if (r_series_primary < 0 || r_series_secondary < 0)
        throw std::invalid_argument("transformer: series resistance must be >= 0");
}

double outer_side(const CoilGeometry& geom) {
    geom.validate();
    return geom.inner_side +
           2.0 * (geom.turns * geom.trace_width +
                  (geom.turns - 1) * geom.trace_spacing);
}

double self_inductance(const CoilGeometry& geom) {
    geom.validate();
    const double d_out = outer_side(geom);
    const double d_in = geom.inner_side;
    const double d_avg = (d_out + d_in) / 2.0;
    const double rho = (d_out - d_in) / (d_out + d_in);
    if (rho <= 0.0 || rho >= 1.0)
        throw std::invalid_argument("coil: fill ratio out of range (0,1)");
    // Current-sheet coefficients for a square spiral.
    const double c1 = 1.27, c2 = 2.07, c3 = 0.18, c4 = 0.13;
    const double n = geom.turns;
    return c1 * kMu0 * n * n * d_avg / 2.0 *
           (std::log(c2 / rho) + c3 * rho + c4 * rho * rho);
}

MutualResult mutual_inductance(const CoilGeometry& geom, double separation) {
    geom.validate();
    if (separation <= 0)
        throw std::invalid_argument("mutual_inductance: separation must be > 0");

    const auto sides = turn_sides(geom);
    double m = 0.0;
    for (double a : sides)
        for (double b : sides) m += square_loop_mutual(a, b, separation);

    const double l = self_inductance(geom);
    double k = m / l;  // identical coils: sqrt(L1*L2) = L
    // The one-filament-per-turn discretization overshoots slightly as the
    // coils approach contact; clamp to keep the model passive.
    constexpr double kMax = 0.99;
    if (k > kMax) {
        k = kMax;
        m = k * l;
    }
    return {m, k};
}

double series_resistance(const CoilGeometry& geom, const BoardStack& stack,
                         double frequency) {
    geom.validate();
    stack.validate();
    if (frequency < 0)
        throw std::invalid_argument("series_resistance: frequency must be >= 0");

    const double d_avg = (outer_side(geom) + geom.inner_side) / 2.0;
    const double length = 4.0 * geom.turns * d_avg;
    const double r_dc = stack.copper_resistivity * length /
                        (geom.trace_width * geom.copper_thickness);
    if (frequency == 0.0) return r_dc;
    const double skin_depth =
        std::sqrt(stack.copper_resistivity / (std::numbers::pi * frequency * kMu0));
    const double t_eff = std::min(geom.copper_thickness, skin_depth);
    return r_dc * geom.copper_thickness / t_eff;
}

double breakdown_voltage(const BoardStack& stack) {
    if (stack.board_thickness < 0 || stack.dielectric_strength < 0)
        throw std::invalid_argument("breakdown_voltage: negative board parameters");
    return stack.board_thickness * stack.dielectric_strength;
}

TransformerModel extract_transformer(const CoilGeometry& geom,
                                     const BoardStack& stack,
                                     double extraction_frequency) {
    const double l = self_inductance(geom);
    const auto mk = mutual_inductance(geom, stack.board_thickness);
    const double r = series_resistance(geom, stack, extraction_frequency);
    TransformerModel xf;
    xf.l_primary = l;
    xf.l_secondary = l;
    xf.mutual = mk.mutual;
    xf.coupling_k = mk.coupling_k;
    xf.r_series_primary = r;
    xf.r_series_secondary = r;
    xf.extraction_frequency = extraction_frequency;
    xf.validate();
    return xf;
}

}  // namespace isokit
