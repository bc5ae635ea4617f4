#pragma once

namespace isokit {

/// Junction diode (Shockley), also used for MOSFET body diodes.
struct DiodeParams {
    double i_s = 1e-12;        // A
    double n_ideality = 1.5;
    double c_junction = 10e-12;  // F

    void validate() const;
};

/// Small-signal N-MOSFET, level-1 square law with fixed parasitics.
struct MosfetParams {
    double vth = 2.1;      // V
    double kn = 0.08;      // A/V^2
    double lambda = 0.01;  // 1/V
    double cgs = 25e-12;   // F
    double cgd = 5e-12;    // F
    double cds = 10e-12;   // F
    DiodeParams body_diode{1e-12, 1.5, 10e-12};

    void validate() const;
};

/// General-purpose NPN with a single-pole saturation-storage state.
struct BjtParams {
    double i_s = 6.7e-15;        // A
    double beta_f = 200.0;
    double v_t = 0.02585;        // V
    double storage_tau = 40e-9;  // s, tuned for ~100 ns release at 1 mA
    double c_junction = 4e-12;   // F, base-emitter
    double vce_sat = 0.1;        // V, collector saturation floor

    void validate() const;
};

/// Current with partial derivatives, for Newton assembly.
struct CurrentDeriv {
    double i = 0.0;
    double di_dv1 = 0.0;  // d i / d first voltage argument
    double di_dv2 = 0.0;  // d i / d second voltage argument
};

/// Shockley diode current, exponent linearly extrapolated above 1.0 V.
double diode_i(const DiodeParams& p, double v);
CurrentDeriv diode_i_deriv(const DiodeParams& p, double v);

/// Drain current of the square-law MOSFET including the body diode.
/// Continuous in both arguments; vds < 0 handled by terminal symmetry.
double mosfet_ids(const MosfetParams& p, double vgs, double vds);
CurrentDeriv mosfet_ids_deriv(const MosfetParams& p, double vgs, double vds);

/// Static collector current: forward exponential with a soft clamp as vce
/// approaches the saturation floor.
double bjt_ic(const BjtParams& p, double vbe, double vce);

/// True when vce is at or below the saturation floor.
bool bjt_saturated(const BjtParams& p, double vce);

/// One explicit step of the excess-charge storage state:
/// q' = q + dt*(ib - q/tau). The device keeps conducting while q > 0.
double bjt_storage_step(const BjtParams& p, double q, double ib, double dt);

/// Base junction current feeding the storage state.
double bjt_ib(const BjtParams& p, double vbe);

/// Single-ended tank capacitance presented across the inductor by a
/// cross-coupled pair: cds + cgs + 4*cgd (Miller-doubled gate-drain term).
double effective_tank_capacitance(const MosfetParams& p);

}  // namespace isokit
