#include "isokit/devices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isokit {

namespace {

// exp(v/vt) - 1 with value and derivative, linearly extrapolated above
// v_clamp so Newton never sees an overflowing exponential.
struct ExpM1 {
    double f;
    double df;
};

ExpM1 clamped_expm1(double v, double vt, double v_clamp) {
    if (v <= v_clamp) {
        const double e = std::exp(v / vt);
        return {e - 1.0, e / vt};
    }
    const double e = std::exp(v_clamp / vt);
    const double g = e / vt;
    return {(e - 1.0) + g * (v - v_clamp), g};
}

}  // namespace

void DiodeParams::validate() const {
    if (i_s <= 0) throw std::invalid_argument("diode: i_s must be > 0");
    if (n_ideality < 1) throw std::invalid_argument("diode: n_ideality must be >= 1");
    if (c_junction < 0) throw std::invalid_argument("diode: c_junction must be >= 0");
}

void MosfetParams::validate() const {
    if (vth <= 0) throw std::invalid_argument("mosfet: vth must be > 0");
    if (kn <= 0) throw std::invalid_argument("mosfet: kn must be > 0");
    if (cgs < 0 || cgd < 0 || cds < 0)
        throw std::invalid_argument("mosfet: capacitances must be >= 0");
    body_diode.validate();
}

void BjtParams::validate() const {
    if (i_s <= 0) throw std::invalid_argument("bjt: i_s must be > 0");
    if (beta_f <= 1) throw std::invalid_argument("bjt: beta_f must be > 1");
    if (v_t <= 0) throw std::invalid_argument("bjt: v_t must be > 0");
    if (storage_tau <= 0) throw std::invalid_argument("bjt: storage_tau must be > 0");
    if (c_junction < 0) throw std::invalid_argument("bjt: c_junction must be >= 0");
    if (vce_sat <= 0) throw std::invalid_argument("bjt: vce_sat must be > 0");
}

CurrentDeriv diode_i_deriv(const DiodeParams& p, double v) {
    constexpr double kVt = 0.02585;
    const auto e = clamped_expm1(v, p.n_ideality * kVt, 1.0);
    return {p.i_s * e.f, p.i_s * e.df, 0.0};
}

double diode_i(const DiodeParams& p, double v) { return diode_i_deriv(p, v).i; }

namespace {

// Square-law channel for vds >= 0; callers handle the vds < 0 symmetry.
CurrentDeriv channel_forward(const MosfetParams& p, double vgs, double vds) {
    const double vov = vgs - p.vth;
    if (vov <= 0.0) return {0.0, 0.0, 0.0};
    const double clm = 1.0 + p.lambda * vds;  // applied in both regions for continuity
    if (vds < vov) {
        // triode
        const double base = p.kn * (vov * vds - vds * vds / 2.0);
        return {base * clm, p.kn * vds * clm,
                p.kn * (vov - vds) * clm + base * p.lambda};
    }
    // saturation with channel-length modulation
    const double i = 0.5 * p.kn * vov * vov * clm;
    return {i, p.kn * vov * clm, 0.5 * p.kn * vov * vov * p.lambda};
}

}  // namespace

CurrentDeriv mosfet_ids_deriv(const MosfetParams& p, double vgs, double vds) {
    CurrentDeriv out;
    if (vds >= 0.0) {
        out = channel_forward(p, vgs, vds);
    } else {
        // terminals swap roles: gate-to-drain becomes the controlling voltage
        const auto r = channel_forward(p, vgs - vds, -vds);
        out.i = -r.i;
        // i = -f(vgs - vds, -vds)
        out.di_dv1 = -r.di_dv1;
        out.di_dv2 = r.di_dv1 + r.di_dv2;
    }
    // body diode conducts drain->source current when vds < 0
    const auto d = diode_i_deriv(p.body_diode, -vds);
    out.i -= d.i;
    out.di_dv2 += d.di_dv1;
    return out;
}

double mosfet_ids(const MosfetParams& p, double vgs, double vds) {
    return mosfet_ids_deriv(p, vgs, vds).i;
}

double bjt_ic(const BjtParams& p, double vbe, double vce) {
    const auto e = clamped_expm1(vbe, p.v_t, 0.85);
    return p.i_s * e.f * std::tanh(vce / p.vce_sat);
}

bool bjt_saturated(const BjtParams& p, double vce) { return vce <= p.vce_sat; }

double bjt_storage_step(const BjtParams& p, double q, double ib, double dt) {
    if (dt <= 0) throw std::invalid_argument("bjt_storage_step: dt must be > 0");
    return q + dt * (ib - q / p.storage_tau);
}

double bjt_ib(const BjtParams& p, double vbe) {
    const auto e = clamped_expm1(vbe, p.v_t, 0.85);
    return p.i_s / p.beta_f * e.f;
}

double effective_tank_capacitance(const MosfetParams& p) {
    return p.cds + p.cgs + 4.0 * p.cgd;
}

}  // namespace isokit
