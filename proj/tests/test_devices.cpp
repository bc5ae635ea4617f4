#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "isokit/circuit.hpp"
#include "isokit/devices.hpp"
#include "isokit/engine.hpp"

using namespace isokit;

namespace {

// central-difference check of an analytic derivative
template <typename F>
double numeric_deriv(F&& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("diode current: frozen Shockley values") {
    DiodeParams d;  // i_s = 1e-12, n = 1.5
    CHECK(diode_i(d, 0.0) == 0.0);
    CHECK(diode_i(d, 0.6) == doctest::Approx(5.2508e-6).epsilon(1e-4));
    CHECK(diode_i(d, 0.7) == doctest::Approx(6.9225e-5).epsilon(1e-4));
    CHECK(diode_i(d, -5.0) == doctest::Approx(-1e-12));
}

TEST_CASE("diode current is continuous, monotone, and passive") {
    DiodeParams d;
    double prev = diode_i(d, -2.0);
    for (double v = -2.0 + 1e-3; v < 3.0; v += 1e-3) {
        const double i = diode_i(d, v);
        CHECK(i >= prev);                 // monotone non-decreasing
        CHECK(i * v >= -1e-30);           // dissipative in both quadrants
        CHECK(std::abs(i - prev) < 1.0);  // no jumps at the extrapolation knee
        prev = i;
    }
}

TEST_CASE("diode derivative matches a finite difference") {
    DiodeParams d;
    for (double v : {-1.0, 0.0, 0.4, 0.6, 0.8, 0.99, 1.01, 1.5}) {
        const auto g = diode_i_deriv(d, v);
        CHECK(g.i == doctest::Approx(diode_i(d, v)));
        const double fd = numeric_deriv([&](double x) { return diode_i(d, x); }, v, 1e-7);
        CHECK(g.di_dv1 == doctest::Approx(fd).epsilon(1e-3));
        CHECK(g.di_dv1 > 0.0);
    }
}

TEST_CASE("mosfet drain current: frozen square-law values") {
    MosfetParams m;  // vth 2.1, kn 0.08, lambda 0.01
    CHECK(mosfet_ids(m, 4.1, 5.0) == doctest::Approx(0.168).epsilon(1e-6));    // saturation
    CHECK(mosfet_ids(m, 4.1, 1.0) == doctest::Approx(0.1212).epsilon(1e-6));   // triode
    CHECK(std::abs(mosfet_ids(m, 1.0, 5.0)) < 1e-9);                           // cutoff
    CHECK(mosfet_ids(m, 4.1, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("mosfet reverse conduction: terminal symmetry plus body diode") {
    MosfetParams m;
    // swapping source and drain mirrors the channel current:
    // i(vgs, vds) = -i(vgd, -vds) for the symmetric device
    const double f = mosfet_ids(m, 4.1, 0.2);
    const double r = mosfet_ids(m, 4.1 - 0.2, -0.2);  // vgs' = vgd
    CHECK(r == doctest::Approx(-f).epsilon(1e-6));
    // body diode takes over for deep negative vds regardless of gate
    CHECK(mosfet_ids(m, 0.0, -0.8) < -1e-5);
    CHECK(mosfet_ids(m, 0.0, 0.8) >= 0.0);
}

TEST_CASE("mosfet current is continuous across region boundaries") {
    MosfetParams m;
    for (double vgs : {0.0, 2.0, 3.0, 4.1}) {
        double prev = mosfet_ids(m, vgs, -1.0);
        for (double vds = -1.0 + 1e-3; vds < 6.0; vds += 1e-3) {
            const double i = mosfet_ids(m, vgs, vds);
            CHECK(std::abs(i - prev) < 5e-3);
            prev = i;
        }
    }
}

TEST_CASE("mosfet derivatives match finite differences") {
    MosfetParams m;
    for (double vgs : {1.5, 2.5, 4.1}) {
        for (double vds : {-0.5, 0.1, 1.0, 3.0, 5.0}) {
            const auto g = mosfet_ids_deriv(m, vgs, vds);
            CHECK(g.i == doctest::Approx(mosfet_ids(m, vgs, vds)));
            const double fd_gs =
                numeric_deriv([&](double x) { return mosfet_ids(m, x, vds); }, vgs);
            const double fd_ds =
                numeric_deriv([&](double x) { return mosfet_ids(m, vgs, x); }, vds);
            CHECK(g.di_dv1 == doctest::Approx(fd_gs).epsilon(1e-3));
            CHECK(g.di_dv2 == doctest::Approx(fd_ds).epsilon(1e-3));
        }
    }
}

TEST_CASE("bjt collector current: frozen values and saturation clamp") {
    BjtParams q;  // i_s 6.7e-15, v_t 0.02585
    CHECK(bjt_ic(q, 0.65, 5.0) == doctest::Approx(5.577e-4).epsilon(1e-3));
    CHECK(bjt_ic(q, 0.6, 5.0) == doctest::Approx(8.061e-5).epsilon(1e-3));
    // tanh collapse toward the saturation floor
    CHECK(bjt_ic(q, 0.65, 0.05) ==
          doctest::Approx(5.577e-4 * std::tanh(0.5)).epsilon(1e-3));
    CHECK(bjt_ic(q, 0.65, 0.0) == doctest::Approx(0.0));
    CHECK(bjt_saturated(q, 0.05));
    CHECK(!bjt_saturated(q, 0.5));
}

TEST_CASE("bjt base current and beta relationship") {
    BjtParams q;
    const double ib = bjt_ib(q, 0.65);
    CHECK(ib == doctest::Approx(5.577e-4 / 200.0).epsilon(1e-3));
    CHECK(bjt_ic(q, 0.65, 5.0) == doctest::Approx(q.beta_f * ib).epsilon(1e-6));
    CHECK(bjt_ib(q, 0.0) == doctest::Approx(0.0));
    CHECK(bjt_ib(q, -1.0) <= 0.0);
}

TEST_CASE("bjt storage state: charging, decay, and release timing") {
    BjtParams q;
    const double dt = 1e-10;
    // steady drive at ib: q settles to tau*ib
    double charge = 0.0;
    const double ib = 1e-3;
    for (double t = 0.0; t < 10.0 * q.storage_tau; t += dt)
        charge = bjt_storage_step(q, charge, ib, dt);
    CHECK(charge == doctest::Approx(q.storage_tau * ib).epsilon(1e-3));

    // drive removed: pure exponential decay, q(t) = q0 * exp(-t/tau)
    const double q0 = charge;
    double t_off = 0.0;
    for (int n = 0; n < 10000; ++n) {
        charge = bjt_storage_step(q, charge, 0.0, dt);
        t_off += dt;
        if (t_off >= q.storage_tau) break;
    }
    CHECK(charge == doctest::Approx(q0 * std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("effective tank capacitance of the cross-coupled pair") {
    MosfetParams m;  // cds 10p, cgs 25p, cgd 5p
    CHECK(effective_tank_capacitance(m) == doctest::Approx(55e-12));
    // oscillation estimate with the bench coil value stays in the hf band
    const double f = 1.0 / (2.0 * 3.14159265358979 *
                            std::sqrt(1.6e-6 * effective_tank_capacitance(m)));
    CHECK(f > 13e6);
    CHECK(f < 17e6);
}

namespace {

// Saturation release bench: 1 mA collector load, base overdriven 10x
// (ib = 50 uA at beta 200), drive removed at 1 us. Returns the delay until
// the collector rises through 2.5 V.
double measure_release(const BjtParams& q) {
    Circuit c;
    Stimulus drv{{{0.0, 5.0}, {1e-6, 5.0}, {1.001e-6, 0.0}}};
    c.add_vsource("VB", "BIN", "0", drv);
    c.add_resistor("BIN", "B", 86e3);
    c.add_vsource("VCC", "VCC", "0", Stimulus::dc(5.0));
    c.add_resistor("VCC", "C", 4.9e3);
    c.add_bjt("Q1", "C", "B", "0", q);
    SimOptions o;
    o.t_stop = 2e-6;
    o.dt_max = 0.25e-9;
    Trace tr = transient(c, o);
    const auto& vc = tr.channel("V(C)");
    // must be hard-saturated before the drive is removed
    REQUIRE(vc[static_cast<size_t>(0.9e-6 / tr.dt)] < 0.05);
    for (size_t i = 1; i < vc.size(); ++i)
        if (tr.time(i) > 1.0005e-6 && vc[i - 1] < 2.5 && vc[i] >= 2.5)
            return tr.time(i) - 1.0005e-6;
    throw std::runtime_error("collector never released");
}

}  // namespace

TEST_CASE("saturation release delay at 1 mA collector current") {
    BjtParams q;  // default storage_tau
    const double rel = measure_release(q);
    CHECK(rel >= 70e-9);
    CHECK(rel <= 130e-9);

    BjtParams q2 = q;
    q2.storage_tau *= 2.0;
    const double rel2 = measure_release(q2);
    CHECK(rel2 == doctest::Approx(2.0 * rel).epsilon(0.15));  // single-pole scaling
}

TEST_CASE("parameter validation rejects nonphysical values") {
    DiodeParams d;
    d.i_s = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    MosfetParams m;
    m.kn = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    BjtParams q;
    q.storage_tau = -1e-9;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
