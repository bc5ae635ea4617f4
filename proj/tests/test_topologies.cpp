#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "isokit/config.hpp"
#include "isokit/engine.hpp"
#include "isokit/topologies.hpp"

using namespace isokit;

namespace {

IsolatorConfig default_isolator() { return RunConfig{}.isolator_config(); }
HalfBridgeConfig default_halfbridge() { return RunConfig{}.halfbridge_config(); }

std::vector<double> drain_differential(const Trace& tr) {
    auto d = tr.channel("V(D1)");
    const auto& d2 = tr.channel("V(D2)");
    for (size_t i = 0; i < d.size(); ++i) d[i] -= d2[i];
    return d;
}

double peak_to_peak(const std::vector<double>& v, double dt, double a, double b) {
    double lo = 1e300, hi = -1e300;
    for (size_t i = static_cast<size_t>(a / dt);
         i < v.size() && i <= static_cast<size_t>(b / dt); ++i) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    return hi - lo;
}

double tail_mean(const std::vector<double>& v) {
    double s = 0.0;
    const size_t n = v.size() / 5;
    for (size_t i = v.size() - n; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(n);
}

SimOptions osc_options(double t_stop) {
    SimOptions o;
    o.t_stop = t_stop;
    o.dt_max = 0.5e-9;
    return o;
}

}  // namespace

TEST_CASE("transmitter netlist structure") {
    Circuit c = build_transmitter(default_isolator(), Stimulus::dc(5.0));
    const auto info = assemble(c);
    CHECK(info.node_unknowns == 5);  // DX, VOSC, D1, D2, S1
    CHECK(info.source_currents == 1);
    CHECK(info.inductor_currents == 2);  // coupled pair
    CHECK(info.storage_charges == 0);
    CHECK(c.find_node("S1") >= 0);
}

TEST_CASE("powered transmitter oscillates in the hf band") {
    Circuit c = build_transmitter(default_isolator(), Stimulus::dc(5.0));
    Trace tr = transient(c, osc_options(5e-6));
    const auto d = drain_differential(tr);
    const auto f = measure_frequency(d, tr.dt, tr.t0, 2e-6, 5e-6);
    CHECK(f.mean_hz > 10e6);
    CHECK(f.mean_hz < 22e6);
    CHECK(f.mean_hz == doctest::Approx(21.2e6).epsilon(0.03));  // regression
    CHECK(f.stddev_hz < 0.01 * f.mean_hz);

    // sustained amplitude: envelope does not decay between 1 us and 2 us
    const double e1 = peak_to_peak(d, tr.dt, 0.9e-6, 1.1e-6);
    const double e2 = peak_to_peak(d, tr.dt, 1.9e-6, 2.1e-6);
    CHECK(e2 >= 0.99 * e1);
    CHECK(e2 > 5.0);  // hard swing, not a numerical residue
}

TEST_CASE("unpowered transmitter stays quiet") {
    Circuit c = build_transmitter(default_isolator(), Stimulus::dc(0.0));
    Trace tr = transient(c, osc_options(2e-6));
    const auto d = drain_differential(tr);
    CHECK(peak_to_peak(d, tr.dt, 0.5e-6, 2e-6) < 0.1);
}

TEST_CASE("asymmetric drain bias starts no slower than symmetric") {
    auto startup_of = [](double r_drain_a) {
        IsolatorConfig cfg = default_isolator();
        cfg.r_drain_a = r_drain_a;
        Circuit c = build_transmitter(cfg, Stimulus::dc(5.0));
        Trace tr = transient(c, osc_options(5e-6));
        const auto d = drain_differential(tr);
        return measure_startup(d, tr.dt, tr.t0, 1.0);
    };
    const double t_asym = startup_of(0.0);
    const double t_sym = startup_of(default_isolator().r_drain_b);
    CHECK(t_asym <= t_sym);
}

TEST_CASE("isolator output is the inverted input at dc") {
    const auto cfg = default_isolator();
    {
        Circuit c = build_isolator(cfg, Stimulus::dc(5.0));
        Trace tr = transient(c, osc_options(4e-6));
        CHECK(tail_mean(tr.channel("V(DY)")) < 0.5);  // carrier on -> DY low
    }
    {
        Circuit c = build_isolator(cfg, Stimulus::dc(0.0));
        Trace tr = transient(c, osc_options(4e-6));
        CHECK(tail_mean(tr.channel("V(DY)")) > 4.5);  // carrier off -> pulled up
    }
}

TEST_CASE("isolator netlist structure") {
    Circuit c = build_isolator(default_isolator(), Stimulus::dc(5.0));
    const auto info = assemble(c);
    CHECK(info.node_unknowns == 8);  // + X, VCC, DY
    CHECK(info.source_currents == 2);
    CHECK(info.storage_charges == 2);
    CHECK(info.total() == 14);
}

TEST_CASE("halfbridge netlist structure") {
    Circuit c = build_halfbridge(default_halfbridge(), Stimulus::dc(0.0),
                                 Stimulus::dc(5.0));
    const auto info = assemble(c);
    CHECK(info.node_unknowns == 16);
    CHECK(info.source_currents == 4);   // VA, VB, two receiver rails
    CHECK(info.inductor_currents == 4); // two coupled pairs
    CHECK(info.storage_charges == 4);
    CHECK(info.total() == 28);
}

TEST_CASE("startup imbalance is recorded in trace metadata") {
    Circuit c = build_transmitter(default_isolator(), Stimulus::dc(5.0));
    SimOptions o = osc_options(1e-6);
    Trace tr = transient(c, o);
    CHECK(tr.metadata.count("startup_imbalance") == 1);
}

TEST_CASE("configuration validation") {
    IsolatorConfig cfg = default_isolator();
    cfg.transformer.coupling_k = 1.0;
    cfg.transformer.mutual = cfg.transformer.l_primary;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = default_isolator();
    cfg.r_pullup = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    HalfBridgeConfig hb = default_halfbridge();
    hb.supply_neg = 1.0;
    CHECK_THROWS_AS(hb.validate(), std::invalid_argument);
}
