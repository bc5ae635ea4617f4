// isokit: coil extraction, transient simulation, link metrics, and the
// summary characteristics table, driven by an INI config with flag overrides.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isokit/config.hpp"
#include "isokit/engine.hpp"
#include "isokit/halfbridge.hpp"
#include "isokit/link.hpp"
#include "isokit/magnetics.hpp"
#include "isokit/topologies.hpp"

using json = nlohmann::ordered_json;
using namespace isokit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;        // JSON destination; empty = stdout
    std::string trace_path; // CSV trace destination; empty = none
    std::string sweep;      // "section.key=v1,v2,..."
};

RunConfig load_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg.parse_file(opts.config_path);
    for (const auto& s : opts.sets) cfg.set(s);
    return cfg;
}

double auto_dt_max(const RunConfig& cfg) {
    if (cfg.sim_dt_max_ns > 0) return cfg.sim_dt_max_ns * 1e-9;
    return 0.5e-9;  // ~40 points per carrier cycle at the hf band
}

SimOptions sim_options(const RunConfig& cfg, double t_stop) {
    SimOptions o;
    o.t_stop = t_stop;
    o.dt_max = auto_dt_max(cfg);
    if (cfg.sim_dt_min_ps > 0) o.dt_min = cfg.sim_dt_min_ps * 1e-12;
    o.newton_tol = cfg.sim_newton_tol_v;
    o.newton_max_iter = static_cast<int>(cfg.sim_newton_max_iter);
    o.output_decimation = static_cast<int>(cfg.sim_output_decimation);
    return o;
}

BitPattern link_pattern(const RunConfig& cfg, int bits_override) {
    BitPattern p;
    const auto n = bits_override > 0 ? static_cast<size_t>(bits_override)
                                     : static_cast<size_t>(cfg.link_bits);
    p.bits = prbs7(static_cast<uint8_t>(cfg.link_prbs_seed), n);
    p.bit_rate = cfg.link_bit_rate_bps;
    p.level_low = cfg.link_level_low_v;
    p.level_high = cfg.link_level_high_v;
    p.rise_fall = cfg.link_rise_fall_ns * 1e-9;
    return p;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
    f << text;
}

void maybe_write_trace(const Trace& tr, const std::string& path) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open trace file '" + path + "'");
    tr.write_csv(f);
}

// ---------------------------------------------------------------- extract

json cmd_extract(const RunConfig& cfg) {
    const auto geom = cfg.coil_geometry();
    const auto board = cfg.board_stack();
    const auto xf = extract_transformer(geom, board, cfg.coil_extraction_frequency_hz);
    json j;
    j["schema_version"] = 1;
    j["l_primary"] = xf.l_primary;
    j["l_secondary"] = xf.l_secondary;
    j["mutual"] = xf.mutual;
    j["coupling_k"] = xf.coupling_k;
    j["r_series_primary"] = xf.r_series_primary;
    j["r_series_secondary"] = xf.r_series_secondary;
    j["breakdown_voltage"] = breakdown_voltage(board);
    j["outer_side_m"] = outer_side(geom);
    j["extraction_frequency_hz"] = xf.extraction_frequency;
    j["predicted_frequency_hz"] =
        1.0 / (2.0 * 3.14159265358979323846 *
               std::sqrt(xf.l_primary * effective_tank_capacitance(cfg.mosfet_params())));
    j["pass"] = true;
    return j;
}

// --------------------------------------------------------------- simulate

json simulate_tx(const RunConfig& cfg, const std::string& stimulus,
                 const std::string& trace_path) {
    const auto iso = cfg.isolator_config();
    const bool powered = stimulus == "high";
    Circuit c = build_transmitter(iso, Stimulus::dc(powered ? iso.supply : 0.0));
    Trace tr = transient(c, sim_options(cfg, 5e-6));
    maybe_write_trace(tr, trace_path);

    auto diff = tr.channel("V(D1)");
    const auto& d2 = tr.channel("V(D2)");
    for (size_t i = 0; i < diff.size(); ++i) diff[i] -= d2[i];

    json j;
    j["schema_version"] = 1;
    j["circuit"] = "tx";
    j["stimulus"] = stimulus;
    if (powered) {
        const auto f = measure_frequency(diff, tr.dt, tr.t0, 2e-6, 5e-6);
        j["frequency_hz"] = f.mean_hz;
        j["frequency_stddev_hz"] = f.stddev_hz;
        j["periods_measured"] = f.periods;
        j["startup_s"] = measure_startup(diff, tr.dt, tr.t0, 1.0);
        j["tx_power_w"] = std::abs(measure_power(tr, "V(DX)", "I(VDX)", 3e-6, 5e-6));
        j["pass"] = f.mean_hz > 10e6 && f.mean_hz < 22e6;
    } else {
        double p2p = 0.0, lo = diff[0], hi = diff[0];
        for (double v : diff) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        p2p = hi - lo;
        j["residual_swing_v"] = p2p;
        j["pass"] = p2p < 0.1;
    }
    return j;
}

json simulate_isolator(const RunConfig& cfg, const std::string& stimulus,
                       int bits_override, const std::string& trace_path) {
    const auto iso = cfg.isolator_config();
    json j;
    j["schema_version"] = 1;
    j["circuit"] = "isolator";
    j["stimulus"] = stimulus;

    if (stimulus == "high" || stimulus == "low") {
        Circuit c = build_isolator(iso, Stimulus::dc(stimulus == "high" ? iso.supply : 0.0));
        Trace tr = transient(c, sim_options(cfg, 5e-6));
        maybe_write_trace(tr, trace_path);
        const auto& dy = tr.channel("V(DY)");
        double tail = 0.0;
        const size_t n = dy.size() / 5;
        for (size_t i = dy.size() - n; i < dy.size(); ++i) tail += dy[i];
        tail /= static_cast<double>(n);
        j["dy_steady_v"] = tail;
        j["pass"] = stimulus == "high" ? tail < 0.8 : tail > 4.2;
        return j;
    }

    // prbs7 link run
    const BitPattern pat = link_pattern(cfg, bits_override);
    const double t_stop = (static_cast<double>(pat.bits.size()) + 1.0) * pat.bit_period();
    Circuit c = build_isolator(iso, nrz_stimulus(pat));
    Trace tr = transient(c, sim_options(cfg, t_stop));
    maybe_write_trace(tr, trace_path);

    const auto& dx = tr.channel("V(DX)");
    const auto& dy = tr.channel("V(DY)");
    const auto d = propagation_delay(dx, dy, tr.dt, tr.t0, 2.5, true, 2e-6);
    const double mean_delay =
        (d.rise.mean * d.rise.count + d.fall.mean * d.fall.count) /
        std::max(1, d.rise.count + d.fall.count);
    const auto bits = check_bits(dy, tr.dt, tr.t0, pat, mean_delay, true);
    const auto eye = eye_diagram(dy, tr.dt, tr.t0, pat.bit_period(), mean_delay);

    j["bits_sent"] = pat.bits.size();
    j["bit_rate_bps"] = pat.bit_rate;
    j["prop_delay_s"] = mean_delay;
    j["prop_delay_rise_s"] = d.rise.mean;
    j["prop_delay_fall_s"] = d.fall.mean;
    j["lost_edges"] = d.lost_edges;
    j["bit_errors"] = bits.errors;
    j["bits_checked"] = bits.checked;
    j["eye_height_v"] = eye.eye_height;
    j["eye_width_s"] = eye.eye_width;
    j["pass"] = bits.errors == 0 && d.lost_edges == 0;
    return j;
}

json simulate_halfbridge(const RunConfig& cfg, const std::string& trace_path) {
    const auto hb = cfg.halfbridge_config();
    const double freq = cfg.halfbridge_test_frequency_hz;
    const double t_stop = 10.5 / freq;
    const auto st = BridgeStimulus::complementary_square(freq, t_stop);
    Trace tr = transient_bridge(hb, st, sim_options(cfg, t_stop));
    maybe_write_trace(tr, trace_path);

    const auto lk = lockout_check(tr);
    const auto dtm = dead_time(tr);
    json j;
    j["schema_version"] = 1;
    j["circuit"] = "halfbridge";
    j["stimulus"] = "square";
    j["test_frequency_hz"] = freq;
    j["lockout_ok"] = lk.lockout_ok;
    j["overlap_worst_s"] = lk.overlap_worst;
    j["dead_time_low_to_high_s"] = dtm.low_to_high.min;
    j["dead_time_high_to_low_s"] = dtm.high_to_low.min;
    j["dead_time_mean_s"] =
        0.5 * (dtm.low_to_high.mean + dtm.high_to_low.mean);
    j["handovers"] = dtm.low_to_high.count + dtm.high_to_low.count;
    j["pass"] = lk.lockout_ok && dtm.low_to_high.min > 0 && dtm.high_to_low.min > 0;
    return j;
}

// -------------------------------------------------------------------- eye

json cmd_eye(const RunConfig& cfg, int bits_override, const std::string& trace_path) {
    const auto iso = cfg.isolator_config();
    const BitPattern pat = link_pattern(cfg, bits_override);
    const double t_stop = (static_cast<double>(pat.bits.size()) + 1.0) * pat.bit_period();
    Circuit c = build_isolator(iso, nrz_stimulus(pat));
    Trace tr = transient(c, sim_options(cfg, t_stop));

    const auto& dx = tr.channel("V(DX)");
    const auto& dy = tr.channel("V(DY)");
    const auto d = propagation_delay(dx, dy, tr.dt, tr.t0, 2.5, true, 2e-6);
    const double mean_delay =
        (d.rise.mean * d.rise.count + d.fall.mean * d.fall.count) /
        std::max(1, d.rise.count + d.fall.count);
    const auto eye = eye_diagram(dy, tr.dt, tr.t0, pat.bit_period(), mean_delay);

    if (!trace_path.empty()) {
        std::ofstream f(trace_path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open trace file '" + trace_path + "'");
        f << "phase_s,voltage_v,bit_class\n";
        char buf[96];
        for (const auto& s : eye.folded) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", s.phase_s, s.voltage_v,
                          s.bit_class);
            f << buf;
        }
    }

    json j;
    j["schema_version"] = 1;
    j["bit_rate_bps"] = pat.bit_rate;
    j["bits"] = pat.bits.size();
    j["alignment_offset_s"] = mean_delay;
    j["eye_height_v"] = eye.eye_height;
    j["eye_width_s"] = eye.eye_width;
    j["pass"] = eye.eye_height >= 2.5 && eye.eye_width >= 0.5e-6;
    return j;
}

// ----------------------------------------------------------------- report

json cmd_report(const RunConfig& cfg) {
    const auto geom = cfg.coil_geometry();
    const auto board = cfg.board_stack();
    const double bdv = breakdown_voltage(board);
    const double side = outer_side(geom);

    // link run provides delay, errors and the power windows
    const auto iso = cfg.isolator_config();
    const BitPattern pat = link_pattern(cfg, 0);
    const double t_stop = (static_cast<double>(pat.bits.size()) + 1.0) * pat.bit_period();
    Circuit c = build_isolator(iso, nrz_stimulus(pat));
    Trace tr = transient(c, sim_options(cfg, t_stop));
    const auto& dx = tr.channel("V(DX)");
    const auto& dy = tr.channel("V(DY)");
    const auto d = propagation_delay(dx, dy, tr.dt, tr.t0, 2.5, true, 2e-6);
    const double mean_delay =
        (d.rise.mean * d.rise.count + d.fall.mean * d.fall.count) /
        std::max(1, d.rise.count + d.fall.count);
    const auto bits = check_bits(dy, tr.dt, tr.t0, pat, mean_delay, true);

    // steady-1 powers from a dedicated dc run
    Circuit cdc = build_isolator(iso, Stimulus::dc(iso.supply));
    Trace trdc = transient(cdc, sim_options(cfg, 5e-6));
    const double tx_p = std::abs(measure_power(trdc, "V(DX)", "I(VDX)", 3e-6, 5e-6));
    const double rx_p = std::abs(measure_power(trdc, "V(VCC)", "I(VRX)", 3e-6, 5e-6));

    json j;
    j["schema_version"] = 1;
    auto entry = [](double value, const std::string& unit, bool ok, const std::string& bound) {
        json e;
        e["value"] = value;
        e["unit"] = unit;
        e["pass"] = ok;
        e["bound"] = bound;
        return e;
    };
    j["breakdown_voltage"] = entry(bdv, "V", bdv > 1e3, "> 1 kV");
    // coil footprint only; the assembled board adds routing margin around it
    j["coil_area"] = entry(side * side * 1e4, "cm^2", side * side * 1e4 < 3.4,
                           "coil-only, < 3.4 cm^2 total board");
    j["tx_power"] = entry(tx_p * 1e3, "mW", tx_p <= 25e-3, "<= 25 mW");
    j["rx_power"] = entry(rx_p * 1e3, "mW", rx_p <= 5e-3, "<= 5 mW");
    j["prop_delay"] = entry(mean_delay * 1e9, "ns",
                            mean_delay >= 100e-9 && mean_delay <= 400e-9,
                            "100..400 ns");
    j["max_verified_bit_rate"] =
        entry(pat.bit_rate, "bps", bits.errors == 0, "error-free at 1 Mbps");
    bool all = true;
    for (const auto& [k, v] : j.items())
        if (v.is_object() && v.contains("pass")) all = all && v["pass"].get<bool>();
    j["pass"] = all;
    return j;
}

// ------------------------------------------------------------------ sweep

int run_with_sweep(const CommonOpts& opts, const std::function<json(const RunConfig&)>& run) {
    json result;
    int exit_code = kExitPass;
    if (!opts.sweep.empty() && !opts.trace_path.empty())
        throw std::invalid_argument("--trace cannot be combined with --sweep");

    if (opts.sweep.empty()) {
        result = run(load_config(opts));
        if (result.contains("pass") && !result["pass"].get<bool>())
            exit_code = kExitCheckFailed;
    } else {
        const auto eq = opts.sweep.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--sweep must be section.key=v1,v2,...");
        const std::string key = opts.sweep.substr(0, eq);
        std::vector<std::string> values;
        std::stringstream ss(opts.sweep.substr(eq + 1));
        for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
        if (values.empty())
            throw std::invalid_argument("--sweep needs at least one value");

        std::vector<std::future<json>> futures;
        futures.reserve(values.size());
        for (const auto& v : values) {
            futures.push_back(std::async(std::launch::async, [&, v] {
                RunConfig cfg = load_config(opts);
                cfg.set(key + "=" + v);
                json r = run(cfg);
                r["sweep_value"] = v;
                return r;
            }));
        }
        result = json::array();
        for (auto& f : futures) {  // merged in input order
            json r = f.get();
            if (r.contains("pass") && !r["pass"].get<bool>())
                exit_code = kExitCheckFailed;
            result.push_back(std::move(r));
        }
    }

    write_text(opts.out, result.dump(2) + "\n");
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCB-transformer digital isolator design and simulation toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string circuit = "isolator", stimulus = "prbs7";
    int bits_override = 0;
    double bit_rate_override = 0.0;

    auto add_common = [&](CLI::App* sub, bool with_trace) {
        sub->add_option("--config", opts.config_path, "INI config file");
        sub->add_option("--set", opts.sets, "section.key=value override (repeatable)");
        sub->add_option("--out", opts.out, "write JSON here instead of stdout");
        sub->add_option("--sweep", opts.sweep, "section.key=v1,v2,... concurrent fan-out");
        if (with_trace)
            sub->add_option("--trace", opts.trace_path, "write the CSV trace here");
    };

    auto* sc_extract = app.add_subcommand("extract", "coil/transformer parameter extraction");
    add_common(sc_extract, false);

    auto* sc_sim = app.add_subcommand("simulate", "transient run with measurements");
    add_common(sc_sim, true);
    sc_sim->add_option("--circuit", circuit, "tx | isolator | halfbridge")
        ->check(CLI::IsMember({"tx", "isolator", "halfbridge"}));
    sc_sim->add_option("--stimulus", stimulus, "high | low | prbs7 | square")
        ->check(CLI::IsMember({"high", "low", "prbs7", "square"}));
    auto* bits_opt = sc_sim->add_option("--bits", bits_override, "PRBS bit count override")
                         ->check(CLI::PositiveNumber);

    auto* sc_eye = app.add_subcommand("eye", "eye diagram of the PRBS link");
    add_common(sc_eye, true);
    sc_eye->add_option("--bits", bits_override, "PRBS bit count override")
        ->check(CLI::PositiveNumber);
    sc_eye->add_option("--bit-rate", bit_rate_override, "bit rate override, bps");

    auto* sc_report = app.add_subcommand("report", "overall characteristics summary");
    add_common(sc_report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (sc_extract->parsed())
            return run_with_sweep(opts, [](const RunConfig& c) { return cmd_extract(c); });

        if (sc_sim->parsed()) {
            if (bits_opt->count() > 0 && stimulus != "prbs7")
                throw std::invalid_argument("--bits requires --stimulus prbs7");
            if (circuit == "halfbridge" && stimulus != "square")
                throw std::invalid_argument("halfbridge requires --stimulus square");
            if (circuit != "halfbridge" && stimulus == "square")
                throw std::invalid_argument("--stimulus square requires --circuit halfbridge");
            if (circuit == "tx" && stimulus == "prbs7")
                throw std::invalid_argument("tx supports --stimulus high|low");
            return run_with_sweep(opts, [&](const RunConfig& c) {
                if (circuit == "tx") return simulate_tx(c, stimulus, opts.trace_path);
                if (circuit == "isolator")
                    return simulate_isolator(c, stimulus, bits_override, opts.trace_path);
                return simulate_halfbridge(c, opts.trace_path);
            });
        }

        if (sc_eye->parsed()) {
            if (bit_rate_override < 0.0 ||
                (sc_eye->count("--bit-rate") > 0 && bit_rate_override <= 0.0))
                throw std::invalid_argument("--bit-rate must be > 0");
            return run_with_sweep(opts, [&](const RunConfig& c) {
                RunConfig cfg = c;
                if (bit_rate_override > 0) cfg.link_bit_rate_bps = bit_rate_override;
                return cmd_eye(cfg, bits_override, opts.trace_path);
            });
        }

        return run_with_sweep(opts, [](const RunConfig& c) { return cmd_report(c); });
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
