#pragma once

#include <istream>
#include <string>

#include "isokit/devices.hpp"
#include "isokit/magnetics.hpp"
#include "isokit/topologies.hpp"

namespace isokit {

/// Run configuration: INI-style sections, every field defaulted, unknown
/// sections/keys rejected. Physical quantities carry units in key names.
struct RunConfig {
    // [coil]
    double coil_turns = 8;
    double coil_trace_width_um = 200.0;
    double coil_trace_spacing_um = 200.0;
    double coil_inner_side_mm = 9.7;
    double coil_copper_thickness_um = 35.0;
    double coil_extraction_frequency_hz = 15e6;  // series R at the carrier

    // [board]
    double board_thickness_mm = 1.6;
    double board_dielectric_strength_kv_per_mm = 20.0;
    double board_copper_resistivity_ohm_m = 1.68e-8;

    // [mosfet]
    double mosfet_vth_v = 2.1;
    double mosfet_kn_a_per_v2 = 0.08;
    double mosfet_lambda_per_v = 0.01;
    double mosfet_cgs_pf = 25.0;
    double mosfet_cgd_pf = 5.0;
    double mosfet_cds_pf = 10.0;
    double mosfet_body_is_a = 1e-12;
    double mosfet_body_n_ideality = 1.5;
    double mosfet_body_cj_pf = 10.0;

    // [bjt]
    double bjt_i_s_a = 6.7e-15;
    double bjt_beta_f = 200.0;
    double bjt_v_t_v = 0.02585;
    double bjt_storage_tau_ns = 40.0;
    double bjt_c_junction_pf = 4.0;
    double bjt_vce_sat_v = 0.1;

    // [diode]
    double diode_i_s_a = 1e-12;
    double diode_n_ideality = 1.5;
    double diode_c_junction_pf = 10.0;

    // [isolator]
    double isolator_r_drain_a_ohm = 0.0;  // R12; 0 = omitted
    double isolator_r_drain_b_ohm = 1000.0;
    double isolator_r_base_ohm = 1000.0;
    double isolator_r_divider_ohm = 1000.0;
    double isolator_r_pullup_ohm = 5600.0;
    double isolator_r_gate_ohm = 10.0;
    double isolator_supply_v = 5.0;

    // [halfbridge]
    double halfbridge_r_shared_ohm = 2200.0;
    double halfbridge_r_base_ohm = 1000.0;
    double halfbridge_r_divider_ohm = 1000.0;
    double halfbridge_r_pullup_ohm = 5600.0;
    double halfbridge_r_gate_ohm = 10.0;
    double halfbridge_supply_pos_v = 5.0;
    double halfbridge_supply_neg_v = -5.0;
    double halfbridge_test_frequency_hz = 50e3;

    // [sim]
    double sim_dt_max_ns = 0.0;  // 0 = auto (bit_period/2000 vs T_osc/40)
    double sim_dt_min_ps = 0.0;  // 0 = auto (dt_max/4096)
    double sim_newton_tol_v = 1e-6;
    double sim_newton_max_iter = 50;
    double sim_output_decimation = 4;

    // [link]
    double link_bit_rate_bps = 1e6;
    double link_bits = 1000;
    double link_prbs_seed = 0x5A;
    double link_rise_fall_ns = 10.0;
    double link_level_low_v = 0.0;
    double link_level_high_v = 5.0;

    /// Parses INI text into this config; throws on unknown keys/sections or
    /// malformed lines.
    void parse(std::istream& in);
    void parse_file(const std::string& path);

    /// Applies a "section.key=value" override (flags win over the file).
    void set(const std::string& assignment);

    CoilGeometry coil_geometry() const;
    BoardStack board_stack() const;
    MosfetParams mosfet_params() const;
    BjtParams bjt_params() const;
    DiodeParams diode_params() const;
    IsolatorConfig isolator_config() const;
    HalfBridgeConfig halfbridge_config() const;
};

}  // namespace isokit
