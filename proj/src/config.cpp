#include "isokit/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace isokit {

namespace {

using FieldMap = std::map<std::string, std::map<std::string, double RunConfig::*>>;

const FieldMap& fields() {
    static const FieldMap m = {
        {"coil",
         {{"turns", &RunConfig::coil_turns},
          {"trace_width_um", &RunConfig::coil_trace_width_um},
          {"trace_spacing_um", &RunConfig::coil_trace_spacing_um},
          {"inner_side_mm", &RunConfig::coil_inner_side_mm},
          {"copper_thickness_um", &RunConfig::coil_copper_thickness_um},
          {"extraction_frequency_hz", &RunConfig::coil_extraction_frequency_hz}}},
        {"board",
         {{"thickness_mm", &RunConfig::board_thickness_mm},
          {"dielectric_strength_kv_per_mm", &RunConfig::board_dielectric_strength_kv_per_mm},
          {"copper_resistivity_ohm_m", &RunConfig::board_copper_resistivity_ohm_m}}},
        {"mosfet",
         {{"vth_v", &RunConfig::mosfet_vth_v},
          {"kn_a_per_v2", &RunConfig::mosfet_kn_a_per_v2},
          {"lambda_per_v", &RunConfig::mosfet_lambda_per_v},
          {"cgs_pf", &RunConfig::mosfet_cgs_pf},
          {"cgd_pf", &RunConfig::mosfet_cgd_pf},
          {"cds_pf", &RunConfig::mosfet_cds_pf},
          {"body_is_a", &RunConfig::mosfet_body_is_a},
          {"body_n_ideality", &RunConfig::mosfet_body_n_ideality},
          {"body_cj_pf", &RunConfig::mosfet_body_cj_pf}}},
        {"bjt",
         {{"i_s_a", &RunConfig::bjt_i_s_a},
          {"beta_f", &RunConfig::bjt_beta_f},
          {"v_t_v", &RunConfig::bjt_v_t_v},
          {"storage_tau_ns", &RunConfig::bjt_storage_tau_ns},
          {"c_junction_pf", &RunConfig::bjt_c_junction_pf},
          {"vce_sat_v", &RunConfig::bjt_vce_sat_v}}},
        {"diode",
         {{"i_s_a", &RunConfig::diode_i_s_a},
          {"n_ideality", &RunConfig::diode_n_ideality},
          {"c_junction_pf", &RunConfig::diode_c_junction_pf}}},
        {"isolator",
         {{"r_drain_a_ohm", &RunConfig::isolator_r_drain_a_ohm},
          {"r_drain_b_ohm", &RunConfig::isolator_r_drain_b_ohm},
          {"r_base_ohm", &RunConfig::isolator_r_base_ohm},
          {"r_divider_ohm", &RunConfig::isolator_r_divider_ohm},
          {"r_pullup_ohm", &RunConfig::isolator_r_pullup_ohm},
          {"r_gate_ohm", &RunConfig::isolator_r_gate_ohm},
          {"supply_v", &RunConfig::isolator_supply_v}}},
        {"halfbridge",
         {{"r_shared_ohm", &RunConfig::halfbridge_r_shared_ohm},
          {"r_base_ohm", &RunConfig::halfbridge_r_base_ohm},
          {"r_divider_ohm", &RunConfig::halfbridge_r_divider_ohm},
          {"r_pullup_ohm", &RunConfig::halfbridge_r_pullup_ohm},
          {"r_gate_ohm", &RunConfig::halfbridge_r_gate_ohm},
          {"supply_pos_v", &RunConfig::halfbridge_supply_pos_v},
          {"supply_neg_v", &RunConfig::halfbridge_supply_neg_v},
          {"test_frequency_hz", &RunConfig::halfbridge_test_frequency_hz}}},
        {"sim",
         {{"dt_max_ns", &RunConfig::sim_dt_max_ns},
          {"dt_min_ps", &RunConfig::sim_dt_min_ps},
          {"newton_tol_v", &RunConfig::sim_newton_tol_v},
          {"newton_max_iter", &RunConfig::sim_newton_max_iter},
          {"output_decimation", &RunConfig::sim_output_decimation}}},
        {"link",
         {{"bit_rate_bps", &RunConfig::link_bit_rate_bps},
          {"bits", &RunConfig::link_bits},
          {"prbs_seed", &RunConfig::link_prbs_seed},
          {"rise_fall_ns", &RunConfig::link_rise_fall_ns},
          {"level_low_v", &RunConfig::link_level_low_v},
          {"level_high_v", &RunConfig::link_level_high_v}}},
    };
    return m;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + where);
    }
    if (pos != text.size() || !std::isfinite(v))
        throw std::invalid_argument("config: bad numeric value for " + where);
    return v;
}

void assign(RunConfig& cfg, const std::string& section, const std::string& key,
            const std::string& value) {
    const auto& m = fields();
    auto sit = m.find(section);
    if (sit == m.end())
        throw std::invalid_argument("config: unknown section [" + section + "]");
    auto kit = sit->second.find(key);
    if (kit == sit->second.end())
        throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
    cfg.*(kit->second) = parse_number(value, section + "." + key);
}

}  // namespace

void RunConfig::parse(std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line.erase(cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (fields().find(section) == fields().end())
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw std::invalid_argument("config: malformed line " + std::to_string(lineno));
        assign(*this, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    parse(in);
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw std::invalid_argument("config: override must be section.key=value");
    assign(*this, trim(assignment.substr(0, dot)),
           trim(assignment.substr(dot + 1, eq - dot - 1)),
           trim(assignment.substr(eq + 1)));
}

CoilGeometry RunConfig::coil_geometry() const {
    CoilGeometry g;
    if (coil_turns < 1 || coil_turns != std::floor(coil_turns))
        throw std::invalid_argument("config: coil.turns must be a positive integer");
    g.turns = static_cast<int>(coil_turns);
    g.trace_width = coil_trace_width_um * 1e-6;
    g.trace_spacing = coil_trace_spacing_um * 1e-6;
    g.inner_side = coil_inner_side_mm * 1e-3;
    g.copper_thickness = coil_copper_thickness_um * 1e-6;
    g.validate();
    return g;
}

BoardStack RunConfig::board_stack() const {
    BoardStack s;
    s.board_thickness = board_thickness_mm * 1e-3;
    s.dielectric_strength = board_dielectric_strength_kv_per_mm * 1e6;
    s.copper_resistivity = board_copper_resistivity_ohm_m;
    s.validate();
    return s;
}

MosfetParams RunConfig::mosfet_params() const {
    MosfetParams p;
    p.vth = mosfet_vth_v;
    p.kn = mosfet_kn_a_per_v2;
    p.lambda = mosfet_lambda_per_v;
    p.cgs = mosfet_cgs_pf * 1e-12;
    p.cgd = mosfet_cgd_pf * 1e-12;
    p.cds = mosfet_cds_pf * 1e-12;
    p.body_diode.i_s = mosfet_body_is_a;
    p.body_diode.n_ideality = mosfet_body_n_ideality;
    p.body_diode.c_junction = mosfet_body_cj_pf * 1e-12;
    p.validate();
    return p;
}

BjtParams RunConfig::bjt_params() const {
    BjtParams p;
    p.i_s = bjt_i_s_a;
    p.beta_f = bjt_beta_f;
    p.v_t = bjt_v_t_v;
    p.storage_tau = bjt_storage_tau_ns * 1e-9;
    p.c_junction = bjt_c_junction_pf * 1e-12;
    p.vce_sat = bjt_vce_sat_v;
    p.validate();
    return p;
}

DiodeParams RunConfig::diode_params() const {
    DiodeParams p;
    p.i_s = diode_i_s_a;
    p.n_ideality = diode_n_ideality;
    p.c_junction = diode_c_junction_pf * 1e-12;
    p.validate();
    return p;
}

IsolatorConfig RunConfig::isolator_config() const {
    IsolatorConfig c;
    c.transformer = extract_transformer(coil_geometry(), board_stack(),
                                        coil_extraction_frequency_hz);
    c.r_drain_a = isolator_r_drain_a_ohm;
    c.r_drain_b = isolator_r_drain_b_ohm;
    c.r_base = isolator_r_base_ohm;
    c.r_divider = isolator_r_divider_ohm;
    c.r_pullup = isolator_r_pullup_ohm;
    c.r_gate = isolator_r_gate_ohm;
    c.supply = isolator_supply_v;
    c.mosfet = mosfet_params();
    c.bjt = bjt_params();
    c.validate();
    return c;
}

HalfBridgeConfig RunConfig::halfbridge_config() const {
    HalfBridgeConfig c;
    c.transformer_low = extract_transformer(coil_geometry(), board_stack(),
                                            coil_extraction_frequency_hz);
    c.transformer_high = c.transformer_low;
    c.r_shared = halfbridge_r_shared_ohm;
    c.r_base = halfbridge_r_base_ohm;
    c.r_divider = halfbridge_r_divider_ohm;
    c.r_pullup = halfbridge_r_pullup_ohm;
    c.r_gate = halfbridge_r_gate_ohm;
    c.supply_pos = halfbridge_supply_pos_v;
    c.supply_neg = halfbridge_supply_neg_v;
    c.mosfet = mosfet_params();
    c.bjt = bjt_params();
    c.validate();
    return c;
}

}  // namespace isokit
