#include "isokit/engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace isokit {

void SimOptions::validate() const {
    const double dmin = dt_min > 0 ? dt_min : dt_max / 4096.0;
    if (!(dmin > 0) || !(dmin <= dt_max) || !(dt_max < t_stop))
        throw std::invalid_argument("sim options: need 0 < dt_min <= dt_max < t_stop");
    if (newton_tol <= 0) throw std::invalid_argument("sim options: newton_tol must be > 0");
    if (newton_max_iter < 1) throw std::invalid_argument("sim options: newton_max_iter must be >= 1");
    if (output_decimation < 1) throw std::invalid_argument("sim options: output_decimation must be >= 1");
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    }
    void merge(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

// Expanded linear capacitor (explicit caps + device parasitics + floating
// node anchors), with trapezoidal history.
struct CapPrim {
    int a, b;
    double c;
    double v_n = 0.0;
    double i_n = 0.0;
};

constexpr double kFloatAnchorFarads = 1e-12;

struct System {
    const Circuit& ckt;
    int nn;        // node count incl ground
    int n_v;       // voltage unknowns
    int off_vs;    // first vsource branch current
    int off_l;     // first plain inductor current
    int off_cp;    // first coupled-pair current (two per pair)
    int off_q;     // first storage charge
    int n_total;

    std::vector<CapPrim> caps;

    // histories
    std::vector<double> ind_e;               // v_ab - r*i at last accepted point
    std::vector<std::array<double, 2>> cp_e; // per coupled pair
    std::vector<double> bjt_dq;              // ib - q/tau at last accepted point

    explicit System(const Circuit& c) : ckt(c) {
        nn = c.node_count();
        n_v = nn - 1;
        off_vs = n_v;
        off_l = off_vs + static_cast<int>(c.vsources.size());
        off_cp = off_l + static_cast<int>(c.inductors.size());
        off_q = off_cp + 2 * static_cast<int>(c.coupled_pairs.size());
        n_total = off_q + static_cast<int>(c.bjts.size());

        build_caps();
        ind_e.assign(c.inductors.size(), 0.0);
        cp_e.assign(c.coupled_pairs.size(), {0.0, 0.0});
        bjt_dq.assign(c.bjts.size(), 0.0);
    }

    void build_caps() {
        for (const auto& cp : ckt.capacitors) caps.push_back({cp.a, cp.b, cp.farads, cp.v0, 0.0});
        for (const auto& m : ckt.mosfets) {
            if (m.p.cgs > 0) caps.push_back({m.g, m.s, m.p.cgs});
            if (m.p.cgd > 0) caps.push_back({m.g, m.d, m.p.cgd});
            if (m.p.cds > 0) caps.push_back({m.d, m.s, m.p.cds});
            if (m.p.body_diode.c_junction > 0)
                caps.push_back({m.d, m.s, m.p.body_diode.c_junction});
        }
        for (const auto& b : ckt.bjts)
            if (b.p.c_junction > 0) caps.push_back({b.b, b.e, b.p.c_junction});
        for (const auto& d : ckt.diodes)
            if (d.p.c_junction > 0) caps.push_back({d.a, d.k, d.p.c_junction});
        for (int n : floating_nodes()) caps.push_back({n, 0, kFloatAnchorFarads});
    }

    // Nodes with element connections but no conductive DC path to ground.
    std::vector<int> floating_nodes() const {
        UnionFind dc(nn);
        for (const auto& e : ckt.resistors) dc.merge(e.a, e.b);
        for (const auto& e : ckt.inductors) dc.merge(e.a, e.b);
        for (const auto& e : ckt.coupled_pairs) {
            dc.merge(e.p1, e.p2);
            dc.merge(e.s1, e.s2);
        }
        for (const auto& e : ckt.vsources) dc.merge(e.pos, e.neg);
        for (const auto& e : ckt.mosfets) dc.merge(e.d, e.s);
        for (const auto& e : ckt.bjts) {
            dc.merge(e.b, e.e);
            dc.merge(e.c, e.e);
        }
        for (const auto& e : ckt.diodes) dc.merge(e.a, e.k);

        std::vector<int> out;
        const int g = dc.find(0);
        for (int n = 1; n < nn; ++n)
            if (dc.find(n) != g) out.push_back(n);
        return out;
    }

    // Any-element connectivity: isolated islands are a hard error.
    void check_reachable() const {
        UnionFind all(nn);
        for (const auto& e : ckt.resistors) all.merge(e.a, e.b);
        for (const auto& e : ckt.capacitors) all.merge(e.a, e.b);
        for (const auto& e : ckt.inductors) all.merge(e.a, e.b);
        for (const auto& e : ckt.coupled_pairs) {
            all.merge(e.p1, e.p2);
            all.merge(e.s1, e.s2);
        }
        for (const auto& e : ckt.vsources) all.merge(e.pos, e.neg);
        for (const auto& e : ckt.mosfets) {
            all.merge(e.d, e.s);
            all.merge(e.g, e.s);
        }
        for (const auto& e : ckt.bjts) {
            all.merge(e.b, e.e);
            all.merge(e.c, e.e);
        }
        for (const auto& e : ckt.diodes) all.merge(e.a, e.k);
        UnionFind copy = all;
        const int g = copy.find(0);
        for (int n = 1; n < nn; ++n)
            if (copy.find(n) != g)
                throw std::invalid_argument("assemble: node '" + ckt.node_name(n) +
                                            "' has no path to ground");
    }

    void check_sources() const {
        bool driven = !ckt.vsources.empty() || !ckt.current_pulses.empty();
        for (const auto& e : ckt.capacitors) driven = driven || e.v0 != 0.0;
        for (const auto& e : ckt.inductors) driven = driven || e.i0 != 0.0;
        for (const auto& e : ckt.coupled_pairs)
            driven = driven || e.ip0 != 0.0 || e.is0 != 0.0;
        if (!driven)
            throw std::invalid_argument(
                "assemble: circuit has no source and no nonzero initial condition");
    }

    int vidx(int node) const { return node - 1; }
    static double volt(const Eigen::VectorXd& x, int node) {
        return node == 0 ? 0.0 : x[node - 1];
    }

    void kcl(Eigen::VectorXd& F, int node, double i) const {
        if (node != 0) F[vidx(node)] += i;
    }
    void jac(Eigen::MatrixXd& J, int row_node, int col_node, double g) const {
        if (row_node != 0 && col_node != 0) J(vidx(row_node), vidx(col_node)) += g;
    }
    void jac_rc(Eigen::MatrixXd& J, int row_node, int col, double g) const {
        if (row_node != 0) J(vidx(row_node), col) += g;
    }
    void jac_cr(Eigen::MatrixXd& J, int row, int col_node, double g) const {
        if (col_node != 0) J(row, vidx(col_node)) += g;
    }

    // Residual and Jacobian at candidate solution x for the step ending at
    // t_new with size dt. use_be selects backward Euler (first step only).
    void eval(const Eigen::VectorXd& x, double t_new, double dt, bool use_be,
              Eigen::VectorXd& F, Eigen::MatrixXd& J) const {
        F.setZero();
        J.setZero();

        for (const auto& e : ckt.resistors) {
            const double g = 1.0 / e.ohms;
            const double i = g * (volt(x, e.a) - volt(x, e.b));
            kcl(F, e.a, i);
            kcl(F, e.b, -i);
            jac(J, e.a, e.a, g);
            jac(J, e.a, e.b, -g);
            jac(J, e.b, e.a, -g);
            jac(J, e.b, e.b, g);
        }

        for (const auto& cp : caps) {
            const double geq = (use_be ? 1.0 : 2.0) * cp.c / dt;
            const double v = volt(x, cp.a) - volt(x, cp.b);
            const double i = geq * (v - cp.v_n) - (use_be ? 0.0 : cp.i_n);
            kcl(F, cp.a, i);
            kcl(F, cp.b, -i);
            jac(J, cp.a, cp.a, geq);
            jac(J, cp.a, cp.b, -geq);
            jac(J, cp.b, cp.a, -geq);
            jac(J, cp.b, cp.b, geq);
        }

        for (size_t k = 0; k < ckt.vsources.size(); ++k) {
            const auto& e = ckt.vsources[k];
            const int bi = off_vs + static_cast<int>(k);
            const double ibr = x[bi];
            kcl(F, e.pos, ibr);
            kcl(F, e.neg, -ibr);
            jac_rc(J, e.pos, bi, 1.0);
            jac_rc(J, e.neg, bi, -1.0);
            F[bi] = volt(x, e.pos) - volt(x, e.neg) - e.wave.at(t_new);
            jac_cr(J, bi, e.pos, 1.0);
            jac_cr(J, bi, e.neg, -1.0);
        }

        for (size_t k = 0; k < ckt.inductors.size(); ++k) {
            const auto& e = ckt.inductors[k];
            const int bi = off_l + static_cast<int>(k);
            const double i = x[bi];
            const double i_n = ind_i_n[k];
            kcl(F, e.a, i);
            kcl(F, e.b, -i);
            jac_rc(J, e.a, bi, 1.0);
            jac_rc(J, e.b, bi, -1.0);
            const double v = volt(x, e.a) - volt(x, e.b);
            const double lfac = (use_be ? 1.0 : 2.0) * e.henries / dt;
            F[bi] = v - e.r_series * i - lfac * (i - i_n) + (use_be ? 0.0 : ind_e[k]);
            jac_cr(J, bi, e.a, 1.0);
            jac_cr(J, bi, e.b, -1.0);
            J(bi, bi) += -e.r_series - lfac;
        }

        for (size_t k = 0; k < ckt.coupled_pairs.size(); ++k) {
            const auto& e = ckt.coupled_pairs[k];
            const int b1 = off_cp + 2 * static_cast<int>(k);
            const int b2 = b1 + 1;
            const double i1 = x[b1], i2 = x[b2];
            const double i1n = cp_i_n[k][0], i2n = cp_i_n[k][1];
            kcl(F, e.p1, i1);
            kcl(F, e.p2, -i1);
            kcl(F, e.s1, i2);
            kcl(F, e.s2, -i2);
            jac_rc(J, e.p1, b1, 1.0);
            jac_rc(J, e.p2, b1, -1.0);
            jac_rc(J, e.s1, b2, 1.0);
            jac_rc(J, e.s2, b2, -1.0);
            const double fac = (use_be ? 1.0 : 2.0) / dt;
            const double vp = volt(x, e.p1) - volt(x, e.p2);
            const double vs = volt(x, e.s1) - volt(x, e.s2);
            const double l1 = e.xf.l_primary, l2 = e.xf.l_secondary, m = e.xf.mutual;
            F[b1] = vp - e.xf.r_series_primary * i1 -
                    fac * (l1 * (i1 - i1n) + m * (i2 - i2n)) +
                    (use_be ? 0.0 : cp_e[k][0]);
            F[b2] = vs - e.xf.r_series_secondary * i2 -
                    fac * (m * (i1 - i1n) + l2 * (i2 - i2n)) +
                    (use_be ? 0.0 : cp_e[k][1]);
            jac_cr(J, b1, e.p1, 1.0);
            jac_cr(J, b1, e.p2, -1.0);
            jac_cr(J, b2, e.s1, 1.0);
            jac_cr(J, b2, e.s2, -1.0);
            J(b1, b1) += -e.xf.r_series_primary - fac * l1;
            J(b1, b2) += -fac * m;
            J(b2, b1) += -fac * m;
            J(b2, b2) += -e.xf.r_series_secondary - fac * l2;
        }

        for (const auto& e : ckt.mosfets) {
            const double vgs = volt(x, e.g) - volt(x, e.s);
            const double vds = volt(x, e.d) - volt(x, e.s);
            const auto id = mosfet_ids_deriv(e.p, vgs, vds);
            kcl(F, e.d, id.i);
            kcl(F, e.s, -id.i);
            // i(vgs, vds): chain rule onto node voltages
            jac(J, e.d, e.g, id.di_dv1);
            jac(J, e.d, e.d, id.di_dv2);
            jac(J, e.d, e.s, -id.di_dv1 - id.di_dv2);
            jac(J, e.s, e.g, -id.di_dv1);
            jac(J, e.s, e.d, -id.di_dv2);
            jac(J, e.s, e.s, id.di_dv1 + id.di_dv2);
        }

        for (size_t k = 0; k < ckt.bjts.size(); ++k) {
            const auto& e = ckt.bjts[k];
            const int qi = off_q + static_cast<int>(k);
            const double vbe = volt(x, e.b) - volt(x, e.e);
            const double vce = volt(x, e.c) - volt(x, e.e);
            const double q = x[qi];
            const double tau = e.p.storage_tau;

            const double ib = bjt_ib(e.p, vbe);
            const double dib = bjt_ib_deriv(e.p, vbe);
            kcl(F, e.b, ib);
            kcl(F, e.e, -ib);
            jac(J, e.b, e.b, dib);
            jac(J, e.b, e.e, -dib);
            jac(J, e.e, e.b, -dib);
            jac(J, e.e, e.e, dib);

            // collector sink driven by the filtered (stored-charge) base drive
            const double q_eff = q > 0.0 ? q : 0.0;
            const double dq_eff = q > 0.0 ? 1.0 : 0.0;
            const double th = std::tanh(vce / e.p.vce_sat);
            const double dth = (1.0 - th * th) / e.p.vce_sat;
            const double icap = e.p.beta_f * q_eff / tau;
            const double ic = icap * th;
            kcl(F, e.c, ic);
            kcl(F, e.e, -ic);
            jac(J, e.c, e.c, icap * dth);
            jac(J, e.c, e.e, -icap * dth);
            jac(J, e.e, e.c, -icap * dth);
            jac(J, e.e, e.e, icap * dth);
            jac_rc(J, e.c, qi, e.p.beta_f / tau * th * dq_eff);
            jac_rc(J, e.e, qi, -e.p.beta_f / tau * th * dq_eff);

            // storage state, scaled by 1/dt so the row is in amps
            const double q_n = bjt_q_n[k];
            const double dq_new = ib - q / tau;
            if (use_be) {
                F[qi] = (q - q_n) / dt - dq_new;
                J(qi, qi) += 1.0 / dt + 1.0 / tau;
                jac_cr(J, qi, e.b, -dib);
                jac_cr(J, qi, e.e, dib);
            } else {
                F[qi] = (q - q_n) / dt - 0.5 * (dq_new + bjt_dq[k]);
                J(qi, qi) += 1.0 / dt + 0.5 / tau;
                jac_cr(J, qi, e.b, -0.5 * dib);
                jac_cr(J, qi, e.e, 0.5 * dib);
            }
        }

        for (const auto& e : ckt.diodes) {
            const double v = volt(x, e.a) - volt(x, e.k);
            const auto d = diode_i_deriv(e.p, v);
            kcl(F, e.a, d.i);
            kcl(F, e.k, -d.i);
            jac(J, e.a, e.a, d.di_dv1);
            jac(J, e.a, e.k, -d.di_dv1);
            jac(J, e.k, e.a, -d.di_dv1);
            jac(J, e.k, e.k, d.di_dv1);
        }

        for (const auto& e : ckt.current_pulses) {
            if (t_new - dt < e.t_end) kcl(F, e.node, -e.amps);
        }
    }

    // Accepts x as the new state: refresh all integrator histories.
    void commit(const Eigen::VectorXd& x, double dt, bool use_be) {
        for (auto& cp : caps) {
            const double geq = (use_be ? 1.0 : 2.0) * cp.c / dt;
            const double v = volt(x, cp.a) - volt(x, cp.b);
            cp.i_n = geq * (v - cp.v_n) - (use_be ? 0.0 : cp.i_n);
            cp.v_n = v;
        }
        for (size_t k = 0; k < ckt.inductors.size(); ++k) {
            const auto& e = ckt.inductors[k];
            const double i = x[off_l + static_cast<int>(k)];
            ind_e[k] = volt(x, e.a) - volt(x, e.b) - e.r_series * i;
            ind_i_n[k] = i;
        }
        for (size_t k = 0; k < ckt.coupled_pairs.size(); ++k) {
            const auto& e = ckt.coupled_pairs[k];
            const double i1 = x[off_cp + 2 * static_cast<int>(k)];
            const double i2 = x[off_cp + 2 * static_cast<int>(k) + 1];
            cp_e[k][0] = volt(x, e.p1) - volt(x, e.p2) - e.xf.r_series_primary * i1;
            cp_e[k][1] = volt(x, e.s1) - volt(x, e.s2) - e.xf.r_series_secondary * i2;
            cp_i_n[k] = {i1, i2};
        }
        for (size_t k = 0; k < ckt.bjts.size(); ++k) {
            const auto& e = ckt.bjts[k];
            const double vbe = volt(x, e.b) - volt(x, e.e);
            const double q = x[off_q + static_cast<int>(k)];
            bjt_dq[k] = bjt_ib(e.p, vbe) - q / e.p.storage_tau;
            bjt_q_n[k] = q;
        }
    }

    std::vector<double> ind_i_n;
    std::vector<std::array<double, 2>> cp_i_n;
    std::vector<double> bjt_q_n;

    void init_state(Eigen::VectorXd& x) {
        x.setZero();
        ind_i_n.assign(ckt.inductors.size(), 0.0);
        cp_i_n.assign(ckt.coupled_pairs.size(), {0.0, 0.0});
        bjt_q_n.assign(ckt.bjts.size(), 0.0);
        for (size_t k = 0; k < ckt.inductors.size(); ++k) {
            ind_i_n[k] = ckt.inductors[k].i0;
            x[off_l + static_cast<int>(k)] = ckt.inductors[k].i0;
        }
        for (size_t k = 0; k < ckt.coupled_pairs.size(); ++k) {
            cp_i_n[k] = {ckt.coupled_pairs[k].ip0, ckt.coupled_pairs[k].is0};
            x[off_cp + 2 * static_cast<int>(k)] = ckt.coupled_pairs[k].ip0;
            x[off_cp + 2 * static_cast<int>(k) + 1] = ckt.coupled_pairs[k].is0;
        }
        // seed grounded precharged capacitors so the t=0 snapshot is honest
        for (const auto& c : ckt.capacitors) {
            if (c.v0 == 0.0) continue;
            if (c.b == 0 && c.a != 0) x[c.a - 1] = c.v0;
            else if (c.a == 0 && c.b != 0) x[c.b - 1] = -c.v0;
        }
    }

    static double bjt_ib_deriv(const BjtParams& p, double vbe) {
        // finite consistency with the clamped exponential in devices.cpp
        constexpr double kClamp = 0.85;
        const double v = std::min(vbe, kClamp);
        return p.i_s / p.beta_f * std::exp(v / p.v_t) / p.v_t;
    }
};

std::string worst_residual_node(const Circuit& ckt, const Eigen::VectorXd& F) {
    int worst = 1;
    double mag = -1.0;
    for (int n = 1; n < ckt.node_count(); ++n) {
        const double a = std::abs(F[n - 1]);
        if (a > mag) {
            mag = a;
            worst = n;
        }
    }
    return ckt.node_name(worst);
}

}  // namespace

SystemInfo assemble(const Circuit& circuit) {
    if (circuit.node_count() < 2)
        throw std::invalid_argument("assemble: circuit has no nodes besides ground");
    System sys(circuit);
    sys.check_reachable();
    sys.check_sources();
    SystemInfo info;
    info.node_unknowns = circuit.node_count() - 1;
    info.source_currents = static_cast<int>(circuit.vsources.size());
    info.inductor_currents = static_cast<int>(circuit.inductors.size()) +
                             2 * static_cast<int>(circuit.coupled_pairs.size());
    info.storage_charges = static_cast<int>(circuit.bjts.size());
    return info;
}

Trace transient(const Circuit& circuit, const SimOptions& opts) {
    opts.validate();
    assemble(circuit);
    System sys(circuit);

    const int n = sys.n_total;
    Eigen::VectorXd x(n), x_new(n), F(n), dx(n);
    Eigen::MatrixXd J(n, n);
    sys.init_state(x);

    const double dt_min = opts.dt_min > 0 ? opts.dt_min : opts.dt_max / 4096.0;
    const double dt_out = opts.dt_max * opts.output_decimation;

    Trace trace;
    trace.t0 = 0.0;
    trace.dt = dt_out;
    const int n_nodes = circuit.node_count();
    for (int k = 1; k < n_nodes; ++k) trace.names.push_back("V(" + circuit.node_name(k) + ")");
    for (const auto& e : circuit.vsources) trace.names.push_back("I(" + e.name + ")");
    for (const auto& e : circuit.inductors) trace.names.push_back("I(" + e.name + ")");
    for (const auto& e : circuit.coupled_pairs) {
        trace.names.push_back("I(" + e.name + ".p)");
        trace.names.push_back("I(" + e.name + ".s)");
    }
    trace.data.assign(trace.names.size(), {});
    if (!circuit.current_pulses.empty())
        trace.metadata["startup_imbalance"] = "current pulse injected at t=0";

    auto emit = [&](const Eigen::VectorXd& state) {
        size_t ch = 0;
        for (int k = 1; k < n_nodes; ++k) trace.data[ch++].push_back(state[k - 1]);
        for (size_t k = 0; k < circuit.vsources.size(); ++k)
            trace.data[ch++].push_back(-state[sys.off_vs + static_cast<int>(k)]);
        for (size_t k = 0; k < circuit.inductors.size(); ++k)
            trace.data[ch++].push_back(state[sys.off_l + static_cast<int>(k)]);
        for (size_t k = 0; k < circuit.coupled_pairs.size(); ++k) {
            trace.data[ch++].push_back(state[sys.off_cp + 2 * static_cast<int>(k)]);
            trace.data[ch++].push_back(state[sys.off_cp + 2 * static_cast<int>(k) + 1]);
        }
    };
    emit(x);  // t = 0 snapshot of the initial state

    double t = 0.0;
    double dt = opts.dt_max;
    bool first_step = true;
    size_t next_out = 1;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(n);

    while (t < opts.t_stop - 1e-15 * opts.t_stop) {
        const double step = std::min(dt, opts.t_stop - t);
        const double t_new = t + step;

        x_new = x;
        bool converged = false;
        for (int iter = 0; iter < opts.newton_max_iter; ++iter) {
            sys.eval(x_new, t_new, step, first_step, F, J);
            if (!F.allFinite() || !J.allFinite()) break;
            lu.compute(J);
            dx = lu.solve(-F);
            if (!dx.allFinite()) break;
            // damp wild voltage excursions through the junction exponentials
            double max_dv = 0.0;
            for (int k = 0; k < sys.n_v; ++k) max_dv = std::max(max_dv, std::abs(dx[k]));
            if (max_dv > 2.0) dx *= 2.0 / max_dv;
            x_new += dx;

            double max_dx = 0.0;
            for (int k = 0; k < sys.off_q; ++k) max_dx = std::max(max_dx, std::abs(dx[k]));
            if (max_dx < opts.newton_tol) {
                // residual check at the accepted point
                sys.eval(x_new, t_new, step, first_step, F, J);
                bool ok = true;
                for (int r = 0; r < n && ok; ++r) {
                    const double row_scale = J.row(r).cwiseAbs().maxCoeff();
                    ok = std::abs(F[r]) <= opts.newton_tol * (1.0 + row_scale);
                }
                if (ok) {
                    converged = true;
                    break;
                }
            }
        }

        if (!converged || !x_new.allFinite()) {
            if (step / 2.0 < dt_min) {
                std::ostringstream msg;
                msg << "transient: Newton failed at t=" << t_new
                    << " s with dt=" << step << " s; worst residual at node "
                    << worst_residual_node(circuit, F);
                throw std::runtime_error(msg.str());
            }
            dt = step / 2.0;
            continue;
        }

        // accepted: emit output grid points inside (t, t_new]
        while (next_out * dt_out <= t_new + 1e-12 * dt_out) {
            const double to = static_cast<double>(next_out) * dt_out;
            if (to > opts.t_stop + 1e-12 * dt_out) break;
            const double f = (to - t) / step;
            emit(x + f * (x_new - x));
            ++next_out;
        }

        sys.commit(x_new, step, first_step);
        x = x_new;
        t = t_new;
        first_step = false;
        dt = std::min(dt * 2.0, opts.dt_max);
    }

    return trace;
}

FrequencyMeasurement measure_frequency(const std::vector<double>& v, double dt,
                                       double t0, double w0, double w1) {
    if (v.size() < 4 || dt <= 0)
        throw std::invalid_argument("measure_frequency: bad trace");
    const double t_end = t0 + dt * static_cast<double>(v.size() - 1);
    // allow endpoints up to one sample beyond the grid
    if (w0 < t0 - dt || w1 > t_end + dt || w0 >= w1)
        throw std::invalid_argument("measure_frequency: window outside trace");

    const size_t i0 = static_cast<size_t>(std::ceil((w0 - t0) / dt - 1e-9));
    const size_t i1 = std::min(v.size() - 1, static_cast<size_t>(std::floor((w1 - t0) / dt + 1e-9)));
    if (i1 <= i0 + 2) throw std::invalid_argument("measure_frequency: window too short");

    double mean = 0.0, lo = v[i0], hi = v[i0];
    for (size_t i = i0; i <= i1; ++i) {
        mean += v[i];
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    mean /= static_cast<double>(i1 - i0 + 1);
    if (hi - lo < 1e-6) throw std::runtime_error("no oscillation detected");

    std::vector<double> crossings;
    for (size_t i = i0; i < i1; ++i) {
        if (v[i] < mean && v[i + 1] >= mean) {
            const double f = (mean - v[i]) / (v[i + 1] - v[i]);
            crossings.push_back(t0 + dt * (static_cast<double>(i) + f));
        }
    }
    if (crossings.size() < 4) throw std::runtime_error("no oscillation detected");

    std::vector<double> freqs;
    for (size_t i = 1; i < crossings.size(); ++i)
        freqs.push_back(1.0 / (crossings[i] - crossings[i - 1]));
    double fmean = 0.0;
    for (double f : freqs) fmean += f;
    fmean /= static_cast<double>(freqs.size());
    double var = 0.0;
    for (double f : freqs) var += (f - fmean) * (f - fmean);
    var /= static_cast<double>(freqs.size());
    return {fmean, std::sqrt(var), static_cast<int>(freqs.size())};
}

double measure_startup(const std::vector<double>& v, double dt, double t0,
                       double amplitude_threshold) {
    if (v.size() < 4 || dt <= 0)
        throw std::invalid_argument("measure_startup: bad trace");
    const double t_end = t0 + dt * static_cast<double>(v.size() - 1);

    // estimate one oscillation period from the established tail
    size_t win = 0;
    try {
        const auto f = measure_frequency(v, dt, t0, t0 + (t_end - t0) / 2.0, t_end);
        win = static_cast<size_t>(std::llround(1.0 / (f.mean_hz * dt)));
    } catch (const std::exception&) {
        win = std::max<size_t>(v.size() / 64, 2);
    }
    win = std::clamp<size_t>(win, 2, v.size() / 2);

    for (size_t i = 0; i + win < v.size(); ++i) {
        double lo = v[i], hi = v[i];
        for (size_t j = i; j < i + win; ++j) {
            lo = std::min(lo, v[j]);
            hi = std::max(hi, v[j]);
        }
        if (hi - lo > amplitude_threshold) return t0 + dt * static_cast<double>(i);
    }
    throw std::runtime_error("measure_startup: amplitude threshold never reached");
}

double measure_power(const Trace& trace, const std::string& v_channel,
                     const std::string& i_channel, double w0, double w1) {
    const auto& v = trace.channel(v_channel);
    const auto& i = trace.channel(i_channel);
    const double t_end = trace.time(trace.size() - 1);
    if (w0 < trace.t0 - trace.dt || w1 > t_end + trace.dt || w0 >= w1)
        throw std::invalid_argument("measure_power: window outside trace");
    const size_t i0 = static_cast<size_t>(std::ceil((w0 - trace.t0) / trace.dt - 1e-9));
    const size_t i1 = std::min(v.size() - 1,
                               static_cast<size_t>(std::floor((w1 - trace.t0) / trace.dt + 1e-9)));
    if (i1 < i0) throw std::invalid_argument("measure_power: empty window");
    double acc = 0.0;
    for (size_t k = i0; k <= i1; ++k) acc += v[k] * i[k];
    return acc / static_cast<double>(i1 - i0 + 1);
}

}  // namespace isokit
