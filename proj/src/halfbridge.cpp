#include "isokit/halfbridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isokit {

BridgeStimulus BridgeStimulus::complementary_square(double frequency,
                                                    double t_stop, double high,
                                                    double edge) {
    if (frequency <= 0 || t_stop <= 0)
        throw std::invalid_argument("bridge stimulus: frequency and t_stop must be > 0");
    const double half = 0.5 / frequency;
    if (edge <= 0 || edge >= half / 4)
        throw std::invalid_argument("bridge stimulus: bad edge time");
    Stimulus a, b;
    a.points.push_back({0.0, 0.0});
    b.points.push_back({0.0, high});
    double lvl_a = 0.0;
    for (double t = half; t < t_stop; t += half) {
        a.points.push_back({t, lvl_a});
        b.points.push_back({t, high - lvl_a});
        lvl_a = high - lvl_a;
        a.points.push_back({t + edge, lvl_a});
        b.points.push_back({t + edge, high - lvl_a});
    }
    BridgeStimulus s{std::move(a), std::move(b)};
    s.validate();
    return s;
}

void BridgeStimulus::validate() const {
    a_waveform.validate();
    b_waveform.validate();
    for (const auto* w : {&a_waveform, &b_waveform})
        for (const auto& p : w->points)
            if (p.second < -0.5 || p.second > 5.5)
                throw std::invalid_argument("bridge stimulus: waveform outside [-0.5, 5.5] V");
}

double vtx_level(int a, int b, double supply) {
    if ((a != 0 && a != 1) || (b != 0 && b != 1))
        throw std::invalid_argument("vtx_level: inputs must be 0/1");
    if (a == b) return 0.0;
    return b == 1 ? supply : -supply;
}

Trace behavioral_bridge(const BridgeStimulus& stim, double delay_on,
                        double delay_off, double t_stop, double dt) {
    stim.validate();
    if (delay_on < 0 || delay_off < 0)
        throw std::invalid_argument("behavioral_bridge: delays must be >= 0");
    if (t_stop <= 0 || dt <= 0)
        throw std::invalid_argument("behavioral_bridge: bad time grid");

    auto logic = [](const Stimulus& w, double t) { return w.at(t) > 2.5 ? 1 : 0; };
    auto enable_low = [&](double t) {
        return t >= 0 && vtx_level(logic(stim.a_waveform, t), logic(stim.b_waveform, t)) > 0;
    };
    auto enable_high = [&](double t) {
        return t >= 0 && vtx_level(logic(stim.a_waveform, t), logic(stim.b_waveform, t)) < 0;
    };
    // rising edges transported by delay_on, falling by delay_off
    auto active = [&](auto&& en, double t) {
        const bool on = en(t - delay_on), off = en(t - delay_off);
        return delay_on >= delay_off ? (on && off) : (on || off);
    };

    Trace tr;
    tr.t0 = 0.0;
    tr.dt = dt;
    const auto n = static_cast<size_t>(t_stop / dt) + 1;
    std::vector<double> dls(n), dhs(n), vtx(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        dls[i] = active(enable_low, t) ? 0.0 : 5.0;
        dhs[i] = active(enable_high, t) ? 0.0 : 5.0;
        vtx[i] = vtx_level(logic(stim.a_waveform, t), logic(stim.b_waveform, t));
    }
    tr.add_channel("V(DLS)", std::move(dls));
    tr.add_channel("V(DHS)", std::move(dhs));
    tr.add_channel("V_TX", std::move(vtx));
    return tr;
}

Trace transient_bridge(const HalfBridgeConfig& cfg, const BridgeStimulus& stim,
                       const SimOptions& opts) {
    stim.validate();
    Circuit c = build_halfbridge(cfg, stim.a_waveform, stim.b_waveform);
    Trace tr = transient(c, opts);
    const auto& rb = tr.channel("V(RAILB)");
    const auto& ra = tr.channel("V(RAILA)");
    std::vector<double> vtx(rb.size());
    for (size_t i = 0; i < rb.size(); ++i) vtx[i] = rb[i] - ra[i];
    tr.add_channel("V_TX", std::move(vtx));
    return tr;
}

LockoutResult lockout_check(const Trace& trace, double v_active,
                            const std::string& low_channel,
                            const std::string& high_channel) {
    const auto& dls = trace.channel(low_channel);
    const auto& dhs = trace.channel(high_channel);
    LockoutResult res;
    size_t run = 0, worst = 0;
    for (size_t i = 0; i < dls.size(); ++i) {
        if (dls[i] < v_active && dhs[i] < v_active) {
            ++run;
            worst = std::max(worst, run);
        } else {
            run = 0;
        }
    }
    res.overlap_worst = static_cast<double>(worst) * trace.dt;
    res.lockout_ok = res.overlap_worst < 2.0 * trace.dt;
    return res;
}

namespace {

struct ActiveInterval {
    double start, end;
    int channel;  // 0 = low side, 1 = high side
};

// Active-low intervals: assert = falling through v_active, release = rising
// through v_inactive.
std::vector<ActiveInterval> active_intervals(const std::vector<double>& v,
                                             double dt, double t0,
                                             double v_active, double v_inactive,
                                             int tag) {
    std::vector<ActiveInterval> out;
    // an interval counts only from an observed assert edge; a channel that
    // samples active at t=0 (power-on artifact) is ignored until it releases
    bool active = false;
    double start = t0;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (!active && v[i] >= v_active && v[i + 1] < v_active) {
            const double f = (v_active - v[i]) / (v[i + 1] - v[i]);
            start = t0 + dt * (static_cast<double>(i) + f);
            active = true;
        } else if (active && v[i] <= v_inactive && v[i + 1] > v_inactive) {
            const double f = (v_inactive - v[i]) / (v[i + 1] - v[i]);
            out.push_back({start, t0 + dt * (static_cast<double>(i) + f), tag});
            active = false;
        }
    }
    if (active)
        out.push_back({start, t0 + dt * static_cast<double>(v.size() - 1), tag});
    return out;
}

}  // namespace

DeadTimeResult dead_time(const Trace& trace, double v_active, double v_inactive,
                         const std::string& low_channel,
                         const std::string& high_channel) {
    auto low = active_intervals(trace.channel(low_channel), trace.dt, trace.t0,
                                v_active, v_inactive, 0);
    auto high = active_intervals(trace.channel(high_channel), trace.dt, trace.t0,
                                 v_active, v_inactive, 1);
    std::vector<ActiveInterval> all;
    all.insert(all.end(), low.begin(), low.end());
    all.insert(all.end(), high.begin(), high.end());
    std::sort(all.begin(), all.end(),
              [](const ActiveInterval& a, const ActiveInterval& b) {
                  return a.start < b.start;
              });

    DeadTimeResult res;
    res.low_to_high.min = res.high_to_low.min = std::numeric_limits<double>::infinity();
    int handovers = 0;
    for (size_t i = 0; i + 1 < all.size(); ++i) {
        if (all[i].channel == all[i + 1].channel) continue;
        const double gap = all[i + 1].start - all[i].end;
        auto& s = all[i].channel == 0 ? res.low_to_high : res.high_to_low;
        s.min = std::min(s.min, gap);
        s.mean += gap;
        s.count += 1;
        ++handovers;
    }
    if (handovers < 2)
        throw std::runtime_error("dead_time: fewer than 2 handovers in trace");
    if (res.low_to_high.count > 0) res.low_to_high.mean /= res.low_to_high.count;
    if (res.high_to_low.count > 0) res.high_to_low.mean /= res.high_to_low.count;
    return res;
}

}  // namespace isokit
