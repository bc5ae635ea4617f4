#include "isokit/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isokit {

namespace {

double sample_at(const std::vector<double>& v, double dt, double t0, double t) {
    const double u = (t - t0) / dt;
    if (u <= 0.0) return v.front();
    const auto i = static_cast<size_t>(u);
    if (i + 1 >= v.size()) return v.back();
    const double f = u - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
}

struct Crossing {
    double t;
    bool rising;
};

std::vector<Crossing> find_crossings(const std::vector<double>& v, double dt,
                                     double t0, double thr) {
    std::vector<Crossing> out;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        const bool below = v[i] < thr, below_next = v[i + 1] < thr;
        if (below == below_next) continue;
        const double f = (thr - v[i]) / (v[i + 1] - v[i]);
        out.push_back({t0 + dt * (static_cast<double>(i) + f), below});
    }
    return out;
}

}  // namespace

void BitPattern::validate() const {
    if (bit_rate <= 0) throw std::invalid_argument("bit pattern: bit_rate must be > 0");
    if (rise_fall <= 0 || rise_fall >= 0.2 / bit_rate)
        throw std::invalid_argument("bit pattern: rise_fall must be in (0, 0.2/bit_rate)");
    for (int b : bits)
        if (b != 0 && b != 1) throw std::invalid_argument("bit pattern: bits must be 0/1");
}

std::vector<int> prbs7(uint8_t seed, size_t n) {
    uint8_t state = seed & 0x7F;
    if (state == 0) throw std::invalid_argument("prbs7: seed must be nonzero");
    std::vector<int> bits;
    bits.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const int fb = ((state >> 6) ^ (state >> 5)) & 1;
        state = static_cast<uint8_t>(((state << 1) | fb) & 0x7F);
        bits.push_back(fb);
    }
    return bits;
}

Stimulus nrz_stimulus(const BitPattern& p) {
    p.validate();
    const double T = p.bit_period();
    auto level = [&](int b) { return b ? p.level_high : p.level_low; };
    Stimulus s;
    if (p.bits.empty()) {
        s.points.push_back({0.0, p.level_low});
        return s;
    }
    s.points.push_back({0.0, level(p.bits[0])});
    for (size_t k = 1; k < p.bits.size(); ++k) {
        if (p.bits[k] == p.bits[k - 1]) continue;
        const double t = static_cast<double>(k) * T;
        s.points.push_back({t, level(p.bits[k - 1])});
        s.points.push_back({t + p.rise_fall, level(p.bits[k])});
    }
    s.validate();
    return s;
}

DelayResult propagation_delay(const std::vector<double>& input,
                              const std::vector<double>& output, double dt,
                              double t0, double v_threshold,
                              bool output_inverted, double t_start) {
    if (input.size() != output.size() || input.size() < 2 || dt <= 0)
        throw std::invalid_argument("propagation_delay: bad channels");

    const auto in_edges = find_crossings(input, dt, t0, v_threshold);
    const auto out_edges = find_crossings(output, dt, t0, v_threshold);

    DelayResult res;
    auto account = [](EdgeDelayStats& s, double d) {
        s.mean += d;
        s.max = std::max(s.max, d);
        s.count += 1;
    };

    for (size_t e = 0; e < in_edges.size(); ++e) {
        const auto& edge = in_edges[e];
        if (edge.t < t_start) continue;
        const double t_next = e + 1 < in_edges.size()
                                  ? in_edges[e + 1].t
                                  : t0 + dt * static_cast<double>(input.size());
        const bool want_rising = output_inverted ? !edge.rising : edge.rising;
        double found = -1.0;
        for (const auto& oe : out_edges) {
            if (oe.rising != want_rising) continue;
            if (oe.t < edge.t - dt * 1e-6) continue;
            if (oe.t >= t_next) break;
            found = oe.t;
            break;
        }
        if (found < 0) {
            res.lost_edges += 1;
            continue;
        }
        account(edge.rising ? res.rise : res.fall, found - edge.t);
    }
    if (res.rise.count > 0) res.rise.mean /= res.rise.count;
    if (res.fall.count > 0) res.fall.mean /= res.fall.count;
    if (res.rise.count + res.fall.count == 0)
        throw std::runtime_error("propagation_delay: no qualifying input edges");
    return res;
}

EyeResult eye_diagram(const std::vector<double>& output, double dt, double t0,
                      double bit_period, double alignment_offset,
                      double v_threshold, double band_half_width) {
    if (output.size() < 2 || dt <= 0 || bit_period <= 0)
        throw std::invalid_argument("eye_diagram: bad channel");
    const double span = dt * static_cast<double>(output.size() - 1);
    if (span < 20.0 * bit_period)
        throw std::invalid_argument("eye_diagram: trace spans fewer than 20 bit periods");

    const double T = bit_period;
    const double t_end = t0 + span;
    const auto k_first = static_cast<long>(std::ceil((t0 - alignment_offset) / T));
    const auto k_last = static_cast<long>(std::floor((t_end - alignment_offset) / T)) - 1;

    // recovered bit per full interval (sampled at center)
    std::vector<int> interval_bit(static_cast<size_t>(k_last - k_first + 1));
    bool any_high = false, any_low = false;
    for (long k = k_first; k <= k_last; ++k) {
        const double tc = alignment_offset + (static_cast<double>(k) + 0.5) * T;
        const int b = sample_at(output, dt, t0, tc) > v_threshold ? 1 : 0;
        interval_bit[static_cast<size_t>(k - k_first)] = b;
        (b ? any_high : any_low) = true;
    }
    if (!any_high || !any_low)
        throw std::runtime_error("no transitions; eye undefined");

    EyeResult res;
    res.folded.reserve(output.size());
    double high_min = std::numeric_limits<double>::infinity();
    double low_max = -std::numeric_limits<double>::infinity();

    const size_t nbins = std::min<size_t>(4000, std::max<size_t>(16, static_cast<size_t>(T / dt)));
    std::vector<char> bin_clean(nbins, 1);

    for (size_t i = 0; i < output.size(); ++i) {
        const double t = t0 + dt * static_cast<double>(i);
        const double rel = (t - alignment_offset) / T;
        const auto k = static_cast<long>(std::floor(rel));
        if (k < k_first || k > k_last) continue;
        const double phase = (rel - static_cast<double>(k)) * T;
        const int bit = interval_bit[static_cast<size_t>(k - k_first)];
        res.folded.push_back({phase, output[i], bit});

        if (phase >= 0.4 * T && phase <= 0.6 * T) {
            if (bit)
                high_min = std::min(high_min, output[i]);
            else
                low_max = std::max(low_max, output[i]);
        }
        if (std::abs(output[i] - v_threshold) < band_half_width) {
            auto bin = static_cast<size_t>(phase / T * static_cast<double>(nbins));
            if (bin >= nbins) bin = nbins - 1;
            bin_clean[bin] = 0;
        }
    }
    res.eye_height = high_min - low_max;

    // widest circular run of bins never visited inside the threshold band
    size_t best = 0, run = 0;
    for (size_t i = 0; i < 2 * nbins; ++i) {
        if (bin_clean[i % nbins]) {
            ++run;
            best = std::max(best, run);
        } else {
            run = 0;
        }
    }
    best = std::min(best, nbins);
    res.eye_width = static_cast<double>(best) / static_cast<double>(nbins) * T;
    return res;
}

BitCheckResult check_bits(const std::vector<double>& output, double dt,
                          double t0, const BitPattern& sent,
                          double sample_offset, bool output_inverted,
                          double v_threshold) {
    sent.validate();
    const double T = sent.bit_period();
    if (std::abs(sample_offset) >= T)
        throw std::invalid_argument("check_bits: sample_offset outside bit period");
    if (sent.bits.empty()) return {0, 0, 0};

    const double t_end = t0 + dt * static_cast<double>(output.size() - 1);
    std::vector<int> recovered;
    for (size_t k = 0; k < sent.bits.size(); ++k) {
        const double ts = (static_cast<double>(k) + 0.5) * T + sample_offset;
        if (ts < t0 || ts > t_end) break;
        int b = sample_at(output, dt, t0, ts) > v_threshold ? 1 : 0;
        if (output_inverted) b ^= 1;
        recovered.push_back(b);
    }
    if (recovered.size() < 2)
        throw std::invalid_argument("check_bits: trace too short to sample bits");

    const int max_shift = std::min<int>(8, static_cast<int>(recovered.size()) / 4);
    int best_shift = 0, best_score = -1, second_score = -1;
    for (int s = 0; s <= max_shift; ++s) {
        int score = 0, n = 0;
        for (size_t k = static_cast<size_t>(s); k < recovered.size(); ++k, ++n)
            if (recovered[k] == sent.bits[k - static_cast<size_t>(s)]) ++score;
        // normalize to the common comparison length
        score = n > 0 ? score * static_cast<int>(recovered.size()) / n : 0;
        if (score > best_score) {
            second_score = best_score;
            best_score = score;
            best_shift = s;
        } else if (score > second_score) {
            second_score = score;
        }
    }
    if (max_shift > 0 && second_score >= 0 &&
        best_score - second_score < static_cast<int>(0.05 * static_cast<double>(recovered.size())))
        throw std::runtime_error("check_bits: ambiguous latency correlation");

    BitCheckResult res;
    res.latency_bits = best_shift;
    for (size_t k = static_cast<size_t>(best_shift); k < recovered.size(); ++k) {
        res.checked += 1;
        if (recovered[k] != sent.bits[k - static_cast<size_t>(best_shift)]) res.errors += 1;
    }
    return res;
}

}  // namespace isokit
