#include "isokit/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isokit {

void Stimulus::validate() const {
    if (points.empty()) throw std::invalid_argument("stimulus: no points");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
            throw std::invalid_argument("stimulus: non-finite point");
        if (i > 0 && points[i].first <= points[i - 1].first)
            throw std::invalid_argument("stimulus: times must be strictly increasing");
    }
}

double Stimulus::at(double t) const {
    if (points.empty()) return 0.0;
    if (t <= points.front().first) return points.front().second;
    if (t >= points.back().first) return points.back().second;
    auto it = std::upper_bound(points.begin(), points.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.first) / (hi.first - lo.first);
    return lo.second + f * (hi.second - lo.second);
}

bool Trace::has_channel(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& Trace::channel(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw std::invalid_argument("trace: no channel named '" + name + "'");
    return data[static_cast<size_t>(it - names.begin())];
}

void Trace::add_channel(const std::string& name, std::vector<double> samples) {
    if (!data.empty() && samples.size() != size())
        throw std::invalid_argument("trace: channel length mismatch");
    names.push_back(name);
    data.push_back(std::move(samples));
}

void Trace::write_csv(std::ostream& os) const {
    os << "time_s";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    os.precision(std::numeric_limits<double>::max_digits10);
    for (size_t i = 0; i < size(); ++i) {
        os << time(i);
        for (const auto& ch : data) os << ',' << ch[i];
        os << '\n';
    }
}

}  // namespace isokit
