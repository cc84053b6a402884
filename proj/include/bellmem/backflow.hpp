// backflow.hpp - BLP measure, Bell backflow and revival peak detection on
// sampled time series.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bellmem {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    TimeSeries() = default;
    TimeSeries(std::vector<double> t, std::vector<double> v) : times(std::move(t)), values(std::move(v)) {
        validate();
    }

    void validate() const {
        if (times.size() != values.size()) throw std::invalid_argument("TimeSeries: length mismatch");
        if (times.size() < 3) throw std::invalid_argument("TimeSeries: need at least 3 samples");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) throw std::invalid_argument("TimeSeries: times must be strictly increasing");
    }

    std::size_t size() const { return times.size(); }
};

struct BackflowReport {
    double blp{0.0};   // BLP measure of D(t)
    double bell{0.0};  // Bell backflow of B(t)
    std::vector<double> peak_times;
};

// Sum of positive increments; equals the integral of dX/dt over dX/dt > 0
// as the grid is refined.
inline double positive_variation(const TimeSeries& series) {
    series.validate();
    double acc = 0.0;
    for (std::size_t i = 1; i < series.values.size(); ++i)
        acc += std::max(0.0, series.values[i] - series.values[i - 1]);
    return acc;
}

// BLP measure for the trace distance of the fixed pair {|eg>, |ge>}.
inline double blp_measure(const TimeSeries& trace_distance) { return positive_variation(trace_distance); }

// Bell backflow: the same functional applied to the maximal CHSH value.
inline double bell_backflow(const TimeSeries& chsh) { return positive_variation(chsh); }

struct Peak {
    std::size_t index;  // grid sample holding the local maximum
    double time;        // parabolic refinement of the apex
    double value;
    double prominence;
};

// Local maxima whose topographic prominence reaches min_prominence. The apex
// time is refined by the parabola through the three samples around it.
inline std::vector<Peak> find_peaks(const TimeSeries& series, double min_prominence) {
    series.validate();
    if (!(min_prominence >= 0.0)) throw std::invalid_argument("find_peaks: min_prominence must be >= 0");
    const auto& t = series.times;
    const auto& v = series.values;
    const std::size_t n = v.size();
    std::vector<Peak> peaks;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(v[i] > v[i - 1])) {
            ++i;
            continue;
        }
        // walk across a plateau
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (j + 1 >= n || !(v[j + 1] < v[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t apex = (i + j) / 2;
        const double h = v[apex];

        double left_min = h;
        for (std::size_t k = i; k-- > 0;) {
            if (v[k] > h) break;
            left_min = std::min(left_min, v[k]);
        }
        double right_min = h;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (v[k] > h) break;
            right_min = std::min(right_min, v[k]);
        }
        const double prom = h - std::max(left_min, right_min);

        if (prom >= min_prominence) {
            double tp = t[apex];
            if (i == j) {
                const double x0 = t[apex - 1], x1 = t[apex], x2 = t[apex + 1];
                const double y0 = v[apex - 1], y1 = v[apex], y2 = v[apex + 1];
                // vertex of the interpolating parabola (non-uniform grid)
                const double d01 = (y1 - y0) / (x1 - x0);
                const double d12 = (y2 - y1) / (x2 - x1);
                const double curv = (d12 - d01) / (x2 - x0);
                if (curv < 0.0) {
                    const double cand = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
                    if (cand > x0 && cand < x2) tp = cand;
                }
            }
            peaks.push_back({apex, tp, h, prom});
        }
        i = j + 1;
    }
    return peaks;
}

// 5% of the series range; rejects ripple without masking revivals.
inline double default_prominence(const TimeSeries& series) {
    const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
    return 0.05 * (*hi - *lo);
}

inline std::vector<double> detect_peaks(const TimeSeries& series, double min_prominence) {
    std::vector<double> out;
    for (const auto& p : find_peaks(series, min_prominence)) out.push_back(p.time);
    return out;
}

// Highest sample inside [t_lo, t_hi]; returns the index or npos if the window is empty.
inline std::size_t argmax_in_window(const TimeSeries& series, double t_lo, double t_hi) {
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.times[i] < t_lo || series.times[i] > t_hi) continue;
        if (best == static_cast<std::size_t>(-1) || series.values[i] > series.values[best]) best = i;
    }
    return best;
}

}  // namespace bellmem
