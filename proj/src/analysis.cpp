#include "riskresp/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace riskresp {

std::vector<Peak> find_peaks(std::span<const double> values, std::span<const double> times, double threshold)
{
    if (values.size() != times.size()) {
        throw std::invalid_argument("find_peaks: values and times differ in length");
    }
    std::vector<Peak> peaks;
    const std::size_t n = values.size();
    if (n < 3) {
        return peaks;
    }

    std::size_t i = 1;
    while (i + 1 < n) {
        if (values[i] <= values[i - 1]) {
            ++i;
            continue;
        }
        // Rising edge at i; skip a plateau if present.
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) {
            ++j;
        }
        if (j + 1 >= n || values[j + 1] > values[i]) {
            i = j + 1;
            continue;
        }

        const std::size_t top = (i + j) / 2;
        const double height = values[top];

        double leftMin = height;
        for (std::size_t k = i; k-- > 0;) {
            if (values[k] > height) break;
            leftMin = std::min(leftMin, values[k]);
        }
        double rightMin = height;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (values[k] > height) break;
            rightMin = std::min(rightMin, values[k]);
        }
        const double prominence = height - std::max(leftMin, rightMin);
        if (prominence >= threshold) {
            peaks.push_back({times[top], height, prominence, top});
        }
        i = j + 1;
    }
    return peaks;
}

double default_prominence_threshold(std::span<const double> values)
{
    if (values.empty()) {
        return 1.0;
    }
    return std::max(1.0, 0.005 * *std::max_element(values.begin(), values.end()));
}

OscillationMetrics oscillation_metrics(std::span<const Peak> peaks)
{
    OscillationMetrics out;
    out.amplitudes.reserve(peaks.size());
    for (const Peak& p : peaks) {
        out.amplitudes.push_back(p.height);
    }
    if (peaks.size() >= 2) {
        // Mean of consecutive gaps telescopes to (last - first) / (count - 1).
        double gaps = 0;
        for (std::size_t k = 1; k < peaks.size(); ++k) {
            gaps += peaks[k].time - peaks[k - 1].time;
        }
        out.meanPeriod = gaps / double(peaks.size() - 1);
    }
    return out;
}

EquilibriumCheck detect_equilibrium(std::span<const double> values, std::span<const double> times, double window,
                                    double bandFrac)
{
    if (values.size() != times.size()) {
        throw std::invalid_argument("detect_equilibrium: values and times differ in length");
    }
    if (values.empty() || window > times.back() - times.front()) {
        throw std::invalid_argument("detect_equilibrium: window exceeds the series span");
    }
    const double start = times.back() - window;
    auto first = std::lower_bound(times.begin(), times.end(), start);
    const auto offset = std::size_t(first - times.begin());

    const auto tail = values.subspan(offset);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const double globalMax = *std::max_element(values.begin(), values.end());

    EquilibriumCheck out;
    out.band = *hi - *lo;
    out.reached = out.band < bandFrac * globalMax || (out.band == 0 && globalMax == 0);
    return out;
}

double attack_rate(std::span<const double> recovered, double N)
{
    if (recovered.empty()) {
        return 0.0;
    }
    return recovered.back() / N;
}

TrajectoryMetrics compute_metrics(const TimeSeries<double>& series, double N, const MetricsOptions& options)
{
    TrajectoryMetrics m;
    m.samples = series.size();
    if (series.empty()) {
        return m;
    }
    const std::vector<double> infectious = series.column(StateLayout::I);
    const std::vector<double> recovered = series.column(StateLayout::R);

    const double threshold = options.prominenceThreshold.value_or(default_prominence_threshold(infectious));
    m.peaks = find_peaks(infectious, series.times, threshold);
    m.waveCount = int(m.peaks.size());
    m.meanPeriod = oscillation_metrics(m.peaks).meanPeriod;
    m.maxPeak = *std::max_element(infectious.begin(), infectious.end());
    if (series.times.back() - series.times.front() >= options.equilibriumWindow) {
        const auto eq =
            detect_equilibrium(infectious, series.times, options.equilibriumWindow, options.equilibriumBandFrac);
        m.equilibrium = eq.reached;
        m.equilibriumBand = eq.band;
    }
    m.attackRate = attack_rate(recovered, N);
    return m;
}

} // namespace riskresp
