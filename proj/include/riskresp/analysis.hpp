#ifndef RISKRESP_ANALYSIS_HPP
#define RISKRESP_ANALYSIS_HPP

#include <optional>
#include <span>
#include <vector>

#include "riskresp/integrator.hpp"

namespace riskresp {

struct Peak {
    double time = 0;
    double height = 0;
    double prominence = 0;
    std::size_t index = 0; ///< sample index in the source series
};

/**
 * Interior local maxima whose topographic prominence reaches `threshold`.
 *
 * Flat tops count once, at their middle sample. Prominence is the height
 * above the higher of the two minima found by walking left and right until
 * the series first exceeds the peak (or the series ends). Series with fewer
 * than three samples have no peaks.
 */
std::vector<Peak> find_peaks(std::span<const double> values, std::span<const double> times, double threshold);

/// max(1 person, 0.5% of the series maximum).
double default_prominence_threshold(std::span<const double> values);

struct OscillationMetrics {
    std::vector<double> amplitudes;
    std::optional<double> meanPeriod;
};

OscillationMetrics oscillation_metrics(std::span<const Peak> peaks);

struct EquilibriumCheck {
    bool reached = false;
    double band = 0; ///< max - min over the trailing window
};

/// True iff the spread of the trailing `window` days is below bandFrac * max(values).
EquilibriumCheck detect_equilibrium(std::span<const double> values, std::span<const double> times, double window,
                                    double bandFrac);

/// Final recovered count over N; 0 for an empty series.
double attack_rate(std::span<const double> recovered, double N);

struct MetricsOptions {
    std::optional<double> prominenceThreshold; ///< default_prominence_threshold when unset
    double equilibriumWindow = 60;
    double equilibriumBandFrac = 0.01;
};

struct TrajectoryMetrics {
    std::vector<Peak> peaks;
    int waveCount = 0;
    std::optional<double> meanPeriod;
    double maxPeak = 0; ///< maximum of I over the whole series
    bool equilibrium = false;
    double equilibriumBand = 0;
    double attackRate = 0;
    std::size_t samples = 0;
};

TrajectoryMetrics compute_metrics(const TimeSeries<double>& series, double N, const MetricsOptions& options = {});

} // namespace riskresp

#endif // RISKRESP_ANALYSIS_HPP
