#ifndef RISKRESP_SCENARIO_HPP
#define RISKRESP_SCENARIO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "riskresp/analysis.hpp"
#include "riskresp/integrator.hpp"

namespace riskresp {

struct InitialConditions {
    double I0 = 100;
    double E0 = 0;
    double R0count = 0;
    double fearS0 = 0;
    double Q0 = 0;
    double F0 = 0; ///< starting value of every delay stage
};

struct OutputPaths {
    std::string csv;
    std::string metricsJson;
    std::string plotScript;
};

/**
 * Everything needed to run one scenario. Parameters of every family are
 * carried so that a base config can be re-targeted to another family; only
 * the active family's record reaches the ModelSpec.
 */
struct ScenarioConfig {
    Family family = Family::Constant;
    CoreParams<double> core;
    TimeVaryingParams<double> timeVarying;
    FractionalParams<double> fractional;
    ExponentialParams<double> exponential;
    AdherenceParams<double> adherence;
    SplitSusceptibleParams<double> split;
    DelayChain<double> delay;
    Grid<double> grid;
    InitialConditions init;
    OutputPaths output;

    ModelSpec<double> model_spec() const;
    Vector<double> initial_state() const;

    /// Full validation; throws ConfigError with a key-qualified message.
    void validate() const;
};

/// Every key the config accepts, in canonical order.
const std::vector<std::string>& config_keys();

/// Keys that take numeric values (valid sweep axes).
bool is_numeric_key(std::string_view key);

/**
 * Parse a JSON scenario. Keys are flat and dotted ("core.beta0"); nested
 * objects are flattened with '.', so {"core": {"beta0": 0.5}} is accepted
 * too. Unknown keys are rejected; missing keys take their defaults.
 */
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig parse_config(const nlohmann::json& doc);
inline ScenarioConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }
ScenarioConfig load_config(const std::filesystem::path& path);

/// Sets `key` in a scenario document, replacing a nested spelling of it if present.
void set_config_value(nlohmann::json& doc, const std::string& key, nlohmann::json value);

/// Flat JSON with every key explicit.
nlohmann::json to_json(const ScenarioConfig& config);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

std::vector<std::string> csv_header(const StateLayout& layout);
std::size_t write_timeseries_csv(const TimeSeries<double>& series, std::ostream& out);
std::size_t write_timeseries_csv(const TimeSeries<double>& series, const std::filesystem::path& path);

/// Reads a CSV in the layout written above; throws CsvError with the offending line.
TimeSeries<double> read_timeseries_csv(std::istream& in);
TimeSeries<double> read_timeseries_csv(const std::filesystem::path& path);

struct RunResult {
    TimeSeries<double> series;
    TrajectoryMetrics metrics;
};

RunResult run_scenario(const ScenarioConfig& config);

std::string metrics_text(const TrajectoryMetrics& metrics);
nlohmann::json metrics_json(const TrajectoryMetrics& metrics);

/// Matplotlib script plotting the named columns of a trajectory CSV against t.
std::string plot_script(const std::string& csvPath, const std::vector<std::string>& columns);

// Sweeps ----------------------------------------------------------------------

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepSpec {
    nlohmann::json base; ///< scenario document the axes are applied to
    std::vector<SweepAxis> axes;

    void validate() const;
};

struct SweepRow {
    std::vector<std::pair<std::string, double>> values;
    std::optional<TrajectoryMetrics> metrics;
    std::string error;

    bool ok() const { return metrics.has_value(); }
};

/// Parses "name=v1,v2,v3".
SweepAxis parse_sweep_axis(std::string_view text);

/**
 * One run per value combination, first axis outermost. Rows follow input
 * order regardless of completion order; a failing run leaves its row with
 * an error and the others proceed.
 */
std::vector<SweepRow> run_sweep(const SweepSpec& sweep, unsigned threads = 0);

/// Row of a side-by-side comparison table.
struct ComparisonRow {
    std::string variant;
    std::optional<TrajectoryMetrics> metrics;
    std::string error;
};

std::string comparison_table(const std::vector<ComparisonRow>& rows);
nlohmann::json comparison_json(const std::vector<ComparisonRow>& rows);

} // namespace riskresp

#endif // RISKRESP_SCENARIO_HPP
