#include "riskresp/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

namespace riskresp {

namespace {

enum class Kind { Number, Integer, String };

struct Field {
    std::string key;
    Kind kind;
    std::function<double(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, double)> set;
    std::function<std::string(const ScenarioConfig&)> getText;
    std::function<void(ScenarioConfig&, const std::string&)> setText;
};

#define RR_NUMBER(KEY, MEMBER) \
    Field{KEY, Kind::Number, [](const ScenarioConfig& c) { return double(c.MEMBER); }, \
          [](ScenarioConfig& c, double v) { c.MEMBER = v; }, nullptr, nullptr}
#define RR_INTEGER(KEY, MEMBER) \
    Field{KEY, Kind::Integer, [](const ScenarioConfig& c) { return double(c.MEMBER); }, \
          [](ScenarioConfig& c, double v) { c.MEMBER = int(v); }, nullptr, nullptr}
#define RR_TEXT(KEY, MEMBER) \
    Field{KEY, Kind::String, nullptr, nullptr, [](const ScenarioConfig& c) { return c.MEMBER; }, \
          [](ScenarioConfig& c, const std::string& v) { c.MEMBER = v; }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        Field{"family", Kind::String, nullptr, nullptr,
              [](const ScenarioConfig& c) { return std::string(family_name(c.family)); },
              [](ScenarioConfig& c, const std::string& v) {
                  const auto f = parse_family(v);
                  if (!f) {
                      throw ConfigError("family: unknown family '" + v +
                                        "' (expected constant, time-varying, fractional, exponential, explicit "
                                        "or split-susceptible)");
                  }
                  c.family = *f;
              }},
        RR_NUMBER("core.beta0", core.beta0),
        RR_NUMBER("core.tauE", core.tauE),
        RR_NUMBER("core.tauI", core.tauI),
        RR_NUMBER("core.N", core.N),
        RR_NUMBER("time_varying.kRamp", timeVarying.kRamp),
        RR_NUMBER("fractional.alpha", fractional.alpha),
        RR_NUMBER("fractional.gamma", fractional.gamma),
        RR_NUMBER("exponential.k", exponential.kExp),
        RR_NUMBER("adherence.m", adherence.m),
        RR_NUMBER("adherence.c", adherence.c),
        RR_NUMBER("adherence.X0", adherence.X0),
        RR_NUMBER("split.betaF", split.betaF),
        RR_NUMBER("split.delta", split.delta),
        RR_NUMBER("split.muF", split.muF),
        RR_NUMBER("split.epsilonS", split.epsilonS),
        RR_NUMBER("split.tauQ", split.tauQ),
        RR_INTEGER("delay.n", delay.order),
        RR_NUMBER("delay.tauF", delay.tauF),
        RR_NUMBER("grid.t0", grid.t0),
        RR_NUMBER("grid.tEnd", grid.tEnd),
        RR_NUMBER("grid.dt", grid.dt),
        RR_INTEGER("grid.sampleEvery", grid.sampleEvery),
        RR_NUMBER("init.I0", init.I0),
        RR_NUMBER("init.E0", init.E0),
        RR_NUMBER("init.R0count", init.R0count),
        RR_NUMBER("init.fearS0", init.fearS0),
        RR_NUMBER("init.Q0", init.Q0),
        RR_NUMBER("init.F0", init.F0),
        RR_TEXT("output.csv", output.csv),
        RR_TEXT("output.metricsJson", output.metricsJson),
        RR_TEXT("output.plotScript", output.plotScript),
    };
    return table;
}

#undef RR_NUMBER
#undef RR_INTEGER
#undef RR_TEXT

const Field* find_field(std::string_view key)
{
    for (const Field& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

void flatten(const nlohmann::json& node, const std::string& prefix, std::vector<std::pair<std::string, nlohmann::json>>& out)
{
    for (auto it = node.begin(); it != node.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            flatten(*it, key, out);
        } else {
            out.emplace_back(key, *it);
        }
    }
}

void apply_value(ScenarioConfig& config, const Field& field, const nlohmann::json& value)
{
    switch (field.kind) {
    case Kind::String:
        if (!value.is_string()) throw ConfigError(field.key + ": expected a string");
        field.setText(config, value.get<std::string>());
        return;
    case Kind::Number:
        if (!value.is_number()) throw ConfigError(field.key + ": expected a number");
        field.set(config, value.get<double>());
        return;
    case Kind::Integer: {
        if (!value.is_number()) throw ConfigError(field.key + ": expected an integer");
        const double v = value.get<double>();
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(field.key + ": expected an integer");
        field.set(config, v);
        return;
    }
    }
}

void require_nonnegative(double v, const char* key)
{
    if (!(v >= 0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be finite and >= 0");
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const Field& f : fields()) out.push_back(f.key);
        return out;
    }();
    return keys;
}

bool is_numeric_key(std::string_view key)
{
    const Field* f = find_field(key);
    return f != nullptr && f->kind != Kind::String;
}

ModelSpec<double> ScenarioConfig::model_spec() const
{
    ModelSpec<double> spec;
    spec.core = core;
    spec.delay = delay;
    switch (family) {
    case Family::Constant: spec.params = ConstantParams{}; break;
    case Family::TimeVarying: spec.params = timeVarying; break;
    case Family::Fractional: spec.params = fractional; break;
    case Family::Exponential: spec.params = exponential; break;
    case Family::Explicit: spec.params = adherence; break;
    case Family::SplitSusceptible: spec.params = split; break;
    }
    return spec;
}

void ScenarioConfig::validate() const
{
    core.validate();
    timeVarying.validate();
    fractional.validate();
    exponential.validate();
    adherence.validate();
    split.validate();
    grid.validate();
    model_spec().validate();

    require_nonnegative(init.I0, "init.I0");
    require_nonnegative(init.E0, "init.E0");
    require_nonnegative(init.R0count, "init.R0count");
    require_nonnegative(init.fearS0, "init.fearS0");
    require_nonnegative(init.Q0, "init.Q0");
    require_nonnegative(init.F0, "init.F0");

    const bool split = family == Family::SplitSusceptible;
    if (!split && (init.fearS0 != 0 || init.Q0 != 0)) {
        throw ConfigError("init.fearS0 / init.Q0 apply only to the split-susceptible family");
    }
    if (split && init.E0 != 0) {
        throw ConfigError("init.E0 must be 0 for the split-susceptible family (no latent compartment)");
    }
    const double occupied = init.I0 + init.E0 + init.R0count + init.fearS0 + init.Q0;
    if (occupied > core.N) {
        throw ConfigError("init: initial compartments exceed core.N");
    }
}

Vector<double> ScenarioConfig::initial_state() const
{
    const StateLayout layout = StateLayout::for_family(family, delay.order);
    Vector<double> y = Vector<double>::Zero(layout.size());
    y(StateLayout::S) = core.N - init.I0 - init.E0 - init.R0count - init.fearS0 - init.Q0;
    y(StateLayout::E) = init.E0;
    y(StateLayout::I) = init.I0;
    y(StateLayout::R) = init.R0count;
    for (int i = 0; i < delay.order; ++i) {
        y(layout.stage(i)) = init.F0;
    }
    if (layout.has_adherence()) {
        y(layout.adherence()) = adherence.X0;
    }
    if (layout.has_fear()) {
        y(layout.fear_susceptible()) = init.fearS0;
        y(layout.quarantined()) = init.Q0;
    }
    return y;
}

ScenarioConfig parse_config(const nlohmann::json& doc)
{
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be a JSON object");
    }
    std::vector<std::pair<std::string, nlohmann::json>> flat;
    flatten(doc, "", flat);

    ScenarioConfig config;
    bool sawFamily = false;
    for (const auto& [key, value] : flat) {
        const Field* field = find_field(key);
        if (field == nullptr) {
            throw ConfigError(key + ": unknown key");
        }
        apply_value(config, *field, value);
        sawFamily = sawFamily || key == "family";
    }
    if (!sawFamily) {
        throw ConfigError("family: required key missing");
    }
    config.validate();
    return config;
}

ScenarioConfig parse_config(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(std::string_view(buf.str()));
}

void set_config_value(nlohmann::json& doc, const std::string& key, nlohmann::json value)
{
    // Config keys carry a single "section." prefix.
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        const std::string section = key.substr(0, dot);
        if (doc.contains(section) && doc[section].is_object()) {
            doc[section].erase(key.substr(dot + 1));
            if (doc[section].empty()) doc.erase(section);
        }
    }
    doc[key] = std::move(value);
}

nlohmann::json to_json(const ScenarioConfig& config)
{
    nlohmann::json doc = nlohmann::json::object();
    for (const Field& f : fields()) {
        switch (f.kind) {
        case Kind::String: doc[f.key] = f.getText(config); break;
        case Kind::Number: doc[f.key] = f.get(config); break;
        case Kind::Integer: doc[f.key] = static_cast<long long>(f.get(config)); break;
        }
    }
    return doc;
}

// CSV -------------------------------------------------------------------------

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> csv_header(const StateLayout& layout)
{
    std::vector<std::string> cols{"t"};
    for (auto& n : layout.names()) cols.push_back(std::move(n));
    cols.emplace_back("beta_eff");
    return cols;
}

std::size_t write_timeseries_csv(const TimeSeries<double>& series, std::ostream& out)
{
    std::string text;
    const auto header = csv_header(series.layout);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text += ',';
        text += header[i];
    }
    text += '\n';
    for (std::size_t r = 0; r < series.size(); ++r) {
        text += format_number(series.times[r]);
        for (Index c = 0; c < series.states.cols(); ++c) {
            text += ',';
            text += format_number(series.states(Index(r), c));
        }
        text += ',';
        text += format_number(series.betaEff[r]);
        text += '\n';
    }
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) {
        throw std::runtime_error("failed writing trajectory CSV");
    }
    return text.size();
}

std::size_t write_timeseries_csv(const TimeSeries<double>& series, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return write_timeseries_csv(series, out);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

StateLayout layout_from_header(const std::vector<std::string_view>& cols)
{
    const auto bad = [](const std::string& why) { return CsvError("bad header: " + why, 1); };
    if (cols.size() < 6 || cols[0] != "t" || cols[1] != "S" || cols[2] != "E" || cols[3] != "I" || cols[4] != "R") {
        throw bad("expected t,S,E,I,R,...,beta_eff");
    }
    if (cols.back() != "beta_eff") {
        throw bad("last column must be beta_eff");
    }
    std::size_t k = 5;
    const std::size_t end = cols.size() - 1;
    int order = 0;
    while (k < end && cols[k] == "F" + std::to_string(order + 1)) {
        ++order;
        ++k;
    }
    bool adherence = false;
    if (k < end && cols[k] == "X") {
        adherence = true;
        ++k;
    }
    bool fear = false;
    if (k + 1 < end + 1 && k < end && cols[k] == "Sf") {
        if (k + 1 >= end || cols[k + 1] != "Q") throw bad("Sf must be followed by Q");
        fear = true;
        k += 2;
    }
    if (k != end) {
        throw bad("unexpected column '" + std::string(cols[k]) + "'");
    }
    return {order, adherence, fear};
}

} // namespace

TimeSeries<double> read_timeseries_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError("missing header", 1);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    TimeSeries<double> series;
    series.layout = layout_from_header(split_commas(line));
    const std::size_t width = std::size_t(series.layout.size()) + 2;

    std::vector<std::vector<double>> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            throw CsvError("empty line", lineNo);
        }
        const auto cells = split_commas(line);
        if (cells.size() != width) {
            throw CsvError("expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()),
                           lineNo);
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const auto cell = cells[c];
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw CsvError("field " + std::to_string(c + 1) + " is not a number", lineNo);
            }
        }
        if (!rows.empty() && !(row[0] > rows.back()[0])) {
            throw CsvError("times must be strictly increasing", lineNo);
        }
        rows.push_back(std::move(row));
    }

    series.states.resize(Index(rows.size()), series.layout.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        series.times.push_back(rows[r][0]);
        for (Index c = 0; c < series.layout.size(); ++c) {
            series.states(Index(r), c) = rows[r][std::size_t(c) + 1];
        }
        series.betaEff.push_back(rows[r].back());
    }
    return series;
}

TimeSeries<double> read_timeseries_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CsvError("cannot open '" + path.string() + "'", 0);
    }
    return read_timeseries_csv(in);
}

// Runs and reports ------------------------------------------------------------

RunResult run_scenario(const ScenarioConfig& config)
{
    config.validate();
    RunResult result;
    result.series = integrate(config.model_spec(), config.initial_state(), config.grid);
    result.metrics = compute_metrics(result.series, config.core.N);
    return result;
}

std::string metrics_text(const TrajectoryMetrics& m)
{
    std::ostringstream out;
    const auto line = [&](const char* key, const std::string& value) {
        out << std::left << std::setw(17) << key << value << '\n';
    };
    line("samples", std::to_string(m.samples));
    line("waveCount", std::to_string(m.waveCount));
    line("maxPeak", format_number(m.maxPeak));
    line("meanPeriod", m.meanPeriod ? format_number(*m.meanPeriod) : "n/a");
    line("attackRate", format_number(m.attackRate));
    line("equilibrium", m.equilibrium ? "true" : "false");
    line("equilibriumBand", format_number(m.equilibriumBand));
    for (std::size_t i = 0; i < m.peaks.size(); ++i) {
        const Peak& p = m.peaks[i];
        line(("peak[" + std::to_string(i) + "]").c_str(),
             "t=" + format_number(p.time) + " height=" + format_number(p.height) +
                 " prominence=" + format_number(p.prominence));
    }
    return out.str();
}

nlohmann::json metrics_json(const TrajectoryMetrics& m)
{
    nlohmann::json peaks = nlohmann::json::array();
    for (const Peak& p : m.peaks) {
        peaks.push_back({{"time", p.time}, {"height", p.height}, {"prominence", p.prominence}});
    }
    return {
        {"samples", m.samples},
        {"waveCount", m.waveCount},
        {"maxPeak", m.maxPeak},
        {"meanPeriod", m.meanPeriod ? nlohmann::json(*m.meanPeriod) : nlohmann::json(nullptr)},
        {"attackRate", m.attackRate},
        {"equilibrium", m.equilibrium},
        {"equilibriumBand", m.equilibriumBand},
        {"peaks", peaks},
    };
}

std::string plot_script(const std::string& csvPath, const std::vector<std::string>& columns)
{
    std::ostringstream out;
    out << "# Generated plot script; run with: python3 <this file>\n"
        << "import csv\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "path = " << nlohmann::json(csvPath).dump() << "\n"
        << "columns = " << nlohmann::json(columns).dump() << "\n\n"
        << "with open(path, newline='') as fh:\n"
        << "    rows = list(csv.DictReader(fh))\n"
        << "t = [float(r['t']) for r in rows]\n"
        << "fig, ax = plt.subplots()\n"
        << "for name in columns:\n"
        << "    ax.plot(t, [float(r[name]) for r in rows], label=name)\n"
        << "ax.set_xlabel('time (days)')\n"
        << "ax.set_ylabel('persons')\n"
        << "ax.legend()\n"
        << "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
    return out.str();
}

// Sweeps ----------------------------------------------------------------------

void SweepSpec::validate() const
{
    if (!base.is_object()) {
        throw ConfigError("sweep: base config must be a JSON object");
    }
    if (axes.empty() || axes.size() > 2) {
        throw ConfigError("sweep: one or two swept parameters required");
    }
    for (const SweepAxis& axis : axes) {
        if (!is_numeric_key(axis.name)) {
            throw ConfigError(axis.name + ": not a numeric config key");
        }
        if (axis.values.empty()) {
            throw ConfigError(axis.name + ": empty value list");
        }
    }
    if (axes.size() == 2 && axes[0].name == axes[1].name) {
        throw ConfigError("sweep: the same parameter is swept twice");
    }
}

SweepAxis parse_sweep_axis(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("sweep axis '" + std::string(text) + "': expected name=v1,v2,...");
    }
    SweepAxis axis{std::string(text.substr(0, eq)), {}};
    const auto list = text.substr(eq + 1);
    if (list.empty()) {
        throw ConfigError(axis.name + ": empty value list");
    }
    for (const auto cell : split_commas(list)) {
        double v = 0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
            throw ConfigError(axis.name + ": '" + std::string(cell) + "' is not a number");
        }
        axis.values.push_back(v);
    }
    return axis;
}

std::vector<SweepRow> run_sweep(const SweepSpec& sweep, unsigned threads)
{
    sweep.validate();

    std::vector<SweepRow> rows;
    const auto& first = sweep.axes[0];
    for (double a : first.values) {
        if (sweep.axes.size() == 1) {
            rows.push_back({{{first.name, a}}, std::nullopt, {}});
            continue;
        }
        for (double b : sweep.axes[1].values) {
            rows.push_back({{{first.name, a}, {sweep.axes[1].name, b}}, std::nullopt, {}});
        }
    }

    const auto runRow = [&](SweepRow& row) {
        try {
            nlohmann::json doc = sweep.base;
            for (const auto& [name, value] : row.values) {
                set_config_value(doc, name, value);
            }
            row.metrics = run_scenario(parse_config(doc)).metrics;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, unsigned(rows.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < rows.size(); i = next++) {
                runRow(rows[i]);
            }
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows)
{
    std::size_t width = std::string_view("variant").size();
    for (const auto& r : rows) width = std::max(width, r.variant.size());

    std::ostringstream out;
    out << std::left << std::setw(int(width) + 2) << "variant" << std::setw(22) << "maxPeak" << std::setw(11)
        << "waveCount" << std::setw(22) << "meanPeriod" << std::setw(24) << "attackRate"
        << "equilibrium\n";
    for (const auto& r : rows) {
        out << std::setw(int(width) + 2) << r.variant;
        if (!r.metrics) {
            out << "FAILED: " << r.error << '\n';
            continue;
        }
        const auto& m = *r.metrics;
        out << std::setw(22) << format_number(m.maxPeak) << std::setw(11) << m.waveCount << std::setw(22)
            << (m.meanPeriod ? format_number(*m.meanPeriod) : "n/a") << std::setw(24) << format_number(m.attackRate)
            << (m.equilibrium ? "true" : "false") << '\n';
    }
    return out.str();
}

nlohmann::json comparison_json(const std::vector<ComparisonRow>& rows)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"variant", r.variant}};
        if (r.metrics) {
            row["metrics"] = metrics_json(*r.metrics);
        } else {
            row["error"] = r.error;
        }
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace riskresp
