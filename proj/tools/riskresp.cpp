// riskresp: command-line driver for the risk-response epidemic engine.
//
// Exit codes: 0 success, 2 configuration / usage / input error,
// 3 integration failure (or any failed variant / sweep row).

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "riskresp/scenario.hpp"

namespace fs = std::filesystem;
using namespace riskresp;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRunError = 3;

nlohmann::json read_document(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
}

std::string csv_bytes(const TimeSeries<double>& series)
{
    std::ostringstream buf;
    write_timeseries_csv(series, buf);
    return buf.str();
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// simulate --------------------------------------------------------------------

struct SimulateOptions {
    std::string config;
    std::string out;
    std::optional<double> dt;
    std::optional<double> tEnd;
    bool seedless = false;
    std::string metricsJson;
    std::string plotScript;
};

int run_simulate(const SimulateOptions& opt)
{
    ScenarioConfig config;
    try {
        nlohmann::json doc = read_document(opt.config);
        if (opt.dt) set_config_value(doc, "grid.dt", *opt.dt);
        if (opt.tEnd) set_config_value(doc, "grid.tEnd", *opt.tEnd);
        config = parse_config(doc);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    const std::string csvPath = opt.out.empty() ? config.output.csv : opt.out;
    if (csvPath.empty()) {
        std::cerr << "config error: no output path (pass --out or set output.csv)\n";
        return kConfigError;
    }

    RunResult result;
    try {
        result = run_scenario(config);
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure at t=" << e.time() << ": " << e.what() << '\n';
        return kRunError;
    }

    try {
        write_text(csvPath, csv_bytes(result.series));
        const std::string metricsPath = opt.metricsJson.empty() ? config.output.metricsJson : opt.metricsJson;
        if (!metricsPath.empty()) {
            write_text(metricsPath, metrics_json(result.metrics).dump(2) + "\n");
        }
        const std::string plotPath = opt.plotScript.empty() ? config.output.plotScript : opt.plotScript;
        if (!plotPath.empty()) {
            write_text(plotPath, plot_script(csvPath, {"I"}));
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kConfigError;
    }
    std::cout << metrics_text(result.metrics);
    return kOk;
}

// compare ---------------------------------------------------------------------

struct CompareOptions {
    std::string config;
    std::string families;
    std::string delayOrders;
    std::string outDir;
    unsigned threads = 0;
};

int run_compare(const CompareOptions& opt)
{
    if (opt.families.empty() == opt.delayOrders.empty()) {
        std::cerr << "usage error: pass exactly one of --families or --delay-orders\n";
        return kConfigError;
    }
    const bool byFamily = !opt.families.empty();
    const auto items = split_list(byFamily ? opt.families : opt.delayOrders);
    if (items.empty()) {
        std::cerr << "usage error: empty variant list\n";
        return kConfigError;
    }

    nlohmann::json base;
    struct Variant {
        std::string name;
        nlohmann::json doc;
    };
    std::vector<Variant> variants;
    try {
        base = read_document(opt.config);
        parse_config(base);
        for (const auto& item : items) {
            nlohmann::json doc = base;
            if (byFamily) {
                if (!parse_family(item)) throw ConfigError("--families: unknown family '" + item + "'");
                set_config_value(doc, "family", item);
                variants.push_back({item, doc});
            } else {
                int order = 0;
                try {
                    std::size_t used = 0;
                    order = std::stoi(item, &used);
                    if (used != item.size() || order < 0) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw ConfigError("--delay-orders: '" + item + "' is not a non-negative integer");
                }
                set_config_value(doc, "delay.n", order);
                variants.push_back({"n" + std::to_string(order), doc});
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    std::error_code ec;
    fs::create_directories(opt.outDir, ec);
    if (ec) {
        std::cerr << "output error: cannot create '" << opt.outDir << "': " << ec.message() << '\n';
        return kConfigError;
    }

    std::vector<ComparisonRow> rows(variants.size());
    std::vector<std::string> csvs(variants.size());
    const auto runOne = [&](std::size_t i) {
        rows[i].variant = variants[i].name;
        try {
            const RunResult r = run_scenario(parse_config(variants[i].doc));
            rows[i].metrics = r.metrics;
            csvs[i] = csv_bytes(r.series);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(variants.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < variants.size(); i = next++) runOne(i);
        });
    }
    for (auto& th : pool) th.join();

    bool anyFailed = false;
    try {
        for (std::size_t i = 0; i < variants.size(); ++i) {
            if (!rows[i].metrics) {
                anyFailed = true;
                std::cerr << "variant " << rows[i].variant << " failed: " << rows[i].error << '\n';
                continue;
            }
            write_text(fs::path(opt.outDir) / (variants[i].name + ".csv"), csvs[i]);
        }
        const std::string table = comparison_table(rows);
        write_text(fs::path(opt.outDir) / "metrics.txt", table);
        write_text(fs::path(opt.outDir) / "metrics.json", comparison_json(rows).dump(2) + "\n");
        std::cout << table;
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kConfigError;
    }
    return anyFailed ? kRunError : kOk;
}

// sweep -----------------------------------------------------------------------

struct SweepOptions {
    std::string config;
    std::vector<std::string> params;
    std::string out;
    unsigned threads = 0;
};

int run_sweep_command(const SweepOptions& opt)
{
    SweepSpec sweep;
    try {
        sweep.base = read_document(opt.config);
        parse_config(sweep.base);
        for (const auto& p : opt.params) sweep.axes.push_back(parse_sweep_axis(p));
        sweep.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    const auto rows = run_sweep(sweep, opt.threads);
    std::vector<ComparisonRow> table;
    nlohmann::json doc = nlohmann::json::array();
    bool anyFailed = false;
    for (const auto& row : rows) {
        std::string label;
        nlohmann::json values = nlohmann::json::object();
        for (const auto& [name, value] : row.values) {
            if (!label.empty()) label += " ";
            label += name + "=" + format_number(value);
            values[name] = value;
        }
        table.push_back({label, row.metrics, row.error});
        nlohmann::json entry = {{"values", values}};
        if (row.ok()) {
            entry["metrics"] = metrics_json(*row.metrics);
        } else {
            entry["error"] = row.error;
            anyFailed = true;
            std::cerr << "row " << label << " failed: " << row.error << '\n';
        }
        doc.push_back(std::move(entry));
    }
    std::cout << comparison_table(table);
    if (!opt.out.empty()) {
        try {
            write_text(opt.out, doc.dump(2) + "\n");
        } catch (const std::exception& e) {
            std::cerr << "output error: " << e.what() << '\n';
            return kConfigError;
        }
    }
    return anyFailed ? kRunError : kOk;
}

// metrics ---------------------------------------------------------------------

struct MetricsCommandOptions {
    std::string in;
    bool json = false;
};

int run_metrics(const MetricsCommandOptions& opt)
{
    TimeSeries<double> series;
    try {
        series = read_timeseries_csv(fs::path(opt.in));
    } catch (const CsvError& e) {
        std::cerr << "csv error: " << opt.in << ": " << e.what() << '\n';
        return kConfigError;
    }
    // Population size is recovered from the person columns of the first row.
    const double N = series.empty() ? 1.0 : series.layout.persons(series.states.row(0).transpose());
    const TrajectoryMetrics m = compute_metrics(series, N);
    if (opt.json) {
        std::cout << metrics_json(m).dump(2) << '\n';
    } else {
        std::cout << metrics_text(m);
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"riskresp: SEIR simulations with behavioural risk-response feedback"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario, write its trajectory CSV, print metrics");
    simulate->add_option("--config", sim.config, "Scenario JSON file")->required();
    simulate->add_option("--out", sim.out, "Trajectory CSV path (overrides output.csv)");
    simulate->add_option("--dt", sim.dt, "Override grid.dt (days)");
    simulate->add_option("--t-end", sim.tEnd, "Override grid.tEnd (days)");
    simulate->add_flag("--seedless", sim.seedless,
                       "Accepted for script compatibility; every run is deterministic and uses no seed");
    simulate->add_option("--metrics-json", sim.metricsJson, "Also write metrics as JSON to this path");
    simulate->add_option("--plot-script", sim.plotScript, "Also write a matplotlib script plotting I(t)");

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Vary family or delay order over a base scenario");
    compare->add_option("--config", cmp.config, "Base scenario JSON file")->required();
    compare->add_option("--families", cmp.families, "Comma-separated family names");
    compare->add_option("--delay-orders", cmp.delayOrders, "Comma-separated delay orders");
    compare->add_option("--out-dir", cmp.outDir, "Directory for per-variant CSVs and metrics tables")->required();
    compare->add_option("--threads", cmp.threads, "Worker threads (0 = hardware concurrency)");

    SweepOptions swp;
    auto* sweep = app.add_subcommand("sweep", "Run a one- or two-parameter sweep over a base scenario");
    sweep->add_option("--config", swp.config, "Base scenario JSON file")->required();
    sweep->add_option("--param", swp.params, "Swept parameter as key=v1,v2,... (repeat for a second axis)")
        ->required();
    sweep->add_option("--out", swp.out, "Write the sweep table as JSON to this path");
    sweep->add_option("--threads", swp.threads, "Worker threads (0 = hardware concurrency)");

    MetricsCommandOptions met;
    auto* metrics = app.add_subcommand("metrics", "Compute trajectory metrics from an existing CSV");
    metrics->add_option("--in", met.in, "Trajectory CSV written by simulate or compare")->required();
    metrics->add_flag("--json", met.json, "Print metrics as JSON instead of text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (simulate->parsed()) return run_simulate(sim);
    if (compare->parsed()) return run_compare(cmp);
    if (sweep->parsed()) return run_sweep_command(swp);
    if (metrics->parsed()) return run_metrics(met);
    return kConfigError;
}
