// Command-line front end: single runs, parameter sweeps and coverage tuning.
//
//   gossipsim --protocol FixedProbability --p 60 --baseline
//   gossipsim --config configs/ddf.cfg --tune-coverage 0.99 --baseline
//   gossipsim --protocol DandelionPP --relayer-fraction 0.8 --sweep relayer_fraction=0.1,0.5,0.9

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gossipsim/gossipsim.hpp"

using namespace gossipsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
    if (path == "-") {
        if (format == ReportFormat::Csv)
            write_report_csv(std::cout, rows);
        else
            write_report_text(std::cout, rows);
        return;
    }
    emit_report(rows, format, path);
}

std::pair<std::string, std::vector<double>> parse_sweep(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--sweep expects axis=v1,v2,...");
    std::string axis = detail::trim(std::string_view(spec).substr(0, eq));
    std::vector<double> values;
    std::stringstream list(spec.substr(eq + 1));
    for (std::string item; std::getline(list, item, ',');)
        values.push_back(detail::parse_number<double>(axis, detail::trim(item)));
    if (values.empty()) throw ConfigError("--sweep needs at least one value");
    return {axis, values};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded, time-stepped gossip simulator over churning P2P overlays"};
    app.set_version_flag("--version", "gossipsim 0.1.0");

    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);

    // Flags that map one-to-one onto config keys.
    std::map<std::string, std::string> overrides;
    auto key_option = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    key_option("--protocol", "protocol",
               "Broadcast | ProbabilisticBroadcast (PB) | FixedProbability (FP) | FixedFanout "
               "(F-FAN) | DegreeDependent (DDF) | Dandelion | DandelionPP [Broadcast]");
    key_option("--p", "p", "forwarding parameter in percent (PB, FP)");
    key_option("--fanout", "fanout", "neighbors per relay (F-FAN)");
    key_option("--ddf-x", "ddf_x", "DDF parameter X");
    key_option("--ddf-mode", "ddf_mode", "DDF form: exp (1/D^X) or log (1/log_D X) [exp]");
    key_option("--stem-steps", "stem_steps", "Dandelion stem length");
    key_option("--relayer-fraction", "relayer_fraction", "Dandelion++ share of relayers");
    key_option("--role-epoch-len", "role_epoch_len", "Dandelion++ role epoch in timesteps [100]");
    key_option("--failsafe", "failsafe", "fail-safe fluff for stem protocols (true/false)");
    key_option("--failsafe-timeout", "failsafe_timeout",
               "timesteps before a stem relayer fluffs [2*stem_steps+5; 2*role_epoch_len]");
    key_option("--topology", "topology", "random | hierarchical [random]");
    key_option("--nodes", "nodes", "total peers [10000]");
    key_option("--avg-degree", "avg_degree", "mean degree of the random overlay [15]");
    key_option("--active-fraction", "active_fraction", "initially active share [0.8]");
    key_option("--attach-count", "attach_count", "peers a joining node links to [mean degree]");
    key_option("--p-activate", "p_activate", "per-step activation probability [0.01]");
    key_option("--p-deactivate", "p_deactivate", "per-step deactivation probability [0.0025]");
    key_option("--hub-count", "hub_count", "hubs in the hierarchical overlay [80]");
    key_option("--hub-degree-min", "hub_degree_min", "smallest hub degree [250]");
    key_option("--hub-degree-max", "hub_degree_max", "largest hub degree [300]");
    key_option("--total-entries", "total_entries",
               "directed adjacency entries of the hierarchical overlay [120000]");
    key_option("--hub-churn", "hub_churn", "let hubs deactivate (true/false) [false]");
    key_option("--hub-refill", "hub_refill", "top hubs back up to their degree [true]");
    key_option("--epochs", "epochs", "communication attempts per run [10000]");
    key_option("--ttl", "ttl", "hop budget per message [20]");
    key_option("--max-steps", "max_steps",
               "timestep budget per epoch [ttl; 4*ttl or timeout+2*ttl with fail-safe]");
    key_option("--seed", "seed", "master seed [1]");

    std::string output = "-";
    std::string format = "csv";
    std::string sweep;
    std::size_t replications = 1;
    unsigned jobs = 1;
    double tune_coverage = -1.0;
    double tolerance = 0.0;
    bool baseline = false;
    std::string records_path;
    std::string graph_path;
    bool print_config = false;

    app.add_option("--output,-o", output, "report destination, '-' for stdout");
    app.add_option("--format", format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
    app.add_option("--sweep", sweep, "axis=v1,v2,... over a numeric config key");
    app.add_option("--replications", replications, "runs per sweep value")->check(CLI::PositiveNumber);
    app.add_option("--jobs,-j", jobs, "concurrent runs for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--tune-coverage", tune_coverage,
                   "find the least-forwarding parameter reaching this success rate")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--tolerance", tolerance, "slack below the coverage target")
        ->check(CLI::Range(0.0, 1.0));
    app.add_flag("--baseline", baseline, "also run broadcast and fill the ratio columns");
    app.add_option("--records", records_path, "per-epoch CSV for a single run");
    app.add_option("--export-graph", graph_path, "write the initial overlay as an edge list");
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        ConfigBuilder builder;
        if (!config_path.empty()) builder.add_text(read_file(config_path), config_path);
        for (const auto& [key, value] : overrides) builder.set(key, value);
        const ExperimentConfig cfg = builder.build(tune_coverage >= 0.0);
        const ReportFormat fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Text;

        if (print_config) {
            std::cout << serialize_config(cfg);
            return 0;
        }
        if (!graph_path.empty()) {
            std::ofstream out(graph_path, std::ios::binary | std::ios::trunc);
            if (!out) throw ConfigError("cannot open '" + graph_path + "' for writing");
            build_graph(cfg).write_snapshot(out);
        }
        const int modes = (!sweep.empty()) + (tune_coverage >= 0.0);
        if (modes > 1) throw ConfigError("--sweep and --tune-coverage are exclusive");
        if (!records_path.empty() && modes > 0)
            throw ConfigError("--records applies to single runs only");

        std::vector<ReportRow> rows;
        if (!sweep.empty()) {
            auto [axis, values] = parse_sweep(sweep);
            auto points = run_sweep(cfg, axis, values, replications, jobs);
            std::vector<AggregateMetrics> bases(points.size());
            if (baseline)
                run_indexed(points.size(), jobs, [&](std::size_t i) {
                    bases[i] = run_experiment(broadcast_baseline(points[i].config));
                });
            for (std::size_t i = 0; i < points.size(); ++i)
                rows.push_back(make_report_row(points[i].config, points[i].metrics,
                                               baseline ? &bases[i] : nullptr));
        } else if (tune_coverage >= 0.0) {
            TuneResult res;
            try {
                res = tune_parameter(cfg, tune_coverage, tolerance);
            } catch (const TuneError& e) {
                std::cerr << "gossipsim: " << e.what() << "; best point reached success rate "
                          << e.best().metrics.success_rate() << '\n';
                return 3;
            }
            for (const auto& pr : res.probes)
                std::cerr << "probe " << detail::format_double(pr.value) << " -> success "
                          << detail::format_double(pr.metrics.success_rate()) << '\n';
            AggregateMetrics base;
            if (baseline) base = run_experiment(broadcast_baseline(res.config));
            rows.push_back(make_report_row(res.config, res.metrics, baseline ? &base : nullptr));
        } else {
            std::ofstream records;
            RecordSink sink;
            if (!records_path.empty()) {
                records.open(records_path, std::ios::binary | std::ios::trunc);
                if (!records) throw ConfigError("cannot open '" + records_path + "' for writing");
                write_epoch_csv_header(records);
                sink = [&records](std::uint64_t e, const EpochRecord& r) {
                    write_epoch_csv_row(records, e, r);
                };
            }
            AggregateMetrics m = run_experiment(cfg, sink);
            AggregateMetrics base;
            if (baseline) base = run_experiment(broadcast_baseline(cfg));
            rows.push_back(make_report_row(cfg, m, baseline ? &base : nullptr));
            if (records.is_open()) {
                records.flush();
                if (!records) throw ConfigError("failed writing '" + records_path + "'");
            }
        }
        emit(rows, fmt, output);
    } catch (const ConfigError& e) {
        std::cerr << "gossipsim: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "gossipsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
