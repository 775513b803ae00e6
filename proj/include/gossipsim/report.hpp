// Result emission: one CSV row (or text table line) per aggregate.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gossipsim/config.hpp"
#include "gossipsim/harness.hpp"
#include "gossipsim/metrics.hpp"

namespace gossipsim {

struct ReportRow {
    std::string config_hash;
    std::string topology;
    std::string protocol;
    std::optional<double> param;
    std::uint64_t epochs = 0;
    double success_rate = 0.0;
    double avg_messages = 0.0;
    std::optional<double> avg_delay;
    std::optional<double> msg_fraction_vs_broadcast;
    std::optional<double> time_overhead;
    std::uint64_t seed = 0;
};

inline ReportRow make_report_row(const ExperimentConfig& cfg, const AggregateMetrics& m,
                                 const AggregateMetrics* baseline = nullptr) {
    ReportRow row;
    row.config_hash = config_hash(cfg);
    row.topology = std::string(to_string(cfg.topology));
    row.protocol = std::string(to_string(cfg.protocol.kind));
    row.param = protocol_param(cfg.protocol);
    row.epochs = m.epochs;
    row.success_rate = m.success_rate();
    row.avg_messages = m.avg_messages();
    row.avg_delay = m.avg_delay();
    if (baseline) {
        if (baseline->avg_messages() > 0.0) row.msg_fraction_vs_broadcast = message_fraction(m, *baseline);
        if (m.avg_delay() && baseline->avg_delay() && *baseline->avg_delay() > 0.0)
            row.time_overhead = time_overhead(m, *baseline);
    }
    row.seed = cfg.seed;
    return row;
}

inline constexpr std::string_view kReportHeader =
    "config_hash,topology,protocol,param,epochs,success_rate,avg_messages,avg_delay,"
    "msg_fraction_vs_broadcast,time_overhead,seed";

namespace detail {

inline std::string opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string{};
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

inline std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_number<double>("csv", s);
}

}  // namespace detail

inline void write_report_csv(std::ostream& os, std::span<const ReportRow> rows) {
    using detail::format_double;
    using detail::opt;
    os << kReportHeader << '\n';
    for (const auto& r : rows) {
        os << r.config_hash << ',' << r.topology << ',' << r.protocol << ',' << opt(r.param) << ','
           << r.epochs << ',' << format_double(r.success_rate) << ','
           << format_double(r.avg_messages) << ',' << opt(r.avg_delay) << ','
           << opt(r.msg_fraction_vs_broadcast) << ',' << opt(r.time_overhead) << ',' << r.seed
           << '\n';
    }
}

inline std::vector<ReportRow> read_report_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty report");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReportHeader) throw ConfigError("unexpected report header");
    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto c = detail::split_csv_line(line);
        if (c.size() != 11) throw ConfigError("report row has " + std::to_string(c.size()) + " cells");
        ReportRow r;
        r.config_hash = c[0];
        r.topology = c[1];
        r.protocol = c[2];
        r.param = detail::parse_opt(c[3]);
        r.epochs = detail::parse_number<std::uint64_t>("epochs", c[4]);
        r.success_rate = detail::parse_number<double>("success_rate", c[5]);
        r.avg_messages = detail::parse_number<double>("avg_messages", c[6]);
        r.avg_delay = detail::parse_opt(c[7]);
        r.msg_fraction_vs_broadcast = detail::parse_opt(c[8]);
        r.time_overhead = detail::parse_opt(c[9]);
        r.seed = detail::parse_number<std::uint64_t>("seed", c[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void write_report_text(std::ostream& os, std::span<const ReportRow> rows) {
    auto fixed = [](const std::optional<double>& v, int prec) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(prec) << *v;
        return s.str();
    };
    os << std::left << std::setw(24) << "protocol" << std::setw(14) << "topology" << std::right
       << std::setw(10) << "param" << std::setw(8) << "epochs" << std::setw(10) << "success"
       << std::setw(12) << "messages" << std::setw(8) << "delay" << std::setw(10) << "msg_frac"
       << std::setw(10) << "t_over" << '\n';
    for (const auto& r : rows) {
        os << std::left << std::setw(24) << r.protocol << std::setw(14) << r.topology << std::right
           << std::setw(10) << fixed(r.param, 3) << std::setw(8) << r.epochs << std::setw(10)
           << fixed(r.success_rate, 4) << std::setw(12) << fixed(r.avg_messages, 1)
           << std::setw(8) << fixed(r.avg_delay, 3) << std::setw(10)
           << fixed(r.msg_fraction_vs_broadcast, 3) << std::setw(10) << fixed(r.time_overhead, 3)
           << '\n';
    }
}

enum class ReportFormat { Csv, Text };

/// Writes rows to `path` ("-" for stdout is handled by the caller).
inline void emit_report(std::span<const ReportRow> rows, ReportFormat format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    if (format == ReportFormat::Csv)
        write_report_csv(out, rows);
    else
        write_report_text(out, rows);
    out.flush();
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace gossipsim
