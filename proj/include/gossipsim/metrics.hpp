// Epoch outcomes and their aggregation into coverage / traffic / delay
// figures, plus ratios against a pure-broadcast baseline.
//
// Aggregates hold integer sums only, so merging partial aggregates is exact
// and independent of record order.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "gossipsim/types.hpp"

namespace gossipsim {

struct EpochRecord {
    bool success = false;
    std::uint64_t messages_sent = 0;
    std::optional<Timestep> delay;  // present iff success
    std::uint64_t lost_to_churn = 0;
    std::uint64_t failsafe_triggers = 0;
    std::uint64_t degree_queries = 0;
    // First holder receipt came from a fail-safe re-broadcast.
    bool recovered = false;
    std::uint64_t delivered = 0;  // envelopes handed to an active receiver
    std::uint64_t pending = 0;    // envelopes still in flight at epoch end
};

class MetricsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct AggregateMetrics {
    std::uint64_t epochs = 0;
    std::uint64_t successes = 0;
    std::uint64_t total_messages = 0;
    std::uint64_t total_delay = 0;  // over successful epochs
    std::uint64_t total_lost = 0;
    std::uint64_t total_delivered = 0;
    std::uint64_t total_failsafe = 0;
    std::uint64_t total_degree_queries = 0;
    std::uint64_t recovered = 0;        // successes delivered through fail-safe
    std::uint64_t recovered_delay = 0;  // delay sum over those

    double success_rate() const {
        return epochs == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(epochs);
    }

    /// Binomial standard error of success_rate.
    double success_stderr() const {
        if (epochs == 0) return 0.0;
        double r = success_rate();
        return std::sqrt(r * (1.0 - r) / static_cast<double>(epochs));
    }

    double avg_messages() const {
        return epochs == 0 ? 0.0
                           : static_cast<double>(total_messages) / static_cast<double>(epochs);
    }

    std::optional<double> avg_delay() const {
        if (successes == 0) return std::nullopt;
        return static_cast<double>(total_delay) / static_cast<double>(successes);
    }

    /// Mean delay over successes reached without any fail-safe help.
    std::optional<double> ideal_avg_delay() const {
        std::uint64_t n = successes - recovered;
        if (n == 0) return std::nullopt;
        return static_cast<double>(total_delay - recovered_delay) / static_cast<double>(n);
    }

    /// Fraction of resolved envelopes (delivered or dropped; not those still
    /// in flight when an epoch ended) lost because the receiver went offline.
    double loss_fraction() const {
        const std::uint64_t resolved = total_lost + total_delivered;
        return resolved == 0 ? 0.0
                             : static_cast<double>(total_lost) / static_cast<double>(resolved);
    }

    void add(const EpochRecord& r) {
        ++epochs;
        total_messages += r.messages_sent;
        total_lost += r.lost_to_churn;
        total_delivered += r.delivered;
        total_failsafe += r.failsafe_triggers;
        total_degree_queries += r.degree_queries;
        if (r.success) {
            ++successes;
            Timestep d = r.delay.value_or(0);
            total_delay += d;
            if (r.recovered) {
                ++recovered;
                recovered_delay += d;
            }
        }
    }

    void merge(const AggregateMetrics& o) {
        epochs += o.epochs;
        successes += o.successes;
        total_messages += o.total_messages;
        total_delay += o.total_delay;
        total_lost += o.total_lost;
        total_delivered += o.total_delivered;
        total_failsafe += o.total_failsafe;
        total_degree_queries += o.total_degree_queries;
        recovered += o.recovered;
        recovered_delay += o.recovered_delay;
    }

    friend bool operator==(const AggregateMetrics&, const AggregateMetrics&) = default;
};

inline AggregateMetrics aggregate(std::span<const EpochRecord> records) {
    AggregateMetrics m;
    for (const auto& r : records) m.add(r);
    return m;
}

/// Ratio of a protocol's mean delay to the broadcast baseline's.
inline double time_overhead(const AggregateMetrics& protocol,
                            const AggregateMetrics& broadcast_baseline) {
    auto num = protocol.avg_delay();
    auto den = broadcast_baseline.avg_delay();
    if (!num) throw MetricsError("protocol has no successful epochs");
    if (!den || *den <= 0.0) throw MetricsError("baseline delay undefined");
    return *num / *den;
}

/// Ratio of a protocol's mean message count to the broadcast baseline's.
inline double message_fraction(const AggregateMetrics& protocol,
                               const AggregateMetrics& broadcast_baseline) {
    double den = broadcast_baseline.avg_messages();
    if (den <= 0.0) throw MetricsError("baseline sends no messages");
    return protocol.avg_messages() / den;
}

}  // namespace gossipsim
