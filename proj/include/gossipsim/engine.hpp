// Time-stepped dissemination loop.
//
// One timestep t runs, in order:
//   1. departure notification (entries toward nodes that left at t-1 vanish)
//   2. delivery of every envelope sent at t-1; envelopes whose receiver is
//      offline are dropped and counted as lost to churn
//   3. forwarding decisions, each new envelope due at t+1
//   4. fail-safe timers
//   5. churn (deactivations, activations, reattachment), clock to t+1
// A receiver that goes offline in step 5 of the send timestep therefore
// misses the envelope, and its neighbors learn about it in step 1 of t+1.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "gossipsim/dynamics.hpp"
#include "gossipsim/metrics.hpp"
#include "gossipsim/protocol.hpp"
#include "gossipsim/rng.hpp"
#include "gossipsim/temporal_graph.hpp"
#include "gossipsim/types.hpp"

namespace gossipsim {

struct EngineParams {
    std::uint32_t ttl = 20;
    Timestep max_steps = 80;

    void validate() const {
        if (ttl < 1) throw InvalidArgument("ttl must be at least 1");
        if (max_steps < ttl) throw InvalidArgument("max_steps must be >= ttl");
    }
};

struct EngineCounters {
    std::uint64_t messages_sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost_to_churn = 0;
    std::uint64_t degree_queries = 0;
    std::uint64_t failsafe_triggers = 0;
};

struct StepReport {
    std::size_t delivered = 0;
    std::size_t duplicates = 0;
    std::size_t dropped = 0;
    std::size_t failsafe_fired = 0;
};

// Optional observers, used by the property tests.
struct EngineHooks {
    std::function<void(const MessageEnvelope&)> on_send;
    std::function<void(const MessageEnvelope&, bool duplicate)> on_deliver;
    std::function<void(const MessageEnvelope&)> on_drop;
    std::function<void(NodeId node, const MessageEnvelope& msg)> on_forward;
    std::function<void(Timestep finished)> on_step_end;
};

struct EpochEndpoints {
    NodeId applicant = kNoNode;
    NodeId holder = kNoNode;
};

class Simulation {
public:
    Simulation(TemporalGraph graph, ProtocolSpec spec, EngineParams params,
               DynamicsParams dynamics, std::uint64_t seed)
        : graph_(std::move(graph)),
          spec_(spec),
          params_(params),
          dynamics_(std::move(dynamics)),
          state_(graph_.node_count()),
          dynamics_rng_(make_rng(seed, Stream::Dynamics)),
          endpoint_rng_(make_rng(seed, Stream::Endpoints)),
          protocol_rng_(make_rng(seed, Stream::Protocol)) {
        spec_.validate();
        params_.validate();
        dynamics_.validate();
        base_pins_ = dynamics_.pinned;
    }

    const TemporalGraph& graph() const noexcept { return graph_; }
    TemporalGraph& graph() noexcept { return graph_; }
    const ProtocolSpec& spec() const noexcept { return spec_; }
    const EngineParams& params() const noexcept { return params_; }
    const DynamicsParams& dynamics() const noexcept { return dynamics_; }
    Timestep now() const noexcept { return graph_.timestep(); }
    const EngineCounters& counters() const noexcept { return counters_; }
    std::size_t in_flight() const noexcept { return next_.size(); }
    std::size_t pending_failsafe_timers() const noexcept { return timers_.size(); }
    bool epoch_open() const noexcept { return epoch_open_; }
    const NodeProtocolState& node_state(NodeId v) const { return state_[v]; }
    void set_hooks(EngineHooks hooks) { hooks_ = std::move(hooks); }

    /// Runs one epoch between uniformly chosen distinct active endpoints.
    EpochRecord run_epoch(EpochEndpoints* chosen = nullptr) {
        graph_.notify_departures();
        auto active = graph_.active_nodes();
        if (active.size() < 2) {
            // Degenerate: nothing to do this timestep except let churn act.
            finish_timestep();
            ++msg_counter_;
            return EpochRecord{};
        }
        std::vector<std::size_t> picks;
        sample_distinct(endpoint_rng_, active.size(), 2, picks);
        EpochEndpoints ends{active[picks[0]], active[picks[1]]};
        if (chosen) *chosen = ends;
        return run_epoch_between_notified(ends);
    }

    /// Runs one epoch between given active endpoints.
    EpochRecord run_epoch_between(NodeId applicant, NodeId holder) {
        graph_.notify_departures();
        if (applicant == holder || !graph_.is_active(applicant) || !graph_.is_active(holder))
            throw InvalidArgument("epoch endpoints must be distinct active nodes");
        return run_epoch_between_notified({applicant, holder});
    }

    /// Opens an epoch: applicant originates at the current timestep, which
    /// is then completed. Departure notification must already have run.
    void begin_epoch(EpochEndpoints ends) {
        epoch_open_ = true;
        ends_ = ends;
        msg_id_ = msg_counter_++;
        start_ = now();
        rec_ = EpochRecord{};
        dynamics_.pinned = base_pins_;
        dynamics_.pinned.push_back(ends.applicant);
        dynamics_.pinned.push_back(ends.holder);

        NodeProtocolState& ns = touch(ends.applicant);
        Forwarding fwd = origination_targets(spec_, ends.applicant, graph_, now(), protocol_rng_,
                                             scratch_);
        ns.mark_seen(msg_id_);
        if (fwd.phase == Phase::Fluff) ns.mark_fluff_seen(msg_id_);
        MessageEnvelope proto;
        proto.msg_id = msg_id_;
        proto.origin = ends.applicant;
        proto.target = ends.holder;
        proto.ttl_remaining = params_.ttl;
        send(ends.applicant, proto, fwd, false);
        if (fwd.phase == Phase::Stem && spec_.failsafe_enabled && !scratch_.empty()) {
            ns.record_stem_relay(msg_id_, now());
            timers_.push_back(ends.applicant);
        }
        finish_timestep();
    }

    /// Delivers everything due now, runs fail-safe timers and churn, and
    /// moves the clock forward by one.
    StepReport advance_timestep() {
        StepReport report;
        graph_.notify_departures();
        current_.swap(next_);
        next_.clear();
        const Timestep t = now();
        for (const MessageEnvelope& env : current_) deliver(env, t, report);
        current_.clear();
        run_failsafe(t, report);
        finish_timestep();
        return report;
    }

    /// Closes the open epoch and returns its record.
    EpochRecord end_epoch() {
        rec_.pending = next_.size();
        next_.clear();
        timers_.clear();
        for (NodeId v : touched_) state_[v].clear();
        touched_.clear();
        dynamics_.pinned = base_pins_;
        epoch_open_ = false;
        return rec_;
    }

    bool epoch_finished() const {
        if (rec_.success) return true;
        if (now() - start_ > params_.max_steps) return true;
        return next_.empty() && timers_.empty();
    }

private:
    EpochRecord run_epoch_between_notified(EpochEndpoints ends) {
        begin_epoch(ends);
        while (!epoch_finished()) advance_timestep();
        return end_epoch();
    }

    NodeProtocolState& touch(NodeId v) {
        NodeProtocolState& ns = state_[v];
        if (ns.seen.empty() && ns.stem_relayed.empty()) touched_.push_back(v);
        return ns;
    }

    void finish_timestep() {
        apply_churn(graph_, dynamics_, dynamics_rng_);
        if (hooks_.on_step_end) hooks_.on_step_end(now());
        graph_.advance_clock();
    }

    void send(NodeId from, const MessageEnvelope& parent, const Forwarding& fwd,
              bool via_failsafe) {
        MessageEnvelope env;
        env.msg_id = parent.msg_id;
        env.origin = parent.origin;
        env.target = parent.target;
        env.sender = from;
        env.ttl_remaining = parent.ttl_remaining - 1;
        env.stem_hops_remaining = fwd.stem_hops_remaining;
        env.deliver_at = now() + 1;
        env.phase = fwd.phase;
        env.via_failsafe = via_failsafe;
        for (NodeId to : scratch_) {
            env.receiver = to;
            next_.push_back(env);
            if (hooks_.on_send) hooks_.on_send(env);
        }
        counters_.messages_sent += scratch_.size();
        rec_.messages_sent += scratch_.size();
    }

    void deliver(const MessageEnvelope& env, Timestep t, StepReport& report) {
        const NodeId r = env.receiver;
        if (!graph_.is_active(r)) {
            ++report.dropped;
            ++counters_.lost_to_churn;
            ++rec_.lost_to_churn;
            if (hooks_.on_drop) hooks_.on_drop(env);
            return;
        }
        ++report.delivered;
        ++counters_.delivered;
        ++rec_.delivered;
        NodeProtocolState& ns = state_[r];
        if (ns.has_seen(env.msg_id)) {
            if (env.phase == Phase::Fluff) ns.mark_fluff_seen(env.msg_id);
            ++report.duplicates;
            if (hooks_.on_deliver) hooks_.on_deliver(env, true);
            return;
        }
        if (hooks_.on_deliver) hooks_.on_deliver(env, false);
        if (r == ends_.holder && !rec_.success) {
            rec_.success = true;
            rec_.delay = t - start_;
            rec_.recovered = env.via_failsafe;
        }
        touch(r);
        Forwarding fwd;
        scratch_.clear();
        if (env.ttl_remaining > 0) {
            if (hooks_.on_forward) hooks_.on_forward(r, env);
            fwd = forward_targets(spec_, r, env, graph_, ns, t, protocol_rng_, scratch_);
            counters_.degree_queries += fwd.degree_queries;
            rec_.degree_queries += fwd.degree_queries;
        }
        ns.mark_seen(env.msg_id);
        if (env.phase == Phase::Fluff) ns.mark_fluff_seen(env.msg_id);
        if (scratch_.empty()) return;
        send(r, env, fwd, env.via_failsafe);
        if (fwd.phase == Phase::Stem && spec_.failsafe_enabled) {
            ns.record_stem_relay(env.msg_id, t);
            timers_.push_back(r);
        }
    }

    void run_failsafe(Timestep t, StepReport& report) {
        if (timers_.empty()) return;
        const Timestep timeout = spec_.effective_failsafe_timeout();
        std::size_t kept = 0;
        for (std::size_t i = 0; i < timers_.size(); ++i) {
            NodeId v = timers_[i];
            NodeProtocolState& ns = state_[v];
            if (ns.has_seen_fluff(msg_id_) || !graph_.is_active(v)) continue;
            if (!failsafe_due(ns, msg_id_, t, timeout)) {
                timers_[kept++] = v;
                continue;
            }
            // Re-originate as a fluff broadcast with a fresh hop budget.
            auto nbrs = graph_.neighbors(v);
            scratch_.assign(nbrs.begin(), nbrs.end());
            ns.mark_fluff_seen(msg_id_);
            MessageEnvelope proto;
            proto.msg_id = msg_id_;
            proto.origin = ends_.applicant;
            proto.target = ends_.holder;
            proto.ttl_remaining = params_.ttl;
            send(v, proto, Forwarding{}, true);
            ++counters_.failsafe_triggers;
            ++rec_.failsafe_triggers;
            ++report.failsafe_fired;
        }
        timers_.resize(kept);
    }

    TemporalGraph graph_;
    ProtocolSpec spec_;
    EngineParams params_;
    DynamicsParams dynamics_;
    std::vector<NodeId> base_pins_;
    std::vector<NodeProtocolState> state_;
    Rng dynamics_rng_;
    Rng endpoint_rng_;
    Rng protocol_rng_;
    EngineHooks hooks_;
    EngineCounters counters_;

    std::vector<MessageEnvelope> current_;
    std::vector<MessageEnvelope> next_;
    std::vector<NodeId> scratch_;
    std::vector<NodeId> touched_;
    std::vector<NodeId> timers_;

    bool epoch_open_ = false;
    EpochEndpoints ends_;
    MessageId msg_id_ = 0;
    MessageId msg_counter_ = 0;
    Timestep start_ = 0;
    EpochRecord rec_;
};

/// CSV header for per-epoch records.
inline void write_epoch_csv_header(std::ostream& os) {
    os << "epoch_index,success,messages_sent,delay,lost_to_churn,failsafe_triggers\n";
}

inline void write_epoch_csv_row(std::ostream& os, std::uint64_t index, const EpochRecord& r) {
    os << index << ',' << (r.success ? 1 : 0) << ',' << r.messages_sent << ',';
    if (r.delay) os << *r.delay;
    os << ',' << r.lost_to_churn << ',' << r.failsafe_triggers << '\n';
}

/// Runs `epochs` consecutive epochs over one evolving overlay.
inline AggregateMetrics run_epochs(Simulation& sim, std::uint64_t epochs,
                                   const std::function<void(std::uint64_t, const EpochRecord&)>&
                                       on_record = {}) {
    AggregateMetrics m;
    for (std::uint64_t e = 0; e < epochs; ++e) {
        EpochRecord r = sim.run_epoch();
        m.add(r);
        if (on_record) on_record(e, r);
    }
    return m;
}

}  // namespace gossipsim
