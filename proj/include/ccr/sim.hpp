#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ccr/protocol.hpp"

namespace ccr {

using Rng = std::mt19937_64;

/// A random intent that is effective on `d`, or nothing when the kind has
/// none to offer. Text positions are uniform over the visible text, strings
/// are 1-3 letters from "abc", set elements come from an 8-symbol pool,
/// numbers from [-9,9] minus 0 (multipliers from [2,5]), queues enqueue
/// twice as often as they dequeue and maps draw keys from p0..p2.
std::optional<Intent> random_intent(const Kind& kind, Rng& rng, const State& d);

enum class Topology { full, ring, chain };

std::string_view topology_name(Topology t);
/// Throws std::invalid_argument.
Topology parse_topology(std::string_view name);

struct SimConfig {
    Kind kind;
    std::size_t sites = 3;
    std::size_t ops_per_site = 5;
    std::uint64_t seed = 0;
    Topology topology = Topology::full;
    bool reorder = false;
    bool duplicate = false;
    /// Per-message delivery delay in ticks. With reorder and the default
    /// range, delays are drawn from [1, 8] instead.
    std::uint64_t delay_min = 1;
    std::uint64_t delay_max = 1;
    double duplicate_rate = 0.1;
    std::size_t max_events = 1'000'000;
    /// Encode every message to count wire bytes (slower).
    bool count_bytes = false;
};

struct TrialReport {
    std::uint64_t seed = 0;
    bool converged = false;
    /// False when the event budget ran out before the network drained.
    bool terminated = true;
    bool quiescent = false;
    std::string failure;
    std::string final_digest;
    std::size_t updates = 0;
    std::size_t messages_sent = 0;
    std::size_t resyncs = 0;
    std::size_t duplicates = 0;
    std::size_t bytes_sent = 0;
    std::size_t max_inflight = 0;
    std::size_t events = 0;
    /// Per-site digests and histories; histories only when not converged.
    std::vector<std::string> site_digests;
    std::vector<Patch> histories;
};

/// Deterministic: the same config always yields the same report.
TrialReport run_trial(const SimConfig& cfg);

/// Pairs of sites linked by the topology, each pair once with a < b.
std::vector<std::pair<SiteId, SiteId>> topology_edges(Topology t, std::size_t sites);

}  // namespace ccr
