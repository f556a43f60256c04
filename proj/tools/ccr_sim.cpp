// ccr-sim: seeded multi-site convergence fuzzing.
#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <json.hpp>

#include "ccr/codec.hpp"
#include "ccr/errors.hpp"
#include "ccr/sim.hpp"

namespace {

// "3" or "3-5"
std::pair<std::size_t, std::size_t> parse_range(const std::string& s)
{
    const auto dash = s.find('-');
    if (dash == std::string::npos) {
        const auto v = std::stoul(s);
        return {v, v};
    }
    return {std::stoul(s.substr(0, dash)), std::stoul(s.substr(dash + 1))};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic convergence fuzzing of the replication protocol"};
    std::string replica;
    std::string sites_arg = "3";
    std::size_t ops = 20;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::vector<std::string> topologies{"full"};
    ccr::SimConfig base;
    std::string report_path;
    app.add_option("--replica", replica, "replica kind")->required();
    app.add_option("--sites", sites_arg, "site count, or a range like 3-5 cycled across trials");
    app.add_option("--ops", ops, "updates per site");
    app.add_option("--trials", trials, "number of trials; trial i uses seed S+i");
    app.add_option("--seed", seed, "first seed");
    app.add_option("--topology", topologies, "full|ring|chain; several are cycled across trials")
        ->delimiter(',');
    app.add_flag("--reorder", base.reorder, "random per-message delays, no per-link FIFO");
    app.add_flag("--duplicate", base.duplicate, "deliver some messages twice");
    app.add_option("--delay-min", base.delay_min, "minimum delivery delay in ticks");
    app.add_option("--delay-max", base.delay_max, "maximum delivery delay in ticks");
    app.add_option("--max-events", base.max_events, "event budget per trial");
    app.add_flag("--count-bytes", base.count_bytes, "encode every message to count wire bytes");
    app.add_option("--report", report_path, "also write the JSON report to this file");
    CLI11_PARSE(app, argc, argv);

    std::vector<ccr::Topology> topo;
    std::pair<std::size_t, std::size_t> site_range;
    try {
        base.kind = ccr::Kind::parse(replica);
        for (const auto& t : topologies) topo.push_back(ccr::parse_topology(t));
        site_range = parse_range(sites_arg);
        if (site_range.first < 2 || site_range.second < site_range.first)
            throw std::invalid_argument("--sites needs at least 2 sites and lo <= hi");
    } catch (const std::exception& e) {
        std::cerr << "ccr-sim: " << e.what() << '\n';
        return 2;
    }
    base.ops_per_site = ops;

    using nlohmann::ordered_json;
    ordered_json failures = ordered_json::array();
    std::size_t converged = 0, total_messages = 0, max_messages = 0, max_inflight = 0, resyncs = 0;
    std::size_t bytes = 0, updates = 0;
    std::string last_digest;
    const auto start = std::chrono::steady_clock::now();
    const std::size_t span = site_range.second - site_range.first + 1;
    for (std::size_t i = 0; i < trials; ++i) {
        ccr::SimConfig cfg = base;
        cfg.seed = seed + i;
        cfg.sites = site_range.first + i % span;
        cfg.topology = topo[(i / span) % topo.size()];
        const ccr::TrialReport r = ccr::run_trial(cfg);
        total_messages += r.messages_sent;
        max_messages = std::max(max_messages, r.messages_sent);
        max_inflight = std::max(max_inflight, r.max_inflight);
        resyncs += r.resyncs;
        bytes += r.bytes_sent;
        updates += r.updates;
        if (r.converged) last_digest = r.final_digest;
        if (r.converged) {
            ++converged;
            continue;
        }
        ordered_json f{{"seed", cfg.seed},
                       {"sites", cfg.sites},
                       {"topology", std::string(ccr::topology_name(cfg.topology))},
                       {"terminated", r.terminated},
                       {"failure", r.failure},
                       {"site_digests", r.site_digests}};
        ordered_json hist = ordered_json::array();
        for (const auto& h : r.histories) hist.push_back(ccr::codec::encode_patch(h));
        f["histories"] = std::move(hist);
        failures.push_back(std::move(f));
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

    std::cout << base.kind.name() << ": " << converged << "/" << trials << " trials converged in " << ms
              << " ms; " << updates << " updates, " << total_messages << " messages (max " << max_messages << " per trial, "
              << resyncs << " resyncs), max in flight " << max_inflight << '\n';
    for (const auto& f : failures)
        std::cout << "  seed " << f["seed"] << ": " << f["failure"].get<std::string>() << '\n';

    ordered_json j{{"replica", base.kind.name()},
                   {"trials", trials},
                   {"seed", seed},
                   {"sites", sites_arg},
                   {"ops_per_site", ops},
                   {"reorder", base.reorder},
                   {"duplicate", base.duplicate},
                   {"converged", converged},
                   {"updates", updates},
                   {"messages_sent", total_messages},
                   {"max_messages_per_trial", max_messages},
                   {"max_inflight", max_inflight},
                   {"resyncs", resyncs},
                   {"elapsed_ms", ms},
                   {"failures", std::move(failures)}};
    if (base.count_bytes) j["bytes_sent"] = bytes;
    const std::string out = j.dump();
    std::cout << out << '\n';
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << out << '\n';
    }
    return converged == trials ? 0 : 1;
}
