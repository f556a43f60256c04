#include "ccr/sim.hpp"

#include <algorithm>
#include <stdexcept>

#include "ccr/errors.hpp"

namespace ccr {
namespace {

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::int64_t nonzero_digit(Rng& rng)
{
    const auto v = uniform(rng, 1, 9);
    return chance(rng, 0.5) ? v : -v;
}

std::string small_string(Rng& rng)
{
    static constexpr char alphabet[] = "abc";
    std::string s(static_cast<std::size_t>(uniform(rng, 1, 3)), 'a');
    for (auto& c : s) c = alphabet[uniform(rng, 0, 2)];
    return s;
}

const char* const kSetPool[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
const char* const kKeyPool[] = {"p0", "p1", "p2"};

}  // namespace

std::optional<Intent> random_intent(const Kind& kind, Rng& rng, const State& d)
{
    switch (kind.tag) {
    case KindTag::counter:
        if (chance(rng, 0.5)) return intent::Incr{nonzero_digit(rng)};
        return intent::Decr{nonzero_digit(rng)};
    case KindTag::addmult:
        if (chance(rng, 0.7)) return intent::Add{BigInt(nonzero_digit(rng))};
        return intent::Mult{uniform(rng, 2, 5)};
    case KindTag::lww: return intent::Write{small_string(rng)};
    case KindTag::eset: {
        std::string x = kSetPool[uniform(rng, 0, 7)];
        if (d.as<ESetState>().elements.count(x)) return intent::SetRem{std::move(x)};
        return intent::SetAdd{std::move(x)};
    }
    case KindTag::queue:
        if (!d.as<QueueState>().visible().empty() && chance(rng, 1.0 / 3.0)) return intent::Deq{};
        return intent::Enq{small_string(rng)};
    case KindTag::text: {
        const auto size = static_cast<std::int64_t>(d.as<TextState>().visible_size());
        if (size == 0 || chance(rng, 0.6))
            return intent::Ins{static_cast<std::size_t>(uniform(rng, 0, size)), small_string(rng)};
        const auto k = uniform(rng, 0, size - 1);
        const auto n = uniform(rng, 1, std::min<std::int64_t>(3, size - k));
        return intent::Del{static_cast<std::size_t>(k), static_cast<std::size_t>(n)};
    }
    case KindTag::tuple: {
        const auto i = static_cast<std::size_t>(
            uniform(rng, 0, static_cast<std::int64_t>(kind.components.size()) - 1));
        auto inner = random_intent(kind.components[i], rng, d.as<TupleState>().items[i]);
        if (!inner) return std::nullopt;
        return intent::At{i, std::move(*inner)};
    }
    case KindTag::map: {
        std::string key = kKeyPool[uniform(rng, 0, 2)];
        const auto& entries = d.as<MapState>().entries;
        const auto it = entries.find(key);
        auto inner = it == entries.end() ? random_intent(kind.component(0), rng, initial(kind.component(0)))
                                         : random_intent(kind.component(0), rng, it->second);
        if (!inner) return std::nullopt;
        return intent::Upd{std::move(key), std::move(*inner)};
    }
    }
    return std::nullopt;
}

std::string_view topology_name(Topology t)
{
    switch (t) {
    case Topology::full: return "full";
    case Topology::ring: return "ring";
    case Topology::chain: return "chain";
    }
    return "?";
}

Topology parse_topology(std::string_view name)
{
    if (name == "full") return Topology::full;
    if (name == "ring") return Topology::ring;
    if (name == "chain") return Topology::chain;
    throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

std::vector<std::pair<SiteId, SiteId>> topology_edges(Topology t, std::size_t sites)
{
    std::vector<std::pair<SiteId, SiteId>> edges;
    const auto n = static_cast<SiteId>(sites);
    if (t == Topology::full) {
        for (SiteId a = 0; a < n; ++a)
            for (SiteId b = a + 1; b < n; ++b) edges.emplace_back(a, b);
        return edges;
    }
    for (SiteId a = 0; a + 1 < n; ++a) edges.emplace_back(a, a + 1);
    if (t == Topology::ring && n > 2) edges.emplace_back(0, n - 1);
    return edges;
}

namespace {

struct InFlight {
    std::uint64_t at = 0;
    std::uint64_t order = 0;
    SiteId from = 0;
    SiteId to = 0;
    Message msg;
    bool copy = false;
};

class Network {
public:
    Network(const SimConfig& cfg, Rng& rng, TrialReport& report) : cfg_(cfg), rng_(rng), report_(report)
    {
        if (cfg.reorder && cfg.delay_min == 1 && cfg.delay_max == 1) {
            lo_ = 1;
            hi_ = 8;
        } else {
            lo_ = cfg.delay_min;
            hi_ = std::max(cfg.delay_min, cfg.delay_max);
        }
    }

    void send(std::uint64_t now, SiteId from, std::vector<Outgoing>&& out)
    {
        for (auto& o : out) {
            ++report_.messages_sent;
            if (std::holds_alternative<Resync>(o.msg.v)) ++report_.resyncs;
            if (cfg_.count_bytes) report_.bytes_sent += encode_message(o.msg).size();
            std::uint64_t at = now + delay();
            if (!cfg_.reorder) {
                // Per-link FIFO: never overtake an earlier message on the same link.
                auto& last = last_at_[{from, o.to}];
                at = std::max(at, last);
                last = at;
            }
            queue_.push_back({at, next_order_++, from, o.to, std::move(o.msg), false});
        }
        report_.max_inflight = std::max(report_.max_inflight, queue_.size());
    }

    bool empty() const { return queue_.empty(); }
    std::size_t size() const { return queue_.size(); }

    InFlight pop(std::uint64_t& now)
    {
        const auto it = std::min_element(queue_.begin(), queue_.end(), [](const auto& a, const auto& b) {
            return a.at != b.at ? a.at < b.at : a.order < b.order;
        });
        InFlight m = std::move(*it);
        queue_.erase(it);
        now = std::max(now, m.at);
        if (cfg_.duplicate && !m.copy && chance(rng_, cfg_.duplicate_rate)) {
            ++report_.duplicates;
            queue_.push_back({now + static_cast<std::uint64_t>(uniform(rng_, 1, 8)), next_order_++, m.from,
                              m.to, m.msg, true});
        }
        return m;
    }

private:
    std::uint64_t delay()
    {
        return static_cast<std::uint64_t>(
            uniform(rng_, static_cast<std::int64_t>(lo_), static_cast<std::int64_t>(hi_)));
    }

    const SimConfig& cfg_;
    Rng& rng_;
    TrialReport& report_;
    std::uint64_t lo_ = 1;
    std::uint64_t hi_ = 1;
    std::vector<InFlight> queue_;
    std::map<std::pair<SiteId, SiteId>, std::uint64_t> last_at_;
    std::uint64_t next_order_ = 0;
};

}  // namespace

TrialReport run_trial(const SimConfig& cfg)
{
    if (cfg.sites < 2) throw std::invalid_argument("a trial needs at least two sites");
    TrialReport report;
    report.seed = cfg.seed;
    Rng rng(cfg.seed);
    Network net(cfg, rng, report);

    std::vector<Site> sites;
    sites.reserve(cfg.sites);
    for (std::size_t i = 0; i < cfg.sites; ++i) sites.emplace_back(static_cast<SiteId>(i), cfg.kind);

    std::uint64_t now = 0;
    try {
        for (const auto& [a, b] : topology_edges(cfg.topology, cfg.sites)) {
            net.send(now, a, {{b, sites[a].connect(b)}});
            net.send(now, b, {{a, sites[b].connect(a)}});
        }

        std::vector<std::size_t> remaining(cfg.sites, cfg.ops_per_site);
        std::size_t pending = cfg.sites * cfg.ops_per_site;
        while (pending > 0 || !net.empty()) {
            if (++report.events > cfg.max_events) {
                report.terminated = false;
                report.failure = "event budget exhausted with " + std::to_string(net.size()) +
                                 " messages in flight";
                break;
            }
            if (pending > 0 && (net.empty() || chance(rng, 0.35))) {
                std::size_t pick = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(pending) - 1));
                std::size_t s = 0;
                while (pick >= remaining[s]) pick -= remaining[s++];
                --remaining[s];
                --pending;
                ++now;
                if (auto in = random_intent(cfg.kind, rng, sites[s].current())) {
                    UpdateResult r = sites[s].local_update(*in);
                    if (r.op) ++report.updates;
                    net.send(now, static_cast<SiteId>(s), std::move(r.out));
                }
                continue;
            }
            InFlight m = net.pop(now);
            net.send(now, m.to, sites[m.to].handle_message(m.from, m.msg));
        }
    } catch (const Error& e) {
        report.failure = e.what();
    }

    std::vector<const Site*> views;
    for (const auto& s : sites) views.push_back(&s);
    report.quiescent = report.failure.empty() && quiescent(views, net.size());
    for (const auto& s : sites) report.site_digests.push_back(s.digest());
    const bool equal = std::all_of(report.site_digests.begin(), report.site_digests.end(),
                                   [&](const std::string& d) { return d == report.site_digests.front(); });
    report.converged = report.failure.empty() && report.quiescent && equal;
    if (report.converged) {
        report.final_digest = report.site_digests.front();
    } else {
        if (report.failure.empty())
            report.failure = report.quiescent ? "replicas diverged" : "network drained but cursors lag";
        for (const auto& s : sites) report.histories.push_back(s.history());
    }
    return report;
}

}  // namespace ccr
