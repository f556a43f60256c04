#include "ccr/props.hpp"

#include <algorithm>
#include <array>
#include <json.hpp>
#include <stdexcept>

#include "ccr/codec.hpp"
#include "ccr/errors.hpp"
#include "ccr/sim.hpp"

namespace ccr {
namespace {

constexpr SiteId kBaseSite = 3;

Patch issue(const Kind& kind, const State& from, const std::vector<Intent>& intents, SiteId site)
{
    State d = from;
    Patch out;
    std::uint64_t seq = 0;
    for (const auto& in : intents) {
        std::optional<Operation> op;
        try {
            op = gen_effective(kind, d, in, OpId{site, seq});
        } catch (const IntentError&) {
            continue;
        }
        if (!op) continue;
        apply_op(kind, d, *op);
        out.push_back(std::move(*op));
        ++seq;
    }
    return out;
}

std::vector<Intent> random_intents(const Kind& kind, Rng& rng, const State& from, std::size_t n)
{
    State d = from;
    std::vector<Intent> out;
    std::uint64_t seq = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto in = random_intent(kind, rng, d);
        if (!in) continue;
        if (auto op = gen_effective(kind, d, *in, OpId{99, seq++})) apply_op(kind, d, *op);
        out.push_back(std::move(*in));
    }
    return out;
}

std::string digest_after(const Kind& kind, const State& d, const Patch& a, const Patch& b = {})
{
    State s = d;
    apply_patch_in_place(kind, s, a);
    apply_patch_in_place(kind, s, b);
    return state_digest(kind, s);
}

std::string render(const Patch& p) { return codec::encode_patch(p).dump(); }

std::optional<std::string> check_case(const Kind& kind, Check c, const Materialized& m,
                                      const PrimitiveTransform* prim)
{
    TransformOptions opts;
    opts.primitive = prim;
    switch (c) {
    case Check::tp1: {
        const auto t = transform_patch(kind, m.d, m.p, m.q, opts);
        const auto via_p = digest_after(kind, m.d, m.p, t.right);
        const auto via_q = digest_after(kind, m.d, m.q, t.left);
        if (via_p == via_q) return std::nullopt;
        return "D.p.q' = " + via_p + " but D.q.p' = " + via_q;
    }
    case Check::sym: {
        const auto pq = transform_patch(kind, m.d, m.p, m.q, opts);
        const auto qp = transform_patch(kind, m.d, m.q, m.p, opts);
        if (structurally_equal(pq.left, qp.right) && structurally_equal(pq.right, qp.left))
            return std::nullopt;
        return "T(p,q) = (" + render(pq.left) + ", " + render(pq.right) + ") but T(q,p) = (" +
               render(qp.left) + ", " + render(qp.right) + ")";
    }
    case Check::idem: {
        const auto pp = transform_patch(kind, m.d, m.p, m.p, opts);
        if (pp.left.empty() && pp.right.empty()) return std::nullopt;
        return "T(p,p) = (" + render(pp.left) + ", " + render(pp.right) + ")";
    }
    case Check::comm: {
        const auto a = digest_after(kind, m.d, confluent_rep(kind, m.d, m.p, m.q, opts));
        const auto b = digest_after(kind, m.d, confluent_rep(kind, m.d, m.q, m.p, opts));
        if (a == b) return std::nullopt;
        return "D.(p#q) = " + a + " but D.(q#p) = " + b;
    }
    case Check::tp2: {
        const std::array<const Patch*, 3> ops{&m.p, &m.q, &m.r};
        static constexpr std::array<std::array<int, 3>, 6> orders{
            {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}, {1, 0, 2}, {2, 0, 1}, {2, 1, 0}}};
        static constexpr const char* names = "PQR";
        std::string first;
        std::string first_name;
        for (const auto& o : orders) {
            const Patch h1 = confluent_rep(kind, m.d, *ops[o[0]], *ops[o[1]], opts);
            const Patch h2 = confluent_rep(kind, m.d, h1, *ops[o[2]], opts);
            const auto dig = digest_after(kind, m.d, h2);
            const std::string name{names[o[0]], '>', names[o[1]], '>', names[o[2]]};
            if (first_name.empty()) {
                first = dig;
                first_name = name;
            } else if (dig != first) {
                return first_name + " gives " + first + " but " + name + " gives " + dig;
            }
        }
        return std::nullopt;
    }
    }
    return std::nullopt;
}

bool shorten_strings(Intent& in)
{
    return std::visit(
        [](auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, intent::Write> || std::is_same_v<T, intent::Ins>) {
                if (x.s.size() <= 1) return false;
                x.s.pop_back();
                return true;
            } else if constexpr (std::is_same_v<T, intent::Enq> || std::is_same_v<T, intent::SetAdd> ||
                                 std::is_same_v<T, intent::SetRem>) {
                if (x.x.size() <= 1) return false;
                x.x.pop_back();
                return true;
            } else if constexpr (std::is_same_v<T, intent::At> || std::is_same_v<T, intent::Upd>) {
                return shorten_strings(*x.inner);
            } else {
                return false;
            }
        },
        in.v);
}

}  // namespace

std::string_view check_name(Check c)
{
    switch (c) {
    case Check::tp1: return "tp1";
    case Check::tp2: return "tp2";
    case Check::sym: return "sym";
    case Check::idem: return "idem";
    case Check::comm: return "comm";
    }
    return "?";
}

std::set<Check> parse_checks(std::string_view name)
{
    if (name == "all") return PropertyOptions{}.checks;
    for (Check c : {Check::tp1, Check::tp2, Check::sym, Check::idem, Check::comm})
        if (name == check_name(c)) return {c};
    throw std::invalid_argument("unknown check '" + std::string(name) + "'");
}

Materialized materialize(const Kind& kind, const PropertyCase& c)
{
    Materialized m;
    const State init = initial(kind);
    m.base = issue(kind, init, c.base, kBaseSite);
    m.d = apply_patch(kind, init, m.base);
    m.p = issue(kind, m.d, c.p, 0);
    m.q = issue(kind, m.d, c.q, 1);
    m.r = issue(kind, m.d, c.r, 2);
    return m;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

PropertyCase random_case(const Kind& kind, std::uint64_t seed)
{
    Rng rng(seed);
    auto count = [&](int lo, int hi) {
        return static_cast<std::size_t>(std::uniform_int_distribution<int>(lo, hi)(rng));
    };
    PropertyCase c;
    const State init = initial(kind);
    c.base = random_intents(kind, rng, init, count(0, 8));
    const State d = apply_patch(kind, init, issue(kind, init, c.base, kBaseSite));
    c.p = random_intents(kind, rng, d, count(1, 4));
    c.q = random_intents(kind, rng, d, count(1, 4));
    c.r = random_intents(kind, rng, d, count(1, 4));
    return c;
}

std::optional<std::string> run_check(const Kind& kind, Check c, const PropertyCase& pc,
                                     const PrimitiveTransform* primitive)
{
    try {
        return check_case(kind, c, materialize(kind, pc), primitive);
    } catch (const Error& e) {
        return std::string("exception: ") + e.what();
    }
}

PropertyCase shrink_case(const Kind& kind, Check c, PropertyCase pc, const PrimitiveTransform* primitive)
{
    auto fails = [&](const PropertyCase& x) { return run_check(kind, c, x, primitive).has_value(); };
    if (!fails(pc)) return pc;

    const auto lists = [](PropertyCase& x) {
        return std::array<std::vector<Intent>*, 4>{&x.r, &x.q, &x.p, &x.base};
    };
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t li = 0; li < 4; ++li) {
            while (!lists(pc)[li]->empty()) {
                PropertyCase trial = pc;
                lists(trial)[li]->pop_back();
                if (!fails(trial)) break;
                pc = std::move(trial);
                progress = true;
            }
        }
    }
    for (std::size_t li = 0; li < 4; ++li) {
        for (std::size_t i = 0; i < lists(pc)[li]->size(); ++i) {
            for (;;) {
                PropertyCase trial = pc;
                if (!shorten_strings((*lists(trial)[li])[i]) || !fails(trial)) break;
                pc = std::move(trial);
            }
        }
    }
    if (!pc.r.empty()) {
        PropertyCase trial = pc;
        trial.r.clear();
        if (fails(trial)) pc = std::move(trial);
    }
    return pc;
}

PropertyReport check_properties(const Kind& kind, std::size_t trials, std::uint64_t seed,
                                const PropertyOptions& opts)
{
    PropertyReport report;
    report.kind = kind;
    report.trials = trials;
    report.seed = seed;
    for (Check c : opts.checks) report.stats[c];
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t ts = trial_seed(seed, i);
        const PropertyCase pc = random_case(kind, ts);
        for (Check c : opts.checks) {
            auto failure = run_check(kind, c, pc, opts.primitive);
            if (!failure) {
                ++report.stats[c].passed;
                continue;
            }
            ++report.stats[c].failed;
            if (report.first_failure) continue;
            Counterexample cx{c, ts, *failure, pc, pc};
            if (opts.shrink) {
                cx.shrunk = shrink_case(kind, c, pc, opts.primitive);
                cx.message = run_check(kind, c, cx.shrunk, opts.primitive).value_or(*failure);
            }
            report.first_failure = std::move(cx);
        }
    }
    return report;
}

bool PropertyReport::ok() const
{
    return std::all_of(stats.begin(), stats.end(), [](const auto& kv) { return kv.second.failed == 0; });
}

std::string PropertyReport::to_json() const
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["replica"] = kind.name();
    j["trials"] = trials;
    j["seed"] = seed;
    ordered_json checks = ordered_json::object();
    for (const auto& [c, s] : stats)
        checks[std::string(check_name(c))] = {{"passed", s.passed}, {"failed", s.failed}};
    j["checks"] = std::move(checks);
    j["ok"] = ok();
    if (first_failure) {
        const auto& cx = *first_failure;
        auto intents = [](const std::vector<Intent>& v) {
            ordered_json a = ordered_json::array();
            for (const auto& in : v) a.push_back(to_string(in));
            return a;
        };
        auto render_case = [&](const PropertyCase& c) {
            return ordered_json{{"base", intents(c.base)}, {"p", intents(c.p)}, {"q", intents(c.q)},
                                {"r", intents(c.r)}};
        };
        j["counterexample"] = {{"check", std::string(check_name(cx.check))},
                               {"trial_seed", cx.trial_seed},
                               {"message", cx.message},
                               {"original", render_case(cx.original)},
                               {"shrunk", render_case(cx.shrunk)}};
    }
    return j.dump();
}

PrimitiveTransform broken_text_tiebreak()
{
    return [](const Kind& kind, const Operation& a, const Operation& b) -> TransformResult {
        if (kind.tag == KindTag::text && a.body.is<Ins>() && b.body.is<Ins>()) {
            const auto& x = a.body.as<Ins>();
            const auto& y = b.body.as<Ins>();
            if (x.k == y.k) return {{a}, {Operation{b.uid, Ins{y.k + x.s.size(), y.s}}}};
        }
        return transform_prim(kind, a, b);
    };
}

}  // namespace ccr
