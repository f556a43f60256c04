#include <deque>

#include "ccr/errors.hpp"
#include "ccr/protocol.hpp"
#include "helpers.hpp"

using namespace testing;

namespace {

struct Wire {
    SiteId from;
    SiteId to;
    Message msg;
};

// In-order network over a handful of sites.
struct Net {
    std::vector<Site> sites;
    std::deque<Wire> q;

    Net(std::size_t n, std::string_view kind)
    {
        for (std::size_t i = 0; i < n; ++i) sites.emplace_back(static_cast<SiteId>(i), K(kind));
    }
    void post(SiteId from, std::vector<Outgoing> out)
    {
        for (auto& o : out) q.push_back({from, o.to, std::move(o.msg)});
    }
    void link(SiteId a, SiteId b)
    {
        q.push_back({a, b, sites[a].connect(b)});
        q.push_back({b, a, sites[b].connect(a)});
    }
    void update(SiteId s, Intent in) { post(s, sites[s].local_update(in).out); }
    void step()
    {
        Wire w = std::move(q.front());
        q.pop_front();
        post(w.to, sites[w.to].handle_message(w.from, w.msg));
    }
    void drain()
    {
        for (int guard = 0; !q.empty(); ++guard) {
            REQUIRE(guard < 10000);
            step();
        }
    }
    bool settled() const
    {
        std::vector<const Site*> v;
        for (const auto& s : sites) v.push_back(&s);
        return quiescent(v, q.size());
    }
};

const Increment& as_inc(const Message& m) { return std::get<Increment>(m.v); }

}  // namespace

TEST_CASE("ineffective updates change nothing and send nothing")
{
    Net net(2, "eset");
    net.link(0, 1);
    net.drain();
    net.update(0, intent::SetAdd{"x"});
    net.drain();
    const auto before = net.sites[0].history().size();
    const UpdateResult r = net.sites[0].local_update(intent::SetAdd{"x"});
    CHECK_FALSE(r.op);
    CHECK(r.out.empty());
    CHECK(net.sites[0].history().size() == before);
}

TEST_CASE("first update sends the whole history, the next only the suffix")
{
    Net net(2, "counter");
    net.link(0, 1);
    net.drain();
    UpdateResult r = net.sites[0].local_update(intent::Incr{1});
    REQUIRE(r.out.size() == 1);
    CHECK(r.out[0].to == 1);
    CHECK(as_inc(r.out[0].msg).prefix_len == 0);
    CHECK(as_inc(r.out[0].msg).ops.size() == 1);
    r = net.sites[0].local_update(intent::Incr{2});
    REQUIRE(r.out.size() == 1);
    CHECK(as_inc(r.out[0].msg).prefix_len == 1);
    CHECK(as_inc(r.out[0].msg).ops.size() == 1);
}

TEST_CASE("make_increment")
{
    Site s(0, K("counter"));
    CHECK_THROWS_AS(s.make_increment(1), ProtocolError);
    s.connect(1);
    s.handle_message(1, Hello{1, K("counter"), 0});
    CHECK_FALSE(s.make_increment(1));
    for (int i = 0; i < 3; ++i) s.local_update(intent::Incr{1});
    CHECK_FALSE(s.make_increment(1));  // already broadcast
    s.local_update(intent::Incr{1});
    s.local_update(intent::Incr{1});
    // Rewind the peer's view to 3 of 5 operations.
    s.handle_message(1, Hello{1, K("counter"), 3});
    // The hello answer already carried the suffix.
    CHECK_FALSE(s.make_increment(1));
    s.connect(1);
    const auto out = s.handle_message(1, Hello{1, K("counter"), 3});
    REQUIRE(out.size() == 1);
    CHECK(as_inc(out[0].msg).prefix_len == 3);
    CHECK(as_inc(out[0].msg).ops.size() == 2);
}

TEST_CASE("an already integrated patch terminates")
{
    Net net(2, "text");
    net.link(0, 1);
    net.drain();
    net.update(0, intent::Ins{0, "ab"});
    net.drain();
    const Patch h = net.sites[1].history();
    // Replaying site 0's full history at site 1 changes nothing.
    const auto out = net.sites[1].handle_message(0, Full{0, net.sites[0].history()});
    CHECK(out.empty());
    CHECK(structurally_equal(net.sites[1].history(), h));
}

TEST_CASE("integration appends the transformed remote patch")
{
    Site q(1, K("text"));
    q.connect(0);
    q.handle_message(0, Hello{0, K("text"), 0});
    q.local_update(intent::Ins{0, "q"});
    const Operation p = op(0, 0, ins(0, "p"));
    const auto out = q.handle_message(0, Increment{K("text"), 0, 0, {p}});
    REQUIRE(q.history().size() == 2);
    CHECK(q.history()[0].uid == OpId{1, 0});
    CHECK(q.history()[1].uid == OpId{0, 0});
    CHECK(q.digest() == "\"pq\"");
    // The echo to the sender carries just the integrated operation.
    REQUIRE(out.size() == 1);
    CHECK(as_inc(out[0].msg).prefix_len == 1);
    CHECK(as_inc(out[0].msg).ops.size() == 1);
    CHECK(q.peer(0)->recv_len() == 1);
}

TEST_CASE("prefix mismatch asks for a resync")
{
    Site s(0, K("counter"));
    s.connect(1);
    const auto out = s.handle_message(1, Increment{K("counter"), 1, 2, {op(1, 2, Incr{1})}});
    REQUIRE(out.size() == 1);
    CHECK(std::holds_alternative<Resync>(out[0].msg.v));
    CHECK(s.history().empty());
    CHECK(s.peer(1)->recv_len() == 0);

    Site t(1, K("counter"));
    t.connect(0);
    t.local_update(intent::Incr{4});
    const auto full = t.handle_message(0, Resync{});
    REQUIRE(full.size() == 1);
    CHECK(std::get<Full>(full[0].msg.v).ops.size() == 1);
}

TEST_CASE("stale and duplicate fulls are ignored")
{
    Site s(0, K("counter"));
    s.connect(1);
    s.handle_message(1, Hello{1, K("counter"), 0});
    const Patch h{op(1, 0, Incr{1}), op(1, 1, Incr{2})};
    s.handle_message(1, Full{1, h});
    CHECK(s.digest() == "3");
    CHECK(s.handle_message(1, Full{1, {h[0]}}).empty());
    CHECK(s.handle_message(1, Full{1, h}).empty());
    CHECK(s.digest() == "3");
    CHECK(s.peer(1)->recv_len() == 2);
}

TEST_CASE("protocol errors")
{
    Site s(0, K("counter"));
    CHECK_THROWS_AS(s.handle_message(3, Increment{K("counter"), 3, 0, {}}), ProtocolError);
    s.connect(1);
    CHECK_THROWS_AS(s.handle_message(1, Hello{1, K("text"), 0}), ProtocolError);
    CHECK_THROWS_AS(s.handle_message(1, Increment{K("text"), 1, 0, {}}), ProtocolError);
    CHECK_THROWS_AS(s.connect(0), ProtocolError);
    CHECK_FALSE(s.faulted());
}

TEST_CASE("a failed integration faults the site")
{
    Site s(0, K("text"));
    s.connect(1);
    s.handle_message(1, Hello{1, K("text"), 0});
    CHECK_THROWS_AS(s.handle_message(1, Increment{K("text"), 1, 0, {op(1, 0, ins(7, "x"))}}), FaultError);
    CHECK(s.faulted());
    CHECK_THROWS_AS(s.local_update(intent::Ins{0, "a"}), FaultError);
    CHECK_THROWS_AS(s.handle_message(1, Resync{}), FaultError);
}

TEST_CASE("three-site trace: increments carry only what the receiver lacks")
{
    Net net(3, "text");
    net.link(0, 1);
    net.link(1, 2);
    net.link(0, 2);
    net.drain();
    CHECK(net.settled());
    net.update(0, intent::Ins{0, "a"});
    net.update(0, intent::Ins{1, "b"});
    net.drain();
    net.update(1, intent::Ins{0, "x"});
    // Before delivery, site 1 has sent one op to each of its peers.
    for (const auto& w : net.q) CHECK(as_inc(w.msg).ops.size() == 1);
    net.drain();
    CHECK(net.settled());
    for (const auto& s : net.sites) CHECK(s.digest() == "\"xab\"");
}

TEST_CASE("quiescence")
{
    Net net(3, "counter");
    CHECK(net.settled());
    net.link(0, 1);
    CHECK_FALSE(net.settled());
    net.drain();
    CHECK(net.settled());
    net.update(0, intent::Incr{1});
    CHECK_FALSE(net.settled());
    net.drain();
    CHECK(net.settled());
}

TEST_CASE("safety: current is always base plus history")
{
    Net net(3, "queue");
    net.link(0, 1);
    net.link(1, 2);
    net.drain();
    std::size_t i = 0;
    for (const char* x : {"a", "b", "c", "d"}) {
        net.update(static_cast<SiteId>(i++ % 3), intent::Enq{x});
        net.update(static_cast<SiteId>(i % 3), intent::Deq{});
        while (!net.q.empty()) {
            net.step();
            for (const auto& s : net.sites)
                REQUIRE(state_digest(s.kind(), apply_patch(s.kind(), s.base(), s.history())) == s.digest());
        }
    }
    CHECK(net.settled());
}

TEST_CASE("a restarted site reconverges and keeps its uids unique")
{
    Net net(2, "counter");
    net.link(0, 1);
    net.drain();
    net.update(0, intent::Incr{1});
    net.update(1, intent::Incr{10});
    net.drain();
    REQUIRE(net.sites[0].digest() == "11");

    net.sites[0].disconnect(1);
    net.sites[1] = Site(1, K("counter"));  // lost everything
    net.link(0, 1);
    net.drain();
    CHECK(net.sites[1].digest() == "11");
    CHECK(net.sites[1].next_seq() == 1);
    net.update(1, intent::Incr{100});
    net.drain();
    CHECK(net.sites[0].digest() == "111");
    CHECK(net.sites[1].digest() == "111");
    CHECK(net.settled());
}
