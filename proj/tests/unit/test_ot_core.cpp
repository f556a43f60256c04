#include <random>

#include "ccr/errors.hpp"
#include "ccr/ot.hpp"
#include "ccr/props.hpp"
#include "ccr/sim.hpp"
#include "helpers.hpp"

using namespace testing;

TEST_CASE("compose concatenates and absorbs the identity")
{
    const Patch incr2{op(0, 0, Incr{2})};
    CHECK(structurally_equal(compose({}, incr2), incr2));
    CHECK(structurally_equal(compose(incr2, {}), incr2));

    const Patch a{op(0, 0, ins(0, "ab"))};
    const Patch b{op(0, 1, del(1, 1))};
    const Patch ab = compose(a, b);
    REQUIRE(ab.size() == 2);
    CHECK(same_operation(ab[0], a[0]));
    CHECK(same_operation(ab[1], b[0]));
}

TEST_CASE("compose rejects a shared uid")
{
    const Patch a{op(0, 0, Incr{1})};
    const Patch b{op(0, 0, Incr{5})};
    CHECK_THROWS_AS(compose(a, b), CompositionError);
}

TEST_CASE("compose is associative at the state level")
{
    // Oracle: the counter value is the plain sum of the increments.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> n(-9, 9), len(0, 4);
    std::uint64_t seq = 0;
    auto patch = [&] {
        Patch p;
        std::int64_t sum = 0;
        for (int i = len(rng); i > 0; --i) {
            const int v = n(rng);
            sum += v;
            p.push_back(op(0, seq++, Incr{v}));
        }
        return std::pair{p, sum};
    };
    for (int t = 0; t < 200; ++t) {
        const auto [a, sa] = patch();
        const auto [b, sb] = patch();
        const auto [c, sc] = patch();
        const State left = apply_patch(K("counter"), CounterState{}, compose(a, compose(b, c)));
        const State right = apply_patch(K("counter"), CounterState{}, compose(compose(a, b), c));
        CHECK(left == right);
        CHECK(left.as<CounterState>().value == sa + sb + sc);
    }
}

TEST_CASE("apply_patch folds left")
{
    CHECK(after("counter", CounterState{}, {op(0, 0, Incr{2}), op(0, 1, Incr{3})}) == "5");
    CHECK(after("text", text_state(""), {op(0, 0, ins(0, "ab")), op(0, 1, del(0, 1))}) == "\"b\"");
    const Patch readd{op(0, 0, SetAdd{"x"}), op(0, 1, SetRem{"x"}), op(0, 2, SetAdd{"x"})};
    CHECK(after("eset", ESetState{}, readd) == R"(["x"])");
}

TEST_CASE("apply errors name the operation and the state")
{
    const Patch bad{op(0, 0, ins(0, "ab")), op(4, 7, ins(9, "x"))};
    try {
        apply_patch(K("text"), text_state(""), bad);
        FAIL("expected ApplyError");
    } catch (const ApplyError& e) {
        const std::string what = e.what();
        CHECK(what.find("$4.7") != std::string::npos);
        CHECK(what.find("\"ab\"") != std::string::npos);
    }
}

TEST_CASE("transform against the identity leaves the other side alone")
{
    const Patch p{op(0, 0, ins(0, "x")), op(0, 1, del(0, 1))};
    const auto r = transform_patch(K("text"), text_state("abc"), p, {});
    CHECK(structurally_equal(r.left, p));
    CHECK(r.right.empty());
    const auto s = transform_patch(K("text"), text_state("abc"), {}, p);
    CHECK(s.left.empty());
    CHECK(structurally_equal(s.right, p));
}

TEST_CASE("transform of a patch against itself is the identity")
{
    const Patch p{op(0, 0, ins(1, "xy")), op(0, 1, del(0, 2)), op(0, 2, ins(0, "z"))};
    const auto r = transform_patch(K("text"), text_state("abc"), p, p);
    CHECK(is_identity(r.left));
    CHECK(is_identity(r.right));
}

TEST_CASE("copies of one uid with different bodies are inconsistent")
{
    const Patch p{op(0, 0, Incr{1})};
    const Patch q{op(0, 0, Incr{2})};
    CHECK_THROWS_AS(transform_patch(K("counter"), CounterState{}, p, q), InconsistencyError);
}

TEST_CASE("add against mult follows the semidirect rule")
{
    const Patch add{op(0, 0, AddBy{2})};
    const Patch mult{op(1, 0, MultBy{3})};
    const auto r = transform_patch(K("addmult"), AddMultState{1}, add, mult);
    REQUIRE(r.left.size() == 1);
    REQUIRE(r.right.size() == 1);
    CHECK(r.left[0].body.as<AddBy>().m == 6);
    CHECK(r.right[0].body.as<MultBy>().n == 3);
    // (1 + 2) * 3 == 1 * 3 + 6 == 9
    CHECK(after("addmult", AddMultState{1}, add, r.right) == "9");
    CHECK(after("addmult", AddMultState{1}, mult, r.left) == "9");
}

TEST_CASE("confluent_rep")
{
    const Patch p{op(0, 0, Incr{2})};
    const Patch q{op(1, 0, Incr{3})};
    CHECK(structurally_equal(confluent_rep(K("counter"), CounterState{}, p, {}), p));
    const Patch rep = confluent_rep(K("counter"), CounterState{}, p, q);
    REQUIRE(rep.size() == 2);
    CHECK(same_operation(rep[0], p[0]));
    CHECK(same_operation(rep[1], q[0]));
}

TEST_CASE("is_identity is syntactic")
{
    CHECK(is_identity({}));
    CHECK_FALSE(is_identity({op(0, 0, Incr{0})}));
}

TEST_CASE("confluent_rep commutes on random text patches")
{
    // Oracle: both representations applied to D give the same visible text.
    const Kind text = K("text");
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const PropertyCase pc = random_case(text, trial_seed(3, t));
        const Materialized m = materialize(text, pc);
        const auto pq = confluent_rep(text, m.d, m.p, m.q);
        const auto qp = confluent_rep(text, m.d, m.q, m.p);
        REQUIRE(state_digest(text, apply_patch(text, m.d, pq)) == state_digest(text, apply_patch(text, m.d, qp)));
    }
}

TEST_CASE("transform results keep the uids of their inputs")
{
    const Kind text = K("text");
    for (std::uint64_t t = 0; t < 300; ++t) {
        const Materialized m = materialize(text, random_case(text, trial_seed(5, t)));
        const auto r = transform_patch(text, m.d, m.p, m.q);
        for (const auto& o : r.left) CHECK(std::find(m.p.begin(), m.p.end(), o) != m.p.end());
        for (const auto& o : r.right) CHECK(std::find(m.q.begin(), m.q.end(), o) != m.q.end());
    }
}

TEST_CASE("a primitive that invents uids is rejected")
{
    const PrimitiveTransform rogue = [](const Kind&, const Operation& a, const Operation& b) {
        return TransformResult{{Operation{OpId{9, 9}, a.body}}, {b}};
    };
    TransformOptions opts;
    opts.primitive = &rogue;
    CHECK_THROWS_AS(transform_patch(K("counter"), CounterState{}, {op(0, 0, Incr{1})}, {op(1, 0, Incr{1})}, opts),
                    InconsistencyError);
}
