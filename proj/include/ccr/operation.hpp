#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/container/flat_set.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "ccr/box.hpp"

namespace ccr {

using BigInt = boost::multiprecision::cpp_int;
using SiteId = std::uint32_t;

/// Globally unique operation identity: issuing site plus per-site sequence.
struct OpId {
    SiteId site = 0;
    std::uint64_t seq = 0;

    auto operator<=>(const OpId&) const = default;
};

std::string to_string(const OpId& id);

// counter
struct Incr {
    std::int64_t n = 0;
    bool operator==(const Incr&) const = default;
};
struct Decr {
    std::int64_t n = 0;
    bool operator==(const Decr&) const = default;
};

// addmult. Add amounts grow under transformation, so they are unbounded.
struct AddBy {
    BigInt m;
    bool operator==(const AddBy&) const = default;
};
struct MultBy {
    std::int64_t n = 1;
    bool operator==(const MultBy&) const = default;
};

// lww: keep the candidates written by `keep`, then add this write.
struct WriteExcept {
    std::string text;
    boost::container::flat_set<OpId> keep;
    bool operator==(const WriteExcept&) const = default;
};

// eset
struct SetAdd {
    std::string elem;
    bool operator==(const SetAdd&) const = default;
};
struct SetRem {
    std::string elem;
    bool operator==(const SetRem&) const = default;
};

// queue
struct EnqAt {
    std::size_t k = 0;
    std::string item;
    bool operator==(const EnqAt&) const = default;
};
struct Deq {
    OpId target;
    bool operator==(const Deq&) const = default;
};

// text. Positions index the tombstoned cell sequence, not the visible text.
struct Ins {
    std::size_t k = 0;
    std::u32string s;
    bool operator==(const Ins&) const = default;
};

struct Span {
    std::size_t start = 0;
    std::size_t len = 0;
    std::size_t end() const { return start + len; }
    bool operator==(const Span&) const = default;
};

/// Marks cells dead. Ranges are sorted, disjoint, non-adjacent and non-empty.
struct Del {
    std::vector<Span> ranges;
    bool operator==(const Del&) const = default;
};

struct Body;

// tuple
struct At {
    std::size_t index = 0;
    Box<Body> inner;
    bool operator==(const At&) const = default;
};

// map
struct Upd {
    std::string key;
    Box<Body> inner;
    bool operator==(const Upd&) const = default;
};

struct Body {
    std::variant<Incr, Decr, AddBy, MultBy, WriteExcept, SetAdd, SetRem, EnqAt, Deq, Ins, Del, At,
                 Upd>
        v;

    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, Body>)
    Body(T alt) : v(std::move(alt))  // NOLINT: implicit by intent
    {
    }
    Body() = default;

    template <class T>
    bool is() const
    {
        return std::holds_alternative<T>(v);
    }
    template <class T>
    const T& as() const
    {
        return std::get<T>(v);
    }

    bool operator==(const Body&) const = default;
};

/// A uniquely identified update. Equality is identity: two operations are the
/// same operation iff their uids match, however far their parameters drifted
/// under transformation. Use same_operation() for structural comparison.
struct Operation {
    OpId uid;
    Body body;

    friend bool operator==(const Operation& a, const Operation& b) { return a.uid == b.uid; }
};

inline bool same_operation(const Operation& a, const Operation& b)
{
    return a.uid == b.uid && a.body == b.body;
}

/// Ordered operation sequence; the empty patch is the identity.
using Patch = std::vector<Operation>;

/// Equal length with pairwise equal uid and body.
bool structurally_equal(const Patch& a, const Patch& b);

}  // namespace ccr
