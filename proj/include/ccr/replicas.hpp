#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ccr/kind.hpp"
#include "ccr/operation.hpp"
#include "ccr/ot.hpp"
#include "ccr/state.hpp"

namespace ccr {

struct Intent;

/// User requests, before effectiveness is decided against a state.
namespace intent {
struct Incr {
    std::int64_t n = 0;
    bool operator==(const Incr&) const = default;
};
struct Decr {
    std::int64_t n = 0;
    bool operator==(const Decr&) const = default;
};
struct Add {
    BigInt m;
    bool operator==(const Add&) const = default;
};
struct Mult {
    std::int64_t n = 1;
    bool operator==(const Mult&) const = default;
};
struct Write {
    std::string s;
    bool operator==(const Write&) const = default;
};
struct SetAdd {
    std::string x;
    bool operator==(const SetAdd&) const = default;
};
struct SetRem {
    std::string x;
    bool operator==(const SetRem&) const = default;
};
struct Enq {
    std::string x;
    bool operator==(const Enq&) const = default;
};
struct Deq {
    bool operator==(const Deq&) const = default;
};
/// Visible-text coordinates.
struct Ins {
    std::size_t k = 0;
    std::string s;
    bool operator==(const Ins&) const = default;
};
struct Del {
    std::size_t k = 0;
    std::size_t n = 0;
    bool operator==(const Del&) const = default;
};
struct At {
    std::size_t i = 0;
    Box<Intent> inner;
    bool operator==(const At&) const = default;
};
struct Upd {
    std::string key;
    Box<Intent> inner;
    bool operator==(const Upd&) const = default;
};
}  // namespace intent

struct Intent {
    std::variant<intent::Incr, intent::Decr, intent::Add, intent::Mult, intent::Write,
                 intent::SetAdd, intent::SetRem, intent::Enq, intent::Deq, intent::Ins,
                 intent::Del, intent::At, intent::Upd>
        v;

    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, Intent>)
    Intent(T alt) : v(std::move(alt))  // NOLINT: implicit by intent
    {
    }
    Intent() = default;

    bool operator==(const Intent&) const = default;
};

/// REPL-style rendering, e.g. `ins 0 "ab"` or `upd "p1" at 2 incr 1`.
std::string to_string(const Intent& in);

State initial(const Kind& kind);

/// Turns an intent into an operation with the given uid when it changes `d`;
/// returns nothing when it would not. Throws IntentError for malformed intents
/// (positions out of range, intent of the wrong kind).
std::optional<Operation> gen_effective(const Kind& kind, const State& d, const Intent& in,
                                       OpId uid);

/// Throws ApplyError (out of range, overflow, dangling target) or KindError.
void apply_op(const Kind& kind, State& d, const Operation& op);

/// Catalog transform for two operations with distinct uids issued against the
/// same state. Results hold at most one operation each. The transforms do not
/// need the state: text positions index tombstoned cells, queue positions index
/// the append-only enq list, everything else is position-free.
TransformResult transform_prim(const Kind& kind, const Operation& a, const Operation& b);

/// Canonical compact JSON rendering of the observable value: sets sorted,
/// map keys sorted, sequences in order. Text renders visible characters only.
std::string state_digest(const Kind& kind, const State& d);

/// Throws KindError unless the state's shape matches the kind.
void check_state_kind(const Kind& kind, const State& d);

}  // namespace ccr
