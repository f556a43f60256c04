#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ccr/operation.hpp"

namespace ccr {

struct CounterState {
    std::int64_t value = 0;
    bool operator==(const CounterState&) const = default;
};

struct AddMultState {
    BigInt value;
    bool operator==(const AddMultState&) const = default;
};

/// Every write that has not been superseded, keyed by the write's uid.
struct LwwState {
    std::map<OpId, std::string> candidates;
    bool operator==(const LwwState&) const = default;
};

struct ESetState {
    std::set<std::string> elements;
    bool operator==(const ESetState&) const = default;
};

struct QueueEntry {
    OpId uid;
    std::string item;
    bool operator==(const QueueEntry&) const = default;
};

/// `enq` only ever grows; the visible queue is `enq` minus entries in `deq`.
struct QueueState {
    std::vector<QueueEntry> enq;
    std::set<OpId> deq;
    bool operator==(const QueueState&) const = default;

    std::vector<std::string> visible() const;
};

struct TextCell {
    char32_t ch = 0;
    bool alive = true;
    bool operator==(const TextCell&) const = default;
};

/// Text with tombstones. Deleted characters stay in place, dead, so positions
/// carried by concurrent operations never collapse onto each other.
struct TextState {
    std::vector<TextCell> cells;
    bool operator==(const TextState&) const = default;

    std::u32string visible() const;
    std::size_t visible_size() const;
};

struct State;

struct TupleState {
    std::vector<State> items;
    bool operator==(const TupleState&) const;
};

struct MapState {
    std::map<std::string, State> entries;
    bool operator==(const MapState&) const;
};

struct State {
    std::variant<CounterState, AddMultState, LwwState, ESetState, QueueState, TextState,
                 TupleState, MapState>
        v;

    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, State>)
    State(T alt) : v(std::move(alt))  // NOLINT: implicit by intent
    {
    }
    State() = default;

    template <class T>
    T& as()
    {
        return std::get<T>(v);
    }
    template <class T>
    const T& as() const
    {
        return std::get<T>(v);
    }

    bool operator==(const State&) const = default;
};

}  // namespace ccr
