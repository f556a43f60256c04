#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "ccr/kind.hpp"
#include "ccr/operation.hpp"

namespace ccr {

inline constexpr int kProtocolVersion = 1;

/// Suffix of the sender's cumulative patch. The receiver is assumed to hold
/// the first `prefix_len` operations already.
struct Increment {
    Kind kind;
    SiteId sender = 0;
    std::size_t prefix_len = 0;
    Patch ops;
};

/// Opens (or reopens) a session. `known_len` is how many of the receiver's
/// history operations the sender already holds.
struct Hello {
    SiteId site = 0;
    Kind kind;
    std::size_t known_len = 0;
};

/// Asks the peer for its entire cumulative patch.
struct Resync {};

struct Full {
    SiteId sender = 0;
    Patch ops;
};

struct Message {
    std::variant<Increment, Hello, Resync, Full> v;

    template <class T>
        requires(!std::is_same_v<std::remove_cvref_t<T>, Message>)
    Message(T alt) : v(std::move(alt))  // NOLINT: implicit by intent
    {
    }
    Message() = default;
};

bool operator==(const Message& a, const Message& b);

/// One newline-terminated line of compact JSON.
std::string encode_message(const Message& m);

/// Parses one line (trailing newline optional). Operation bodies are decoded
/// against `local_kind`; an increment tagged with another kind is rejected,
/// as is any version other than kProtocolVersion. Unknown fields are ignored.
Message decode_message(const Kind& local_kind, std::string_view line);

}  // namespace ccr
