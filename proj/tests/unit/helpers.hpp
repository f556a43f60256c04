#pragma once

#include <doctest.h>

#include "ccr/replicas.hpp"
#include "ccr/utf8.hpp"

namespace testing {

using namespace ccr;

inline Kind K(std::string_view name) { return Kind::parse(name); }

inline Operation op(SiteId site, std::uint64_t seq, Body body) { return Operation{OpId{site, seq}, std::move(body)}; }

inline Ins ins(std::size_t k, std::string_view s) { return Ins{k, utf8::decode(s)}; }
inline Del del(std::size_t start, std::size_t len) { return Del{{Span{start, len}}}; }

inline State text_state(std::string_view s)
{
    TextState t;
    for (char32_t c : utf8::decode(s)) t.cells.push_back({c, true});
    return t;
}

inline std::string digest(std::string_view kind, const State& d) { return state_digest(K(kind), d); }

inline std::string after(std::string_view kind, const State& d, const Patch& p, const Patch& q = {})
{
    return digest(kind, apply_patch(K(kind), apply_patch(K(kind), d, p), q));
}

}  // namespace testing
