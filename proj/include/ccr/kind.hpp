#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ccr {

enum class KindTag { counter, addmult, lww, eset, queue, text, tuple, map };

/// Replica kind descriptor. Leaf kinds have no components; a tuple has one
/// component per slot and a map has exactly one (the value kind).
struct Kind {
    KindTag tag = KindTag::counter;
    std::vector<Kind> components;

    static Kind leaf(KindTag t) { return Kind{t, {}}; }
    static Kind tuple(std::vector<Kind> parts) { return Kind{KindTag::tuple, std::move(parts)}; }
    static Kind map(Kind value) { return Kind{KindTag::map, {std::move(value)}}; }

    /// tuple(lww, eset, counter, counter): message, comments, likes, dislikes.
    static Kind social_post();
    /// map of social posts keyed by post id.
    static Kind social_media();

    /// Accepts leaf names, `tuple(a,b,...)`, `map(k)` and the aliases
    /// `socialpost` / `socialmedia`. Throws KindError on anything else.
    static Kind parse(std::string_view text);

    /// Canonical expanded name, e.g. `map(tuple(lww,eset,counter,counter))`.
    std::string name() const;

    bool is_composite() const { return tag == KindTag::tuple || tag == KindTag::map; }
    const Kind& component(std::size_t i) const;

    bool operator==(const Kind&) const = default;
};

std::string_view tag_name(KindTag tag);

}  // namespace ccr
