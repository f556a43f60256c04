#include <algorithm>

#include <json.hpp>

#include "ccr/errors.hpp"
#include "ccr/replicas.hpp"
#include "ccr/utf8.hpp"

namespace ccr {
namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

template <class Range>
std::string string_array(const Range& items)
{
    std::string out = "[";
    bool first = true;
    for (const auto& s : items) {
        if (!first) out += ',';
        first = false;
        out += quote(s);
    }
    return out + "]";
}

[[noreturn]] void shape_mismatch(const Kind& kind)
{
    throw KindError("state does not have the shape of " + kind.name());
}

}  // namespace

std::string to_string(const OpId& id)
{
    return "$" + std::to_string(id.site) + "." + std::to_string(id.seq);
}

std::vector<std::string> QueueState::visible() const
{
    std::vector<std::string> out;
    for (const auto& e : enq)
        if (!deq.count(e.uid)) out.push_back(e.item);
    return out;
}

std::u32string TextState::visible() const
{
    std::u32string out;
    for (const auto& c : cells)
        if (c.alive) out.push_back(c.ch);
    return out;
}

std::size_t TextState::visible_size() const
{
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const TextCell& c) { return c.alive; }));
}

bool TupleState::operator==(const TupleState& other) const { return items == other.items; }
bool MapState::operator==(const MapState& other) const { return entries == other.entries; }

State initial(const Kind& kind)
{
    switch (kind.tag) {
    case KindTag::counter: return CounterState{};
    case KindTag::addmult: return AddMultState{};
    case KindTag::lww: return LwwState{};
    case KindTag::eset: return ESetState{};
    case KindTag::queue: return QueueState{};
    case KindTag::text: return TextState{};
    case KindTag::tuple: {
        TupleState t;
        for (const auto& c : kind.components) t.items.push_back(initial(c));
        return t;
    }
    case KindTag::map: return MapState{};
    }
    shape_mismatch(kind);
}

void check_state_kind(const Kind& kind, const State& d)
{
    const bool ok = [&] {
        switch (kind.tag) {
        case KindTag::counter: return std::holds_alternative<CounterState>(d.v);
        case KindTag::addmult: return std::holds_alternative<AddMultState>(d.v);
        case KindTag::lww: return std::holds_alternative<LwwState>(d.v);
        case KindTag::eset: return std::holds_alternative<ESetState>(d.v);
        case KindTag::queue: return std::holds_alternative<QueueState>(d.v);
        case KindTag::text: return std::holds_alternative<TextState>(d.v);
        case KindTag::tuple: {
            const auto* t = std::get_if<TupleState>(&d.v);
            if (!t || t->items.size() != kind.components.size()) return false;
            for (std::size_t i = 0; i < t->items.size(); ++i)
                check_state_kind(kind.components[i], t->items[i]);
            return true;
        }
        case KindTag::map: {
            const auto* m = std::get_if<MapState>(&d.v);
            if (!m) return false;
            for (const auto& [key, value] : m->entries) check_state_kind(kind.component(0), value);
            return true;
        }
        }
        return false;
    }();
    if (!ok) shape_mismatch(kind);
}

std::string state_digest(const Kind& kind, const State& d)
{
    switch (kind.tag) {
    case KindTag::counter: return std::to_string(d.as<CounterState>().value);
    case KindTag::addmult: return d.as<AddMultState>().value.str();
    case KindTag::lww: {
        std::set<std::string> texts;
        for (const auto& [uid, text] : d.as<LwwState>().candidates) texts.insert(text);
        return string_array(texts);
    }
    case KindTag::eset: return string_array(d.as<ESetState>().elements);
    case KindTag::queue: return string_array(d.as<QueueState>().visible());
    case KindTag::text: return quote(utf8::encode(d.as<TextState>().visible()));
    case KindTag::tuple: {
        const auto& t = d.as<TupleState>();
        std::string out = "[";
        for (std::size_t i = 0; i < t.items.size(); ++i) {
            if (i) out += ',';
            out += state_digest(kind.component(i), t.items[i]);
        }
        return out + "]";
    }
    case KindTag::map: {
        std::string out = "{";
        bool first = true;
        for (const auto& [key, value] : d.as<MapState>().entries) {
            if (!first) out += ',';
            first = false;
            out += quote(key) + ":" + state_digest(kind.component(0), value);
        }
        return out + "}";
    }
    }
    shape_mismatch(kind);
}

}  // namespace ccr
