#include <json.hpp>

#include "ccr/errors.hpp"
#include "ccr/replicas.hpp"
#include "ccr/utf8.hpp"
#include "text_model.hpp"

namespace ccr {
namespace {

[[noreturn]] void wrong_kind(const Kind& kind, const Intent& in)
{
    throw IntentError("'" + to_string(in) + "' is not a " + kind.name() + " update");
}

template <class T>
const T& intent_as(const Kind& kind, const Intent& in)
{
    const T* p = std::get_if<T>(&in.v);
    if (!p) wrong_kind(kind, in);
    return *p;
}

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

using Generated = std::optional<Operation>;

Generated make(OpId uid, Body body) { return Operation{uid, std::move(body)}; }

Generated counter_gen(const Kind& kind, const CounterState& s, const Intent& in, OpId uid)
{
    std::int64_t probe = 0;
    if (const auto* incr = std::get_if<intent::Incr>(&in.v)) {
        if (incr->n == 0) return std::nullopt;
        if (__builtin_add_overflow(s.value, incr->n, &probe)) throw IntentError("counter would overflow");
        return make(uid, Incr{incr->n});
    }
    const auto& decr = intent_as<intent::Decr>(kind, in);
    if (decr.n == 0) return std::nullopt;
    if (__builtin_sub_overflow(s.value, decr.n, &probe)) throw IntentError("counter would overflow");
    return make(uid, Decr{decr.n});
}

Generated addmult_gen(const Kind& kind, const Intent& in, OpId uid)
{
    if (const auto* add = std::get_if<intent::Add>(&in.v)) {
        if (add->m == 0) return std::nullopt;
        return make(uid, AddBy{add->m});
    }
    const auto& mult = intent_as<intent::Mult>(kind, in);
    if (mult.n == 1) return std::nullopt;
    return make(uid, MultBy{mult.n});
}

Generated eset_gen(const Kind& kind, const ESetState& s, const Intent& in, OpId uid)
{
    if (const auto* add = std::get_if<intent::SetAdd>(&in.v)) {
        if (s.elements.count(add->x)) return std::nullopt;
        return make(uid, SetAdd{add->x});
    }
    const auto& rem = intent_as<intent::SetRem>(kind, in);
    if (!s.elements.count(rem.x)) return std::nullopt;
    return make(uid, SetRem{rem.x});
}

Generated queue_gen(const Kind& kind, const QueueState& s, const Intent& in, OpId uid)
{
    if (const auto* enq = std::get_if<intent::Enq>(&in.v)) return make(uid, EnqAt{s.enq.size(), enq->x});
    intent_as<intent::Deq>(kind, in);
    for (const auto& e : s.enq)
        if (!s.deq.count(e.uid)) return make(uid, Deq{e.uid});
    return std::nullopt;
}

Generated text_gen(const Kind& kind, const TextState& s, const Intent& in, OpId uid)
{
    const std::size_t size = s.visible_size();
    if (const auto* ins = std::get_if<intent::Ins>(&in.v)) {
        if (ins->k > size)
            throw IntentError("insert position " + std::to_string(ins->k) + " out of range 0.." +
                              std::to_string(size));
        std::u32string chars;
        try {
            chars = utf8::decode(ins->s);
        } catch (const DecodeError& e) {
            throw IntentError(e.what());
        }
        if (chars.empty()) return std::nullopt;
        return make(uid, Ins{text_model::cell_for_insert(s, ins->k), std::move(chars)});
    }
    const auto& del = intent_as<intent::Del>(kind, in);
    if (del.k > size || del.n > size - del.k)
        throw IntentError("delete range " + std::to_string(del.k) + "+" + std::to_string(del.n) +
                          " out of range for length " + std::to_string(size));
    if (del.n == 0) return std::nullopt;
    return make(uid, Del{{text_model::cells_for_delete(s, del.k, del.n)}});
}

}  // namespace

std::optional<Operation> gen_effective(const Kind& kind, const State& d, const Intent& in, OpId uid)
{
    switch (kind.tag) {
    case KindTag::counter: return counter_gen(kind, d.as<CounterState>(), in, uid);
    case KindTag::addmult: return addmult_gen(kind, in, uid);
    case KindTag::lww: return make(uid, WriteExcept{intent_as<intent::Write>(kind, in).s, {}});
    case KindTag::eset: return eset_gen(kind, d.as<ESetState>(), in, uid);
    case KindTag::queue: return queue_gen(kind, d.as<QueueState>(), in, uid);
    case KindTag::text: return text_gen(kind, d.as<TextState>(), in, uid);
    case KindTag::tuple: {
        const auto& at = intent_as<intent::At>(kind, in);
        const auto& t = d.as<TupleState>();
        if (at.i >= t.items.size())
            throw IntentError("tuple index " + std::to_string(at.i) + " out of arity " +
                              std::to_string(t.items.size()));
        auto inner = gen_effective(kind.component(at.i), t.items[at.i], *at.inner, uid);
        if (!inner) return std::nullopt;
        return make(uid, At{at.i, std::move(inner->body)});
    }
    case KindTag::map: {
        const auto& upd = intent_as<intent::Upd>(kind, in);
        const auto& m = d.as<MapState>();
        const auto it = m.entries.find(upd.key);
        const State fresh = it == m.entries.end() ? initial(kind.component(0)) : State{};
        const State& current = it == m.entries.end() ? fresh : it->second;
        auto inner = gen_effective(kind.component(0), current, *upd.inner, uid);
        if (!inner) return std::nullopt;
        return make(uid, Upd{upd.key, std::move(inner->body)});
    }
    }
    wrong_kind(kind, in);
}

std::string to_string(const Intent& in)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, intent::Incr>) return "incr " + std::to_string(x.n);
            else if constexpr (std::is_same_v<T, intent::Decr>) return "decr " + std::to_string(x.n);
            else if constexpr (std::is_same_v<T, intent::Add>) return "add " + x.m.str();
            else if constexpr (std::is_same_v<T, intent::Mult>) return "mult " + std::to_string(x.n);
            else if constexpr (std::is_same_v<T, intent::Write>) return "write " + quote(x.s);
            else if constexpr (std::is_same_v<T, intent::SetAdd>) return "add " + quote(x.x);
            else if constexpr (std::is_same_v<T, intent::SetRem>) return "rem " + quote(x.x);
            else if constexpr (std::is_same_v<T, intent::Enq>) return "enq " + quote(x.x);
            else if constexpr (std::is_same_v<T, intent::Deq>) return "deq";
            else if constexpr (std::is_same_v<T, intent::Ins>)
                return "ins " + std::to_string(x.k) + " " + quote(x.s);
            else if constexpr (std::is_same_v<T, intent::Del>)
                return "del " + std::to_string(x.k) + " " + std::to_string(x.n);
            else if constexpr (std::is_same_v<T, intent::At>)
                return "at " + std::to_string(x.i) + " " + to_string(*x.inner);
            else
                return "upd " + quote(x.key) + " " + to_string(*x.inner);
        },
        in.v);
}

}  // namespace ccr
