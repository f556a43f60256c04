#include "ccr/errors.hpp"
#include "ccr/replicas.hpp"
#include "ccr/utf8.hpp"

namespace ccr {
namespace {

template <class T>
const T& body_as(const Kind& kind, const Operation& op)
{
    const T* b = std::get_if<T>(&op.body.v);
    if (!b) throw KindError("operation " + to_string(op.uid) + " is not a " + kind.name() + " operation");
    return *b;
}

template <class T>
T& state_as(const Kind& kind, State& d)
{
    T* s = std::get_if<T>(&d.v);
    if (!s) throw KindError("state is not a " + kind.name() + " state");
    return *s;
}

void apply_counter(const Kind& kind, CounterState& s, const Operation& op)
{
    std::int64_t out = 0;
    bool overflow = false;
    if (const auto* incr = std::get_if<Incr>(&op.body.v))
        overflow = __builtin_add_overflow(s.value, incr->n, &out);
    else
        overflow = __builtin_sub_overflow(s.value, body_as<Decr>(kind, op).n, &out);
    if (overflow) throw ApplyError("counter overflow");
    s.value = out;
}

void apply_addmult(const Kind& kind, AddMultState& s, const Operation& op)
{
    if (const auto* add = std::get_if<AddBy>(&op.body.v))
        s.value += add->m;
    else
        s.value *= body_as<MultBy>(kind, op).n;
}

void apply_lww(const Kind& kind, LwwState& s, const Operation& op)
{
    const auto& w = body_as<WriteExcept>(kind, op);
    std::erase_if(s.candidates, [&](const auto& entry) { return !w.keep.count(entry.first); });
    s.candidates[op.uid] = w.text;
}

void apply_eset(const Kind& kind, ESetState& s, const Operation& op)
{
    if (const auto* add = std::get_if<SetAdd>(&op.body.v))
        s.elements.insert(add->elem);
    else
        s.elements.erase(body_as<SetRem>(kind, op).elem);
}

void apply_queue(const Kind& kind, QueueState& s, const Operation& op)
{
    if (const auto* enq = std::get_if<EnqAt>(&op.body.v)) {
        if (enq->k > s.enq.size())
            throw ApplyError("enqueue position " + std::to_string(enq->k) + " beyond " +
                             std::to_string(s.enq.size()));
        s.enq.insert(s.enq.begin() + static_cast<std::ptrdiff_t>(enq->k), QueueEntry{op.uid, enq->item});
        return;
    }
    const auto& deq = body_as<Deq>(kind, op);
    const bool known = std::any_of(s.enq.begin(), s.enq.end(),
                                   [&](const QueueEntry& e) { return e.uid == deq.target; });
    if (!known) throw ApplyError("dequeue of unknown entry " + to_string(deq.target));
    s.deq.insert(deq.target);
}

void apply_text(const Kind& kind, TextState& s, const Operation& op)
{
    if (const auto* ins = std::get_if<Ins>(&op.body.v)) {
        if (ins->k > s.cells.size())
            throw ApplyError("insert position " + std::to_string(ins->k) + " beyond " +
                             std::to_string(s.cells.size()));
        std::vector<TextCell> fresh;
        fresh.reserve(ins->s.size());
        for (char32_t c : ins->s) fresh.push_back({c, true});
        s.cells.insert(s.cells.begin() + static_cast<std::ptrdiff_t>(ins->k), fresh.begin(), fresh.end());
        return;
    }
    const auto& del = body_as<Del>(kind, op);
    for (const auto& span : del.ranges) {
        if (span.end() > s.cells.size())
            throw ApplyError("delete range [" + std::to_string(span.start) + "," +
                             std::to_string(span.end()) + ") beyond " + std::to_string(s.cells.size()));
    }
    for (const auto& span : del.ranges)
        for (std::size_t i = span.start; i < span.end(); ++i) s.cells[i].alive = false;
}

}  // namespace

void apply_op(const Kind& kind, State& d, const Operation& op)
{
    switch (kind.tag) {
    case KindTag::counter: return apply_counter(kind, state_as<CounterState>(kind, d), op);
    case KindTag::addmult: return apply_addmult(kind, state_as<AddMultState>(kind, d), op);
    case KindTag::lww: return apply_lww(kind, state_as<LwwState>(kind, d), op);
    case KindTag::eset: return apply_eset(kind, state_as<ESetState>(kind, d), op);
    case KindTag::queue: return apply_queue(kind, state_as<QueueState>(kind, d), op);
    case KindTag::text: return apply_text(kind, state_as<TextState>(kind, d), op);
    case KindTag::tuple: {
        const auto& at = body_as<At>(kind, op);
        auto& t = state_as<TupleState>(kind, d);
        if (at.index >= t.items.size())
            throw ApplyError("tuple index " + std::to_string(at.index) + " out of arity " +
                             std::to_string(t.items.size()));
        return apply_op(kind.component(at.index), t.items[at.index], Operation{op.uid, *at.inner});
    }
    case KindTag::map: {
        const auto& upd = body_as<Upd>(kind, op);
        auto& m = state_as<MapState>(kind, d);
        auto it = m.entries.find(upd.key);
        if (it == m.entries.end()) it = m.entries.emplace(upd.key, initial(kind.component(0))).first;
        return apply_op(kind.component(0), it->second, Operation{op.uid, *upd.inner});
    }
    }
}

}  // namespace ccr
