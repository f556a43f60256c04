#include "ccr/errors.hpp"
#include "ccr/replicas.hpp"
#include "text_model.hpp"

namespace ccr {
namespace {

TransformResult unchanged(const Operation& a, const Operation& b) { return {{a}, {b}}; }

TransformResult cancel_both() { return {}; }

[[noreturn]] void unreachable_pair(const Operation& a, const Operation& b, const char* why)
{
    throw InconsistencyError(std::string("unreachable pair ") + to_string(a.uid) + " / " +
                             to_string(b.uid) + ": " + why);
}

void require_kind(const Kind& kind, const Operation& op, bool ok)
{
    if (!ok) throw KindError("operation " + to_string(op.uid) + " is not a " + kind.name() + " operation");
}

// Two insertions into one sequence: the smaller position goes first, ties go
// to the smaller uid. The other side shifts by the first one's length.
bool inserted_first(std::size_t ka, const OpId& a, std::size_t kb, const OpId& b)
{
    return ka < kb || (ka == kb && a < b);
}

TransformResult counter_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b})
        require_kind(kind, *op, op->body.is<Incr>() || op->body.is<Decr>());
    return unchanged(a, b);
}

TransformResult addmult_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b})
        require_kind(kind, *op, op->body.is<AddBy>() || op->body.is<MultBy>());
    if (a.body.is<AddBy>() && b.body.is<MultBy>())
        return {{Operation{a.uid, AddBy{a.body.as<AddBy>().m * b.body.as<MultBy>().n}}}, {b}};
    if (a.body.is<MultBy>() && b.body.is<AddBy>())
        return {{a}, {Operation{b.uid, AddBy{b.body.as<AddBy>().m * a.body.as<MultBy>().n}}}};
    return unchanged(a, b);
}

TransformResult lww_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b}) require_kind(kind, *op, op->body.is<WriteExcept>());
    WriteExcept wa = a.body.as<WriteExcept>();
    WriteExcept wb = b.body.as<WriteExcept>();
    wa.keep.insert(b.uid);
    wb.keep.insert(a.uid);
    return {{Operation{a.uid, std::move(wa)}}, {Operation{b.uid, std::move(wb)}}};
}

TransformResult eset_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b})
        require_kind(kind, *op, op->body.is<SetAdd>() || op->body.is<SetRem>());
    const auto elem = [](const Operation& op) {
        return op.body.is<SetAdd>() ? op.body.as<SetAdd>().elem : op.body.as<SetRem>().elem;
    };
    if (elem(a) != elem(b)) return unchanged(a, b);
    if (a.body.is<SetAdd>() == b.body.is<SetAdd>()) return cancel_both();
    unreachable_pair(a, b, "add and remove of one element from one state");
}

TransformResult queue_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b})
        require_kind(kind, *op, op->body.is<EnqAt>() || op->body.is<Deq>());
    if (a.body.is<EnqAt>() && b.body.is<EnqAt>()) {
        EnqAt ea = a.body.as<EnqAt>();
        EnqAt eb = b.body.as<EnqAt>();
        if (inserted_first(ea.k, a.uid, eb.k, b.uid))
            ++eb.k;
        else
            ++ea.k;
        return {{Operation{a.uid, std::move(ea)}}, {Operation{b.uid, std::move(eb)}}};
    }
    if (a.body.is<Deq>() && b.body.is<Deq>() && a.body.as<Deq>().target == b.body.as<Deq>().target)
        return cancel_both();
    return unchanged(a, b);
}

Patch del_patch(const OpId& uid, std::vector<Span> ranges)
{
    if (ranges.empty()) return {};
    return {Operation{uid, Del{std::move(ranges)}}};
}

TransformResult text_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b})
        require_kind(kind, *op, op->body.is<Ins>() || op->body.is<Del>());
    if (a.body.is<Ins>() && b.body.is<Ins>()) {
        Ins ia = a.body.as<Ins>();
        Ins ib = b.body.as<Ins>();
        if (inserted_first(ia.k, a.uid, ib.k, b.uid))
            ib.k += ia.s.size();
        else
            ia.k += ib.s.size();
        return {{Operation{a.uid, std::move(ia)}}, {Operation{b.uid, std::move(ib)}}};
    }
    if (a.body.is<Ins>() && b.body.is<Del>()) {
        const auto& ins = a.body.as<Ins>();
        return {{a}, del_patch(b.uid, text_model::shift_for_insert(b.body.as<Del>().ranges, ins.k,
                                                                   ins.s.size()))};
    }
    if (a.body.is<Del>() && b.body.is<Ins>()) {
        const auto& ins = b.body.as<Ins>();
        return {del_patch(a.uid, text_model::shift_for_insert(a.body.as<Del>().ranges, ins.k,
                                                              ins.s.size())),
                {b}};
    }
    // Deletions leave cells in place, so only the overlap needs removing.
    const auto& ra = a.body.as<Del>().ranges;
    const auto& rb = b.body.as<Del>().ranges;
    return {del_patch(a.uid, text_model::subtract(ra, rb)), del_patch(b.uid, text_model::subtract(rb, ra))};
}

// Rewraps component-level results under the enclosing constructor.
template <class Wrap>
TransformResult rewrap(const TransformResult& inner, Wrap wrap)
{
    TransformResult out;
    for (const auto& op : inner.left) out.left.push_back(Operation{op.uid, wrap(op.body)});
    for (const auto& op : inner.right) out.right.push_back(Operation{op.uid, wrap(op.body)});
    return out;
}

TransformResult tuple_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b}) require_kind(kind, *op, op->body.is<At>());
    const auto& at_a = a.body.as<At>();
    const auto& at_b = b.body.as<At>();
    if (at_a.index != at_b.index) return unchanged(a, b);
    const std::size_t index = at_a.index;
    TransformResult inner = transform_prim(kind.component(index), Operation{a.uid, *at_a.inner},
                                           Operation{b.uid, *at_b.inner});
    return rewrap(inner, [index](const Body& body) { return Body{At{index, body}}; });
}

TransformResult map_pair(const Kind& kind, const Operation& a, const Operation& b)
{
    for (const auto* op : {&a, &b}) require_kind(kind, *op, op->body.is<Upd>());
    const auto& upd_a = a.body.as<Upd>();
    const auto& upd_b = b.body.as<Upd>();
    if (upd_a.key != upd_b.key) return unchanged(a, b);
    TransformResult inner = transform_prim(kind.component(0), Operation{a.uid, *upd_a.inner},
                                           Operation{b.uid, *upd_b.inner});
    return rewrap(inner, [&key = upd_a.key](const Body& body) { return Body{Upd{key, body}}; });
}

}  // namespace

TransformResult transform_prim(const Kind& kind, const Operation& a, const Operation& b)
{
    switch (kind.tag) {
    case KindTag::counter: return counter_pair(kind, a, b);
    case KindTag::addmult: return addmult_pair(kind, a, b);
    case KindTag::lww: return lww_pair(kind, a, b);
    case KindTag::eset: return eset_pair(kind, a, b);
    case KindTag::queue: return queue_pair(kind, a, b);
    case KindTag::text: return text_pair(kind, a, b);
    case KindTag::tuple: return tuple_pair(kind, a, b);
    case KindTag::map: return map_pair(kind, a, b);
    }
    throw KindError("unknown kind");
}

}  // namespace ccr
