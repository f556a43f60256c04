#include "ccr/ot.hpp"

#include <set>

#include "ccr/errors.hpp"
#include "ccr/replicas.hpp"

namespace ccr {
namespace {

void append(Patch& into, Patch&& from)
{
    for (auto& op : from) into.push_back(std::move(op));
}

void check_uids(const Patch& produced, const OpId& expected)
{
    for (const auto& op : produced)
        if (op.uid != expected)
            throw InconsistencyError("transform produced " + to_string(op.uid) + " from " +
                                     to_string(expected));
}

TransformResult transform_pair(const Kind& kind, const Operation& a, const Operation& b,
                               const PrimitiveTransform* prim)
{
    if (a.uid == b.uid) {
        if (!(a.body == b.body))
            throw InconsistencyError("copies of " + to_string(a.uid) +
                                     " disagree after transformation");
        return {};
    }
    TransformResult r = prim ? (*prim)(kind, a, b) : transform_prim(kind, a, b);
    check_uids(r.left, a.uid);
    check_uids(r.right, b.uid);
    return r;
}

// Row by row: each operation of p is carried across every (already
// transformed) column of q. Cells normally hold a single operation; when a
// primitive yields several, the cell recurses.
TransformResult sweep(const Kind& kind, const Patch& p, const Patch& q,
                      const PrimitiveTransform* prim)
{
    if (p.empty() || q.empty()) return {p, q};
    if (p.size() == 1 && q.size() == 1) return transform_pair(kind, p.front(), q.front(), prim);

    std::vector<Patch> columns;
    columns.reserve(q.size());
    for (const auto& op : q) columns.push_back(Patch{op});

    TransformResult out;
    for (const auto& op : p) {
        Patch head{op};
        for (auto& column : columns) {
            if (head.empty()) break;
            if (column.empty()) continue;
            TransformResult cell = sweep(kind, head, column, prim);
            head = std::move(cell.left);
            column = std::move(cell.right);
        }
        append(out.left, std::move(head));
    }
    for (auto& column : columns) append(out.right, std::move(column));
    return out;
}

}  // namespace

bool structurally_equal(const Patch& a, const Patch& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_operation(a[i], b[i])) return false;
    return true;
}

Patch compose(const Patch& p, const Patch& q)
{
    if (p.empty()) return q;
    if (q.empty()) return p;
    std::set<OpId> seen;
    for (const auto& op : p) seen.insert(op.uid);
    for (const auto& op : q)
        if (seen.count(op.uid))
            throw CompositionError("cannot compose: " + to_string(op.uid) + " occurs in both patches");
    Patch out;
    out.reserve(p.size() + q.size());
    out.insert(out.end(), p.begin(), p.end());
    out.insert(out.end(), q.begin(), q.end());
    return out;
}

void apply_patch_in_place(const Kind& kind, State& d, const Patch& p)
{
    for (const auto& op : p) {
        try {
            apply_op(kind, d, op);
        } catch (const ApplyError& e) {
            throw ApplyError(std::string(e.what()) + " [op " + to_string(op.uid) + " on state " +
                             state_digest(kind, d) + "]");
        }
    }
}

State apply_patch(const Kind& kind, State d, const Patch& p)
{
    apply_patch_in_place(kind, d, p);
    return d;
}

TransformResult transform_patch(const Kind& kind, const State& d, const Patch& p, const Patch& q,
                                const TransformOptions& opts)
{
    if (opts.validate) {
        apply_patch(kind, d, p);
        apply_patch(kind, d, q);
    }
    return sweep(kind, p, q, opts.primitive);
}

Patch confluent_rep(const Kind& kind, const State& d, const Patch& p, const Patch& q,
                    const TransformOptions& opts)
{
    TransformResult r = transform_patch(kind, d, p, q, opts);
    return compose(p, r.right);
}

}  // namespace ccr
