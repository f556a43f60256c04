#pragma once

#include <functional>

#include "ccr/kind.hpp"
#include "ccr/operation.hpp"
#include "ccr/state.hpp"

namespace ccr {

/// `left` is the first argument rewritten to run after the second, `right` the
/// second rewritten to run after the first:
///   apply(apply(D, p), right) == apply(apply(D, q), left).
struct TransformResult {
    Patch left;
    Patch right;
};

/// Pairwise transform of two distinct operations issued against one state.
using PrimitiveTransform =
    std::function<TransformResult(const Kind&, const Operation&, const Operation&)>;

/// Concatenation. Throws CompositionError if p and q share a uid.
Patch compose(const Patch& p, const Patch& q);

void apply_patch_in_place(const Kind& kind, State& d, const Patch& p);
State apply_patch(const Kind& kind, State d, const Patch& p);

struct TransformOptions {
    /// Replay both inputs from `d` first so ill-formed patches fail with an
    /// ApplyError instead of producing garbage.
    bool validate = true;
    /// Overrides the catalog transform; used to test the property harness.
    const PrimitiveTransform* primitive = nullptr;
};

/// Patch-level transform: a grid sweep of every operation of p against every
/// operation of q. Operations sharing a uid cancel to the identity on both
/// sides (after checking their bodies agree).
TransformResult transform_patch(const Kind& kind, const State& d, const Patch& p, const Patch& q,
                                const TransformOptions& opts = {});

/// This site's representation of p # q: p followed by q rewritten after p.
Patch confluent_rep(const Kind& kind, const State& d, const Patch& p, const Patch& q,
                    const TransformOptions& opts = {});

/// Syntactic: true iff the patch holds no operations.
inline bool is_identity(const Patch& p) { return p.empty(); }

}  // namespace ccr
