#pragma once

// Span arithmetic over the tombstoned text model. Internal to the library.

#include <vector>

#include "ccr/operation.hpp"
#include "ccr/state.hpp"

namespace ccr::text_model {

/// Sorts, merges overlapping or touching spans, drops empty ones.
std::vector<Span> normalize(std::vector<Span> spans);

/// Spans as seen after `len` cells are inserted at cell position `at`. A span
/// straddling `at` is split around the inserted cells.
std::vector<Span> shift_for_insert(const std::vector<Span>& spans, std::size_t at, std::size_t len);

/// a minus b; both normalized.
std::vector<Span> subtract(const std::vector<Span>& a, const std::vector<Span>& b);

/// Cell index at which an insertion at visible offset `k` lands: right after
/// the k-th live character (0 for k == 0).
std::size_t cell_for_insert(const TextState& t, std::size_t k);

/// Cell span covering visible characters [k, k + n). Requires n > 0 and
/// k + n <= visible size.
Span cells_for_delete(const TextState& t, std::size_t k, std::size_t n);

}  // namespace ccr::text_model
