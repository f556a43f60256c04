#include "text_model.hpp"

#include <algorithm>

namespace ccr::text_model {

std::vector<Span> normalize(std::vector<Span> spans)
{
    std::erase_if(spans, [](const Span& s) { return s.len == 0; });
    std::sort(spans.begin(), spans.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    std::vector<Span> out;
    for (const auto& s : spans) {
        if (!out.empty() && s.start <= out.back().end()) {
            const std::size_t end = std::max(out.back().end(), s.end());
            out.back().len = end - out.back().start;
        } else {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<Span> shift_for_insert(const std::vector<Span>& spans, std::size_t at, std::size_t len)
{
    std::vector<Span> out;
    out.reserve(spans.size() + 1);
    for (const auto& s : spans) {
        if (s.start >= at) {
            out.push_back({s.start + len, s.len});
        } else if (s.end() <= at) {
            out.push_back(s);
        } else {
            out.push_back({s.start, at - s.start});
            out.push_back({at + len, s.end() - at});
        }
    }
    return out;
}

std::vector<Span> subtract(const std::vector<Span>& a, const std::vector<Span>& b)
{
    std::vector<Span> out;
    std::size_t j = 0;
    for (const auto& s : a) {
        std::size_t cur = s.start;
        const std::size_t end = s.end();
        while (j < b.size() && b[j].end() <= cur) ++j;
        std::size_t k = j;
        while (cur < end) {
            if (k >= b.size() || b[k].start >= end) {
                out.push_back({cur, end - cur});
                break;
            }
            if (b[k].start > cur) out.push_back({cur, b[k].start - cur});
            cur = std::max(cur, b[k].end());
            ++k;
        }
    }
    return out;
}

std::size_t cell_for_insert(const TextState& t, std::size_t k)
{
    if (k == 0) return 0;
    std::size_t live = 0;
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        if (t.cells[i].alive && ++live == k) return i + 1;
    }
    return t.cells.size();
}

Span cells_for_delete(const TextState& t, std::size_t k, std::size_t n)
{
    std::size_t live = 0;
    std::size_t first = 0;
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        if (!t.cells[i].alive) continue;
        if (live == k) first = i;
        if (live == k + n - 1) return {first, i + 1 - first};
        ++live;
    }
    return {first, 0};
}

}  // namespace ccr::text_model
