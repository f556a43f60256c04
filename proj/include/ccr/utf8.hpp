#pragma once

#include <string>
#include <string_view>

namespace ccr::utf8 {

/// Throws DecodeError on malformed input.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view text);

}  // namespace ccr::utf8
