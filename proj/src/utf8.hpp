#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace teachable::utf8 {

/// Decodes the code point starting at `pos` and advances `pos`. Invalid or
/// truncated sequences decode as the single byte value so that decoding is
/// total and byte-preserving.
char32_t next(std::string_view text, std::size_t& pos) noexcept;

void append(std::string& out, char32_t cp);

bool is_space(char32_t cp) noexcept;

/// Punctuation and symbols: ASCII non-alphanumerics plus the common Latin-1,
/// general-punctuation and CJK-symbol blocks.
bool is_punct(char32_t cp) noexcept;

/// Simple default lowercase mapping for the scripts listed in to_lower().
char32_t to_lower(char32_t cp) noexcept;

}  // namespace teachable::utf8
