#ifndef AUTHCLUST_TEXT_HPP
#define AUTHCLUST_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace authclust::text {

// Decodes UTF-8 into codepoints; malformed bytes become U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);

// Appends the UTF-8 encoding of cp to out.
void append_utf8(std::string& out, char32_t cp);

// Word characters are letters, decimal digits and combining marks in the
// scripts this tool targets (Latin, Greek, Cyrillic). Everything that is
// neither a word character nor whitespace is treated as punctuation/symbol.
bool is_word_char(char32_t cp);
bool is_whitespace(char32_t cp);

// Simple-case lowering for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic; other codepoints pass through unchanged.
char32_t to_lower(char32_t cp);

}  // namespace authclust::text

#endif
