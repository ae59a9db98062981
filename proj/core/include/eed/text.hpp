#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eed {

/// Canonical form used for all mention matching and entity identity:
/// Unicode NFKC normalization combined with full case folding (NFKC_Casefold).
std::string canonicalize(std::string_view s);

/// Canonicalizes every token of a sequence.
std::vector<std::string> canonical_tokens(std::span<const std::string> tokens);

/// Splits a surface string on ASCII whitespace and canonicalizes the parts.
std::vector<std::string> canonical_surface_tokens(std::string_view surface);

/// Whitespace tokenizer for raw (untokenized) text.
std::vector<std::string> whitespace_tokenize(std::string_view text);

/// Script classes used by the character-type feature signature.
enum class CharClass : std::uint8_t {
  digit,
  latin_upper,
  latin_lower,
  punct,
  cjk_ideograph,
  hiragana,
  katakana,
  other,
};

const char* to_string(CharClass c);
CharClass classify_char(char32_t cp);

/// Maps each character of the token to its CharClass and run-length
/// compresses the result, e.g. "SH-09D" -> "latin-upper,punct,digit,latin-upper".
std::string char_type_signature(std::string_view token);

/// Token-pattern predicates used by the noise-stripping preprocessor:
/// URLs (scheme prefix), usernames (leading '@'), hashtags (leading '#').
bool is_url_token(std::string_view token);
bool is_username_token(std::string_view token);
bool is_hashtag_token(std::string_view token);
bool is_noise_token(std::string_view token);

/// Decodes one UTF-8 code point starting at `pos`, advancing `pos`.
/// Malformed bytes decode as U+FFFD one byte at a time.
char32_t decode_utf8(std::string_view s, size_t& pos);

}  // namespace eed
