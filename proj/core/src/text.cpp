#include "eed/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>

#include <mutex>

#include "eed/error.hpp"

namespace eed {

namespace {

const icu::Normalizer2& nfkc_casefold() {
  static std::once_flag once;
  static const icu::Normalizer2* instance = nullptr;
  std::call_once(once, [] {
    UErrorCode status = U_ZERO_ERROR;
    instance = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || instance == nullptr)
      fail("ICU NFKC_Casefold normalizer unavailable");
  });
  return *instance;
}

}  // namespace

std::string canonicalize(std::string_view s) {
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfkc_casefold().normalize(input, status);
  if (U_FAILURE(status)) fail("Unicode normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::string> canonical_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(canonicalize(t));
  return out;
}

std::vector<std::string> whitespace_tokenize(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> canonical_surface_tokens(std::string_view surface) {
  auto parts = whitespace_tokenize(surface);
  return canonical_tokens(parts);
}

const char* to_string(CharClass c) {
  switch (c) {
    case CharClass::digit: return "digit";
    case CharClass::latin_upper: return "latin-upper";
    case CharClass::latin_lower: return "latin-lower";
    case CharClass::punct: return "punct";
    case CharClass::cjk_ideograph: return "cjk-ideograph";
    case CharClass::hiragana: return "hiragana";
    case CharClass::katakana: return "katakana";
    case CharClass::other: return "other";
  }
  return "other";
}

CharClass classify_char(char32_t cp) {
  const UChar32 c = static_cast<UChar32>(cp);
  if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF))
    return CharClass::cjk_ideograph;
  if (cp >= 0x3040 && cp <= 0x309F) return CharClass::hiragana;
  if ((cp >= 0x30A0 && cp <= 0x30FF) || (cp >= 0xFF66 && cp <= 0xFF9F))
    return CharClass::katakana;
  if (u_isdigit(c)) return CharClass::digit;
  const int8_t cat = u_charType(c);
  UErrorCode status = U_ZERO_ERROR;
  const bool latin = uscript_getScript(c, &status) == USCRIPT_LATIN && U_SUCCESS(status);
  if (latin && u_isupper(c)) return CharClass::latin_upper;
  if (latin && u_islower(c)) return CharClass::latin_lower;
  switch (cat) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
      return CharClass::punct;
    default:
      return CharClass::other;
  }
}

char32_t decode_utf8(std::string_view s, size_t& pos) {
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    cp = b0;
    len = 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (size_t i = 1; i < len; ++i) {
    if ((byte(pos + i) & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  pos += len;
  return cp;
}

std::string char_type_signature(std::string_view token) {
  std::string out;
  bool have_prev = false;
  CharClass prev = CharClass::other;
  size_t pos = 0;
  while (pos < token.size()) {
    const CharClass c = classify_char(decode_utf8(token, pos));
    if (have_prev && c == prev) continue;
    if (have_prev) out += ',';
    out += to_string(c);
    prev = c;
    have_prev = true;
  }
  return out;
}

bool is_url_token(std::string_view token) {
  const auto starts = [&](std::string_view p) {
    if (token.size() < p.size()) return false;
    for (size_t i = 0; i < p.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(token[i])) != p[i]) return false;
    return true;
  };
  return starts("http://") || starts("https://") || starts("ftp://") || starts("www.");
}

bool is_username_token(std::string_view token) {
  return token.size() > 1 && token.front() == '@';
}

bool is_hashtag_token(std::string_view token) {
  return token.size() > 1 && token.front() == '#';
}

bool is_noise_token(std::string_view token) {
  return is_url_token(token) || is_username_token(token) || is_hashtag_token(token);
}

}  // namespace eed
