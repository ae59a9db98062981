#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eed {

/// BIOES tag alphabet. Single entity class ("EE"), so five labels total.
/// O is label 0; decoding tie-breaks depend on this ordering.
enum class BioesTag : std::uint8_t { O = 0, B = 1, I = 2, E = 3, S = 4 };

inline constexpr size_t kNumBioesTags = 5;

const char* to_string(BioesTag t);
BioesTag bioes_from_string(std::string_view s);  // throws on unknown tag

/// Token index span, end exclusive.
struct Span {
  size_t start = 0;
  size_t end = 0;
  std::string label = "EE";

  friend bool operator==(const Span& a, const Span& b) {
    return a.start == b.start && a.end == b.end && a.label == b.label;
  }
};

/// Encodes non-overlapping in-bounds spans over a sequence of `length` tokens.
/// Length-1 spans become S, longer ones B I... E, everything else O.
/// Throws on overlapping or out-of-bounds spans.
std::vector<BioesTag> encode_bioes(std::span<const Span> spans, size_t length);

/// Total inverse of encode_bioes with a deterministic repair policy for
/// invalid sequences: an I or E without a preceding B opens a span at that
/// token; a B without a closing E closes after the last contiguous I.
std::vector<Span> decode_bioes(std::span<const BioesTag> tags);

/// True iff `tags` is exactly a sequence generable by encode_bioes.
bool is_valid_bioes(std::span<const BioesTag> tags);

std::vector<std::string> tags_to_strings(std::span<const BioesTag> tags);
std::vector<BioesTag> tags_from_strings(std::span<const std::string> tags);

}  // namespace eed
