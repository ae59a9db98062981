#include "eed/tagging.hpp"

#include <algorithm>

#include "eed/error.hpp"

namespace eed {

const char* to_string(BioesTag t) {
  switch (t) {
    case BioesTag::O: return "O";
    case BioesTag::B: return "B";
    case BioesTag::I: return "I";
    case BioesTag::E: return "E";
    case BioesTag::S: return "S";
  }
  return "O";
}

BioesTag bioes_from_string(std::string_view s) {
  if (s == "O") return BioesTag::O;
  if (s == "B") return BioesTag::B;
  if (s == "I") return BioesTag::I;
  if (s == "E") return BioesTag::E;
  if (s == "S") return BioesTag::S;
  fail("unknown BIOES tag '" + std::string(s) + "'");
}

std::vector<BioesTag> encode_bioes(std::span<const Span> spans, size_t length) {
  std::vector<Span> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  std::vector<BioesTag> tags(length, BioesTag::O);
  size_t prev_end = 0;
  for (const Span& s : sorted) {
    if (s.start >= s.end || s.end > length)
      fail("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
           ") is out of bounds for length " + std::to_string(length));
    if (s.start < prev_end)
      fail("overlapping spans at token " + std::to_string(s.start));
    prev_end = s.end;
    if (s.end - s.start == 1) {
      tags[s.start] = BioesTag::S;
    } else {
      tags[s.start] = BioesTag::B;
      for (size_t i = s.start + 1; i + 1 < s.end; ++i) tags[i] = BioesTag::I;
      tags[s.end - 1] = BioesTag::E;
    }
  }
  return tags;
}

std::vector<Span> decode_bioes(std::span<const BioesTag> tags) {
  std::vector<Span> spans;
  const size_t n = tags.size();
  size_t t = 0;
  while (t < n) {
    switch (tags[t]) {
      case BioesTag::O:
        ++t;
        break;
      case BioesTag::S:
        spans.push_back({t, t + 1});
        ++t;
        break;
      case BioesTag::E:  // E without a preceding B: single-token span
        spans.push_back({t, t + 1});
        ++t;
        break;
      case BioesTag::B:
      case BioesTag::I: {
        // B (or orphan I, which opens a span) followed by contiguous I's,
        // closed by E if present, otherwise after the last contiguous I.
        const size_t start = t;
        size_t last = t;
        ++t;
        while (t < n && tags[t] == BioesTag::I) last = t++;
        if (t < n && tags[t] == BioesTag::E) {
          spans.push_back({start, t + 1});
          ++t;
        } else {
          spans.push_back({start, last + 1});
        }
        break;
      }
    }
  }
  return spans;
}

bool is_valid_bioes(std::span<const BioesTag> tags) {
  // Valid sequences match (O | S | B I* E)*.
  size_t t = 0;
  const size_t n = tags.size();
  while (t < n) {
    if (tags[t] == BioesTag::O || tags[t] == BioesTag::S) {
      ++t;
      continue;
    }
    if (tags[t] != BioesTag::B) return false;
    ++t;
    while (t < n && tags[t] == BioesTag::I) ++t;
    if (t >= n || tags[t] != BioesTag::E) return false;
    ++t;
  }
  return true;
}

std::vector<std::string> tags_to_strings(std::span<const BioesTag> tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (BioesTag t : tags) out.emplace_back(to_string(t));
  return out;
}

std::vector<BioesTag> tags_from_strings(std::span<const std::string> tags) {
  std::vector<BioesTag> out;
  out.reserve(tags.size());
  for (const auto& s : tags) out.push_back(bioes_from_string(s));
  return out;
}

}  // namespace eed
