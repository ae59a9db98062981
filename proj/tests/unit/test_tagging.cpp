#include <doctest.h>

#include <random>

#include "eed/error.hpp"
#include "eed/tagging.hpp"

using namespace eed;

namespace {

std::vector<BioesTag> tags_of(const char* s) {
  std::vector<BioesTag> tags;
  for (const char* p = s; *p; ++p) tags.push_back(bioes_from_string(std::string(1, *p)));
  return tags;
}

}  // namespace

TEST_CASE("encode fixtures") {
  CHECK(encode_bioes(std::vector<Span>{{0, 4}}, 5) == tags_of("BIIEO"));
  CHECK(encode_bioes(std::vector<Span>{{2, 3}}, 4) == tags_of("OOSO"));
  CHECK(encode_bioes(std::vector<Span>{}, 3) == tags_of("OOO"));
  CHECK(encode_bioes(std::vector<Span>{{0, 2}, {3, 4}}, 4) == tags_of("BEOS"));
}

TEST_CASE("encode rejects overlap and out-of-bounds") {
  CHECK_THROWS_AS(encode_bioes(std::vector<Span>{{0, 2}, {1, 3}}, 4), Error);
  CHECK_THROWS_AS(encode_bioes(std::vector<Span>{{2, 2}}, 4), Error);
  CHECK_THROWS_AS(encode_bioes(std::vector<Span>{{3, 5}}, 4), Error);
}

TEST_CASE("decode fixtures including repair policy") {
  CHECK(decode_bioes(tags_of("BIEOS")) == std::vector<Span>{{0, 3}, {4, 5}});
  CHECK(decode_bioes(tags_of("OEO")) == std::vector<Span>{{1, 2}});   // orphan E
  CHECK(decode_bioes(tags_of("IIO")) == std::vector<Span>{{0, 2}});   // orphan I run
  CHECK(decode_bioes(tags_of("BO")) == std::vector<Span>{{0, 1}});    // unclosed B
  CHECK(decode_bioes(tags_of("BIBE")) == std::vector<Span>{{0, 2}, {2, 4}});
  CHECK(decode_bioes(tags_of("BS")) == std::vector<Span>{{0, 1}, {1, 2}});
  CHECK(decode_bioes(std::vector<BioesTag>{}).empty());
}

TEST_CASE("round trip and validity over random span sets") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 500; ++it) {
    const size_t len = 1 + rng() % 12;
    std::vector<Span> spans;
    size_t pos = rng() % 3;
    while (pos < len) {
      const size_t w = 1 + rng() % 3;
      const size_t end = std::min(len, pos + w);
      if (rng() % 2) spans.push_back({pos, end});
      pos = end + rng() % 3;
    }
    const auto tags = encode_bioes(spans, len);
    CHECK(is_valid_bioes(tags));
    CHECK(decode_bioes(tags) == spans);
  }
}

TEST_CASE("is_valid accepts exactly encode-generable sequences") {
  CHECK(is_valid_bioes(tags_of("OBIES")));
  CHECK(is_valid_bioes(tags_of("BE")));
  CHECK_FALSE(is_valid_bioes(tags_of("OI")));   // I without B
  CHECK_FALSE(is_valid_bioes(tags_of("BS")));   // B closed by S
  CHECK_FALSE(is_valid_bioes(tags_of("EB")));   // E without B, B unclosed
  CHECK_FALSE(is_valid_bioes(tags_of("B")));    // unclosed at end
  // exhaustive cross-check against decode/encode round trip for length <= 5
  for (size_t len = 1; len <= 5; ++len) {
    std::vector<size_t> idx(len, 0);
    while (true) {
      std::vector<BioesTag> tags;
      for (size_t i : idx) tags.push_back(static_cast<BioesTag>(i));
      const bool valid = is_valid_bioes(tags);
      const bool round_trips = encode_bioes(decode_bioes(tags), len) == tags;
      CHECK(valid == round_trips);
      size_t t = 0;
      while (t < len && ++idx[t] == kNumBioesTags) idx[t++] = 0;
      if (t == len) break;
    }
  }
}

TEST_CASE("tag string serialization") {
  CHECK(std::string(to_string(BioesTag::B)) == "B");
  CHECK(bioes_from_string("S") == BioesTag::S);
  CHECK_THROWS_AS(bioes_from_string("X"), Error);
}
