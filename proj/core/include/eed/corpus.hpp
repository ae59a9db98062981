#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eed/time.hpp"

namespace eed {

/// One time-stamped microblog message with pre-tokenized text.
struct Post {
  std::string id;
  Instant timestamp;
  std::vector<std::string> tokens;
  bool is_repost = false;
  std::optional<std::string> original_id;  // set iff is_repost
  std::optional<std::string> author;

  /// Throws Error if an invariant is violated (empty tokens, empty token
  /// string, original_id present on a non-repost).
  void validate() const;
};

/// A KB title with its registration timestamp.
struct KBEntity {
  std::string title;
  Instant registered_at;
  bool is_redirect = false;
  bool is_disambiguation = false;
};

/// Half-open time window [start, end).
struct CorpusWindow {
  Instant start;
  Instant end;

  bool contains(Instant t) const { return start <= t && t < end; }
  void validate() const;
};

struct PostLoadOptions {
  /// Drop URL / @username / #hashtag tokens at load time. Posts whose tokens
  /// are all noise are rejected as invariant violations.
  bool strip_noise_tokens = false;
};

/// Streaming JSONL reader. Yields posts in file order and enforces
/// non-decreasing timestamps and per-record invariants with line-numbered
/// errors.
class PostReader {
 public:
  PostReader(const std::filesystem::path& path, PostLoadOptions options = {});
  ~PostReader();
  PostReader(PostReader&&) noexcept;
  PostReader& operator=(PostReader&&) noexcept;

  std::optional<Post> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<Post> load_posts(const std::filesystem::path& path, PostLoadOptions options = {});
void save_posts(const std::filesystem::path& path, std::span<const Post> posts);

/// Loads the KB TSV, drops redirects and disambiguation pages, and returns
/// the remaining entities sorted by registration time.
std::vector<KBEntity> load_kb(const std::filesystem::path& path);
/// Writes all rows, including redirect/disambiguation flags.
void save_kb(const std::filesystem::path& path, std::span<const KBEntity> entities);

/// Gold annotation for one emerging-context mention, end exclusive.
struct GoldSpan {
  std::string post_id;
  size_t start = 0;
  size_t end = 0;
  std::string entity;

  friend bool operator==(const GoldSpan&, const GoldSpan&) = default;
};

std::vector<GoldSpan> load_gold_spans(const std::filesystem::path& path);
void save_gold_spans(const std::filesystem::path& path, std::span<const GoldSpan> spans);

/// Greedy left-to-right non-overlapping occurrences of `needle` in `hay` as
/// [start, end) token ranges. Both sides must already be canonicalized.
std::vector<std::pair<size_t, size_t>> find_token_subsequence(
    std::span<const std::string> hay, std::span<const std::string> needle);

/// Number of posts within `window` whose token sequence contains the surface
/// as a contiguous token subsequence after canonicalization.
size_t count_mentions(const std::string& entity_surface, std::span<const Post> posts,
                      const CorpusWindow& window);

/// True iff the post mentions the canonical surface token sequence.
bool mentions(const Post& post, std::span<const std::string> canonical_surface);

}  // namespace eed
