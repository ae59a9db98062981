#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eed/corpus.hpp"
#include "eed/tagging.hpp"

namespace eed {

/// Thresholds of the time-sensitive distant supervision. Defaults are the
/// reference values k=5, n=100, k'=10 with a one-year prevalent offset.
struct SupervisionConfig {
  int k = 5;        // homograph-exclusion mention cap over the base window
  int n = 100;      // max emerging posts per entity
  int k_prime = 10; // repost-share threshold; the filter fires on count > k'
  CorpusWindow base_window;
  std::int64_t prevalent_offset = 365 * kSecondsPerDay;

  void validate() const;
};

enum class Polarity { emerging, prevalent };

const char* to_string(Polarity p);
Polarity polarity_from_string(std::string_view s);

struct LabeledExample {
  std::string post_id;
  std::vector<std::string> tokens;
  std::vector<BioesTag> tags;
  Polarity polarity = Polarity::emerging;
  std::string entity;

  void validate() const;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// Canonical token cache shared by the per-entity scans.
class CanonicalPostCache {
 public:
  explicit CanonicalPostCache(std::span<const Post> posts);
  std::span<const std::string> tokens(size_t post_index) const { return cache_[post_index]; }
  size_t size() const { return cache_.size(); }

 private:
  std::vector<std::vector<std::string>> cache_;
};

/// Step 1: entities registered inside the stream's availability span, after
/// the base window, with at most k base-window mentions.
std::vector<KBEntity> collect_candidates(std::span<const KBEntity> kb,
                                         std::span<const Post> posts,
                                         const SupervisionConfig& cfg);

/// Step 2 with the noise filter: the chronologically first min(n, available)
/// repost mentions from the start of the earliest UTC day whose repost-share
/// exceeds k', all strictly before the registration time. Empty when no such
/// day exists.
std::vector<Post> collect_emerging_contexts(const KBEntity& entity,
                                            std::span<const Post> posts,
                                            const SupervisionConfig& cfg);

/// Negative examples: the first |emerging| mentions at least prevalent_offset
/// after the last emerging post. May return fewer when the stream runs out.
std::vector<Post> collect_prevalent_contexts(const KBEntity& entity,
                                             std::span<const Post> posts,
                                             std::span<const Post> emerging,
                                             const SupervisionConfig& cfg);

/// Full pipeline: one emerging example per retained emerging post with the
/// entity's mention spans tagged, balanced by the same number of all-O
/// prevalent examples. Entities with a short prevalent harvest are dropped.
/// Output is ordered by (entity title, polarity, timestamp).
std::vector<LabeledExample> build_dataset(std::span<const KBEntity> kb,
                                          std::span<const Post> posts,
                                          const SupervisionConfig& cfg);

void save_dataset(const std::filesystem::path& path,
                  std::span<const LabeledExample> dataset);
std::vector<LabeledExample> load_dataset(const std::filesystem::path& path);

/// Deterministic 90/10 split: every 10th example goes to the dev set.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_dev(
    std::span<const LabeledExample> dataset);

}  // namespace eed
