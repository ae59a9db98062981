#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace eed {

struct BrownOptions {
  size_t num_clusters = 0;   // required; 1 <= c <= |vocab|
  size_t merge_window = 0;   // 0 means num_clusters + 1
  std::uint64_t min_frequency = 1;  // tokens below share one OOV class
};

/// Replayable trace of the greedy agglomeration, used by the merge-maximality
/// tests. Inserts name the token and its fresh class id; merges name the two
/// class ids (a < b, merged into a) and the objective after the merge.
struct BrownEvent {
  enum class Kind { insert, merge };
  Kind kind = Kind::insert;
  std::string token;
  size_t class_a = 0;
  size_t class_b = 0;
  double mi_after = 0.0;
};

/// Hierarchical clustering result: every vocab token carries the bit-string
/// of its leaf cluster (root-to-leaf path over the final merge tree).
class ClusterModel {
 public:
  std::unordered_map<std::string, std::uint64_t> vocab;       // token -> frequency
  std::unordered_map<std::string, std::string> assignment;    // token -> bit-string
  size_t num_clusters = 0;
  double leaf_mi = 0.0;  // class-bigram mutual information of the leaf partition

  /// First min(length, |bits|) bits; unknown tokens map to "∅".
  /// length == 0 means the full bit-string.
  std::string prefix(const std::string& token, size_t length) const;

  void save(const std::filesystem::path& path) const;  // TSV bitstring<TAB>token<TAB>freq
  static ClusterModel load(const std::filesystem::path& path);
};

/// Greedy window-restricted agglomerative clustering maximizing average
/// class-bigram mutual information over sentence-internal adjacent pairs.
ClusterModel brown_cluster(std::span<const std::vector<std::string>> sentences,
                           const BrownOptions& options,
                           std::vector<BrownEvent>* trace = nullptr);

std::string cluster_prefix(const ClusterModel& model, const std::string& token,
                           size_t length);

}  // namespace eed
