#pragma once

#include <span>
#include <string>
#include <vector>

namespace eed {

/// Distinguished feature value for absent annotations.
inline constexpr const char* kAbsentValue = "∅";  // "∅"

/// Per-token annotation channels. Empty vectors mean the channel is absent
/// for the whole sequence; empty strings mean absent at that token. Either
/// degrades to the distinguished "∅" value.
struct TokenAnnotations {
  std::vector<std::string> pos;
  std::vector<std::string> ne;
  std::vector<std::string> cluster_bits;  // full Brown bit-string per token
};

/// Observation templates over a +/-2 token window: token surface, character
/// type signature, optional POS, optional NE, and Brown cluster-ID prefixes.
struct FeatureTemplateSet {
  bool use_pos = true;
  bool use_ne = true;
  bool use_cluster = true;
  std::vector<int> cluster_prefix_lengths = {4, 8, 12, 0};  // 0 = full path

  /// Canonical single-line description; model files store and compare it.
  std::string description() const;

  friend bool operator==(const FeatureTemplateSet&, const FeatureTemplateSet&) = default;
};

/// Observation feature strings at position t. Offsets outside the sequence
/// contribute "BOS"/"EOS" sentinel values; each template contributes exactly
/// one string per window offset.
std::vector<std::string> extract_features(std::span<const std::string> tokens,
                                          const TokenAnnotations& annotations, size_t t,
                                          const FeatureTemplateSet& templates);

}  // namespace eed
