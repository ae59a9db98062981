#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eed/corpus.hpp"
#include "eed/tagging.hpp"
#include "eed/time.hpp"

namespace eed {

/// Per-surface NE-detection history: detection instants plus daily extraction
/// counts over a known coverage window. Surfaces are stored canonicalized.
class HistoryIndex {
 public:
  HistoryIndex() = default;
  explicit HistoryIndex(CorpusWindow coverage) : coverage_(coverage), has_coverage_(true) {}

  void add(const std::string& surface, Instant when);

  const CorpusWindow& coverage() const { return coverage_; }
  bool has_coverage() const { return has_coverage_; }

  /// Detections with instant in [lo, hi).
  bool any_detection_in(const std::string& canonical_surface, Instant lo, Instant hi) const;
  std::uint64_t count_on_day(const std::string& canonical_surface, std::int64_t day) const;

  /// Sorted key-value TSV: surface <TAB> date <TAB> count. Detection instants
  /// round-trip at day resolution (start of day).
  void save(const std::filesystem::path& path) const;
  static HistoryIndex load(const std::filesystem::path& path, CorpusWindow coverage);

 private:
  struct SurfaceHistory {
    std::vector<Instant> detections;              // sorted
    std::map<std::int64_t, std::uint64_t> daily;  // day index -> count
  };
  std::map<std::string, SurfaceHistory> surfaces_;
  CorpusWindow coverage_{};
  bool has_coverage_ = false;
};

/// True iff the surface has no NE detection within
/// [post_time - 1 calendar year, post_time - 1 week). Throws when the index
/// coverage does not include that range.
bool baseline_unseen_in_stream(const std::string& surface, Instant post_time,
                               const HistoryIndex& index);

/// True iff no KB entity with the same canonical title was registered on or
/// before (post_time - 1 calendar month, end-of-month clamped).
bool baseline_unseen_in_kb(const std::string& surface, Instant post_time,
                           std::span<const KBEntity> kb);

/// count(day) / (count(day-1) + 1) with add-one smoothing; without smoothing
/// the ratio is taken literally (0/0 = 0, x/0 = +inf).
double burst_score(const std::string& surface, std::int64_t day, const HistoryIndex& index,
                   bool smoothing = true);
double burst_score(const std::string& surface, CivilDate day, const HistoryIndex& index,
                   bool smoothing = true);

/// Candidate NE recognizers for the baseline engines.
/// Gazetteer: greedy longest-match against a list of surfaces.
std::vector<Span> gazetteer_spans(std::span<const std::string> tokens,
                                  std::span<const std::vector<std::string>> gazetteer);
/// Script-transition heuristic: maximal runs of tokens that start with an
/// uppercase Latin letter, a CJK ideograph, or katakana.
std::vector<Span> heuristic_spans(std::span<const std::string> tokens);

}  // namespace eed
