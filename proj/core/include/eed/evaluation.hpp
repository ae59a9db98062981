#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eed/corpus.hpp"
#include "eed/crf.hpp"
#include "eed/time.hpp"

namespace eed {

/// One entity in a daily ranking. The score is the maximum confidence over
/// all of the entity's detections that day.
struct RankedEntity {
  std::string surface;  // canonical
  double score = 0.0;
  Instant first_detection;
  std::vector<std::string> supporting_post_ids;
};

/// Aggregates detections of one UTC day per canonical surface; sorted by
/// score descending, ties by surface. Throws if a detection falls outside
/// the day.
std::vector<RankedEntity> rank_daily(std::span<const Detection> detections, CivilDate day);

/// Cumulative precision curve for k = 1..min(k_max, |ranking|). Throws when
/// a ranked surface has no judgment.
std::vector<std::pair<size_t, double>> precision_at_k(
    std::span<const RankedEntity> ranking, const std::map<std::string, bool>& judgments,
    size_t k_max);

/// KB-derived reference entity for relative recall.
struct ReferenceEntity {
  std::string surface;  // canonical
  Instant registered_at;
  size_t eval_mention_count = 0;
  size_t base_mention_count = 0;
  Instant first_appearance;
  std::vector<std::string> repost_post_ids;  // reposts since the first appearance
};

/// Entities mentioned more than min_eval_mentions times inside eval_window
/// and at most max_base_mentions times inside base_window. Reference defaults
/// follow the construction thresholds (100 exclusive, 5 inclusive).
std::vector<ReferenceEntity> build_reference(std::span<const Post> posts,
                                             std::span<const KBEntity> kb,
                                             const CorpusWindow& eval_window,
                                             const CorpusWindow& base_window,
                                             size_t min_eval_mentions = 100,
                                             size_t max_base_mentions = 5);

/// |detected ∩ reference| / |reference|; throws on an empty reference.
double relative_recall(const std::vector<std::string>& detected_surfaces,
                       std::span<const ReferenceEntity> reference);

struct LeadTimeStats {
  double mean_days = 0.0;
  std::int64_t median_days = 0;  // lower central value for even counts
  double fraction_earlier = 0.0;  // lead strictly positive
};

/// Lead = whole days between first detection and KB registration (negative
/// when detected late). Surfaces missing from the reference are an error.
/// exclude_negative drops late detections from the statistics.
LeadTimeStats lead_time_stats(const std::map<std::string, Instant>& first_detection,
                              std::span<const ReferenceEntity> reference,
                              bool exclude_negative = false);

/// Fleiss kappa over items with per-category rating counts; every item must
/// have counts summing to raters_per_item >= 2. Returns 1 when chance
/// agreement is 1 (single category used by all raters everywhere).
double fleiss_kappa(std::span<const std::vector<size_t>> ratings, size_t raters_per_item);

/// Judgments TSV: surface <TAB> label(0/1) <TAB> annotator_id. Repeated
/// surfaces resolve by majority vote.
std::map<std::string, bool> load_judgments(const std::filesystem::path& path);
/// Per-surface category counts (true, false) for the kappa computation;
/// only surfaces rated by exactly raters_per_item annotators are kept.
std::vector<std::vector<size_t>> judgment_rating_counts(const std::filesystem::path& path,
                                                        size_t raters_per_item);

std::vector<ReferenceEntity> load_reference(const std::filesystem::path& path);
void save_reference(const std::filesystem::path& path,
                    std::span<const ReferenceEntity> reference);

void save_ranking_tsv(const std::filesystem::path& path,
                      std::span<const RankedEntity> ranking);
void save_precision_curve_tsv(const std::filesystem::path& path,
                              std::span<const std::pair<size_t, double>> curve);

}  // namespace eed
