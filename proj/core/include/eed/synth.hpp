#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eed/corpus.hpp"
#include "eed/supervision.hpp"

namespace eed {

/// Entity categories planted by the generator. Each category exercises one
/// branch of the distant-supervision pipeline.
enum class SynthKind {
  normal,           // passes every filter
  homograph,        // surface also circulates in the base year (> k mentions)
  below_threshold,  // repost share never exceeds k'
  viral,            // more emerging reposts than n, so the cap binds
  short_prevalent,  // prevalent harvest comes up short, entity dropped
};

const char* to_string(SynthKind k);
SynthKind synth_kind_from_string(std::string_view s);

struct SynthConfig {
  int normal_entities = 30;
  int homograph_pairs = 5;
  int below_threshold_entities = 10;
  int viral_entities = 2;
  int short_prevalent_entities = 3;

  int span_days = 90;   // emergence window length
  int base_days = 365;  // base window length
  Instant base_start = {1325376000};  // 2012-01-01T00:00:00Z

  // thresholds the corpus is built against (should mirror SupervisionConfig)
  int k = 5;
  int n = 100;
  int k_prime = 10;
  std::int64_t prevalent_offset = 365 * kSecondsPerDay;

  int fan_out = 12;       // burst-day reposts, must exceed k_prime
  int low_fan_out = 8;    // for below-threshold entities, must not exceed k_prime
  int trickle = 3;        // pre-burst repost leak, must not exceed k_prime
  int viral_extra = 20;   // viral entities plant n + viral_extra reposts
  int prevalent_spare = 3;    // planted prevalent mentions beyond the needed count
  int short_prevalent_gap = 5;  // how many prevalent mentions short entities miss

  int chatter_posts = 300;  // base-window background chatter

  // held-out evaluation day
  int eval_emerging = 30;        // planted emerging entities with unseen surfaces
  int eval_homographs = 8;       // of eval_emerging, surfaces pre-registered in the KB
  int eval_distractors = 100;    // prevalent-context posts on the eval day
  int eval_reposts_per_entity = 4;

  int total_entities() const {
    return normal_entities + homograph_pairs + below_threshold_entities + viral_entities +
           short_prevalent_entities;
  }
  void validate() const;
};

/// What the generator planted for one entity, with the dataset expectation
/// derived from the construction plan (not from the supervision module).
struct SynthEntityPlan {
  std::string surface;
  SynthKind kind = SynthKind::normal;
  Instant registered_at;
  std::string burst_day;  // YYYY-MM-DD of the first day with > k' reposts; empty if none
  size_t base_mentions = 0;
  bool expected_in_dataset = false;
  std::vector<std::string> expected_emerging_ids;   // chronological
  std::vector<std::string> expected_prevalent_ids;  // chronological
};

struct SynthEvalEntity {
  std::string surface;
  bool emerging = false;
  bool pre_registered = false;  // in the KB well before the eval day
};

struct SynthPlan {
  std::uint64_t seed = 0;
  CorpusWindow base_window;
  std::string eval_day;  // YYYY-MM-DD
  std::vector<SynthEntityPlan> entities;
  std::vector<SynthEvalEntity> eval_entities;
};

struct SynthPaths {
  std::filesystem::path posts;
  std::filesystem::path kb;
  std::filesystem::path gold_spans;
  std::filesystem::path plan;
  std::filesystem::path eval_posts;
};

/// Deterministic synthetic corpus: identical (seed, config) produce byte
/// identical files. Writes posts.jsonl, kb.tsv, gold_spans.jsonl, plan.json
/// and eval_posts.jsonl into out_dir.
SynthPaths generate_synthetic_corpus(std::uint64_t seed, const SynthConfig& cfg,
                                     const std::filesystem::path& out_dir);

SynthPlan load_plan(const std::filesystem::path& path);

}  // namespace eed
