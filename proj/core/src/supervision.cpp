#include "eed/supervision.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "eed/error.hpp"
#include "eed/text.hpp"

namespace eed {

using nlohmann::json;

void SupervisionConfig::validate() const {
  if (k < 1 || n < 1 || k_prime < 1) fail("supervision thresholds must be at least 1");
  base_window.validate();
  if (prevalent_offset <= 0) fail("prevalent offset must be positive");
}

const char* to_string(Polarity p) {
  return p == Polarity::emerging ? "emerging" : "prevalent";
}

Polarity polarity_from_string(std::string_view s) {
  if (s == "emerging") return Polarity::emerging;
  if (s == "prevalent") return Polarity::prevalent;
  fail("unknown polarity '" + std::string(s) + "'");
}

void LabeledExample::validate() const {
  if (tokens.empty()) fail("labeled example '" + post_id + "' has no tokens");
  if (tags.size() != tokens.size())
    fail("labeled example '" + post_id + "' has tag/token length mismatch");
  if (!is_valid_bioes(tags))
    fail("labeled example '" + post_id + "' has an invalid BIOES sequence");
  if (polarity == Polarity::prevalent)
    for (BioesTag t : tags)
      if (t != BioesTag::O)
        fail("prevalent example '" + post_id + "' carries a non-O tag");
}

CanonicalPostCache::CanonicalPostCache(std::span<const Post> posts) {
  cache_.reserve(posts.size());
  for (const Post& p : posts) cache_.push_back(canonical_tokens(p.tokens));
}

namespace {

struct MentionScan {
  const CanonicalPostCache& cache;
  std::span<const Post> posts;

  bool mentions_at(size_t i, std::span<const std::string> needle) const {
    return !find_token_subsequence(cache.tokens(i), needle).empty();
  }
};

size_t count_in_window(const MentionScan& scan, std::span<const std::string> needle,
                       const CorpusWindow& window) {
  size_t count = 0;
  for (size_t i = 0; i < scan.posts.size(); ++i) {
    if (!window.contains(scan.posts[i].timestamp)) continue;
    if (scan.mentions_at(i, needle)) ++count;
  }
  return count;
}

std::vector<KBEntity> candidates_impl(std::span<const KBEntity> kb, const MentionScan& scan,
                                      const SupervisionConfig& cfg) {
  std::vector<KBEntity> out;
  if (scan.posts.empty()) return out;
  const Instant lo = scan.posts.front().timestamp;
  const Instant hi = scan.posts.back().timestamp;
  for (const KBEntity& e : kb) {
    if (e.registered_at < lo || e.registered_at > hi) continue;
    if (e.registered_at < cfg.base_window.end) continue;
    const auto needle = canonical_surface_tokens(e.title);
    if (needle.empty()) continue;
    if (count_in_window(scan, needle, cfg.base_window) > static_cast<size_t>(cfg.k))
      continue;
    out.push_back(e);
  }
  return out;
}

std::vector<Post> emerging_impl(const KBEntity& entity, const MentionScan& scan,
                                const SupervisionConfig& cfg) {
  const auto needle = canonical_surface_tokens(entity.title);
  if (needle.empty()) return {};
  // Repost mentions strictly before registration, grouped by UTC day.
  std::vector<size_t> repost_mentions;
  std::map<std::int64_t, size_t> per_day;
  for (size_t i = 0; i < scan.posts.size(); ++i) {
    const Post& p = scan.posts[i];
    if (!p.is_repost) continue;
    if (!(p.timestamp < entity.registered_at)) continue;
    if (!scan.mentions_at(i, needle)) continue;
    repost_mentions.push_back(i);
    ++per_day[day_index(p.timestamp)];
  }
  std::int64_t burst_day = 0;
  bool found = false;
  for (const auto& [day, count] : per_day)
    if (count > static_cast<size_t>(cfg.k_prime)) {
      burst_day = day;
      found = true;
      break;
    }
  if (!found) return {};
  const Instant day_start = instant_from_day(burst_day);
  std::vector<Post> out;
  for (size_t i : repost_mentions) {
    if (scan.posts[i].timestamp < day_start) continue;
    out.push_back(scan.posts[i]);
    if (out.size() >= static_cast<size_t>(cfg.n)) break;
  }
  return out;
}

std::vector<Post> prevalent_impl(const KBEntity& entity, const MentionScan& scan,
                                 std::span<const Post> emerging,
                                 const SupervisionConfig& cfg) {
  if (emerging.empty()) fail("prevalent collection requires non-empty emerging contexts");
  const Instant cutoff = add_seconds(emerging.back().timestamp, cfg.prevalent_offset);
  const auto needle = canonical_surface_tokens(entity.title);
  std::vector<Post> out;
  for (size_t i = 0; i < scan.posts.size(); ++i) {
    if (scan.posts[i].timestamp < cutoff) continue;
    if (!scan.mentions_at(i, needle)) continue;
    out.push_back(scan.posts[i]);
    if (out.size() >= emerging.size()) break;
  }
  return out;
}

}  // namespace

std::vector<KBEntity> collect_candidates(std::span<const KBEntity> kb,
                                         std::span<const Post> posts,
                                         const SupervisionConfig& cfg) {
  cfg.validate();
  const CanonicalPostCache cache(posts);
  return candidates_impl(kb, {cache, posts}, cfg);
}

std::vector<Post> collect_emerging_contexts(const KBEntity& entity,
                                            std::span<const Post> posts,
                                            const SupervisionConfig& cfg) {
  cfg.validate();
  const CanonicalPostCache cache(posts);
  return emerging_impl(entity, {cache, posts}, cfg);
}

std::vector<Post> collect_prevalent_contexts(const KBEntity& entity,
                                             std::span<const Post> posts,
                                             std::span<const Post> emerging,
                                             const SupervisionConfig& cfg) {
  cfg.validate();
  const CanonicalPostCache cache(posts);
  return prevalent_impl(entity, {cache, posts}, emerging, cfg);
}

std::vector<LabeledExample> build_dataset(std::span<const KBEntity> kb,
                                          std::span<const Post> posts,
                                          const SupervisionConfig& cfg) {
  cfg.validate();
  const CanonicalPostCache cache(posts);
  const MentionScan scan{cache, posts};

  std::vector<KBEntity> candidates = candidates_impl(kb, scan, cfg);
  std::sort(candidates.begin(), candidates.end(),
            [](const KBEntity& a, const KBEntity& b) { return a.title < b.title; });

  std::vector<LabeledExample> dataset;
  for (const KBEntity& entity : candidates) {
    const auto emerging = emerging_impl(entity, scan, cfg);
    if (emerging.empty()) continue;
    const auto prevalent = prevalent_impl(entity, scan, emerging, cfg);
    if (prevalent.size() < emerging.size()) continue;  // drop unbalanced entities

    const auto needle = canonical_surface_tokens(entity.title);
    for (const Post& p : emerging) {
      const auto canon = canonical_tokens(p.tokens);
      std::vector<Span> spans;
      for (const auto& [s, e] : find_token_subsequence(canon, needle))
        spans.push_back({s, e});
      LabeledExample ex;
      ex.post_id = p.id;
      ex.tokens = p.tokens;
      ex.tags = encode_bioes(spans, p.tokens.size());
      ex.polarity = Polarity::emerging;
      ex.entity = entity.title;
      dataset.push_back(std::move(ex));
    }
    for (const Post& p : prevalent) {
      LabeledExample ex;
      ex.post_id = p.id;
      ex.tokens = p.tokens;
      ex.tags.assign(p.tokens.size(), BioesTag::O);
      ex.polarity = Polarity::prevalent;
      ex.entity = entity.title;
      dataset.push_back(std::move(ex));
    }
  }
  return dataset;
}

void save_dataset(const std::filesystem::path& path,
                  std::span<const LabeledExample> dataset) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const LabeledExample& ex : dataset) {
    json j;
    j["post_id"] = ex.post_id;
    j["tokens"] = ex.tokens;
    j["tags"] = tags_to_strings(ex.tags);
    j["polarity"] = to_string(ex.polarity);
    j["entity"] = ex.entity;
    out << j.dump() << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

std::vector<LabeledExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dataset file '" + path.string() + "'");
  std::vector<LabeledExample> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      LabeledExample ex;
      ex.post_id = j.at("post_id").get<std::string>();
      ex.tokens = j.at("tokens").get<std::vector<std::string>>();
      const auto tag_strings = j.at("tags").get<std::vector<std::string>>();
      ex.tags = tags_from_strings(tag_strings);
      ex.polarity = polarity_from_string(j.at("polarity").get<std::string>());
      ex.entity = j.at("entity").get<std::string>();
      ex.validate();
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": parse error: " + e.what());
    } catch (const Error& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_dev(
    std::span<const LabeledExample> dataset) {
  std::vector<LabeledExample> train, dev;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (i % 10 == 9)
      dev.push_back(dataset[i]);
    else
      train.push_back(dataset[i]);
  }
  return {std::move(train), std::move(dev)};
}

}  // namespace eed
