#include "eed/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "eed/error.hpp"
#include "eed/text.hpp"

namespace eed {

using nlohmann::json;

std::vector<RankedEntity> rank_daily(std::span<const Detection> detections, CivilDate day) {
  const std::int64_t target_day = day_from_civil(day);
  std::map<std::string, RankedEntity> by_surface;
  for (const Detection& d : detections) {
    if (day_index(d.timestamp) != target_day)
      fail("detection in post '" + d.post_id + "' is outside " + format_date(day));
    const std::string canon = canonicalize(d.surface);
    auto [it, inserted] = by_surface.try_emplace(canon);
    RankedEntity& r = it->second;
    if (inserted) {
      r.surface = canon;
      r.score = d.confidence;
      r.first_detection = d.timestamp;
    } else {
      r.score = std::max(r.score, d.confidence);
      r.first_detection = std::min(r.first_detection, d.timestamp);
    }
    r.supporting_post_ids.push_back(d.post_id);
  }
  std::vector<RankedEntity> ranking;
  ranking.reserve(by_surface.size());
  for (auto& [surface, r] : by_surface) {
    std::sort(r.supporting_post_ids.begin(), r.supporting_post_ids.end());
    r.supporting_post_ids.erase(
        std::unique(r.supporting_post_ids.begin(), r.supporting_post_ids.end()),
        r.supporting_post_ids.end());
    ranking.push_back(std::move(r));
  }
  std::sort(ranking.begin(), ranking.end(), [](const RankedEntity& a, const RankedEntity& b) {
    return a.score != b.score ? a.score > b.score : a.surface < b.surface;
  });
  return ranking;
}

std::vector<std::pair<size_t, double>> precision_at_k(
    std::span<const RankedEntity> ranking, const std::map<std::string, bool>& judgments,
    size_t k_max) {
  std::vector<std::pair<size_t, double>> curve;
  size_t correct = 0;
  const size_t limit = std::min(k_max, ranking.size());
  for (size_t k = 0; k < limit; ++k) {
    const auto it = judgments.find(ranking[k].surface);
    if (it == judgments.end())
      fail("no judgment for surface '" + ranking[k].surface + "'");
    if (it->second) ++correct;
    curve.emplace_back(k + 1, static_cast<double>(correct) / static_cast<double>(k + 1));
  }
  return curve;
}

std::vector<ReferenceEntity> build_reference(std::span<const Post> posts,
                                             std::span<const KBEntity> kb,
                                             const CorpusWindow& eval_window,
                                             const CorpusWindow& base_window,
                                             size_t min_eval_mentions,
                                             size_t max_base_mentions) {
  eval_window.validate();
  base_window.validate();
  if (base_window.end > eval_window.start)
    fail("base window must precede the eval window");
  std::vector<std::vector<std::string>> canon;
  canon.reserve(posts.size());
  for (const Post& p : posts) canon.push_back(canonical_tokens(p.tokens));

  std::vector<ReferenceEntity> reference;
  for (const KBEntity& e : kb) {
    const auto needle = canonical_surface_tokens(e.title);
    if (needle.empty()) continue;
    size_t eval_count = 0, base_count = 0;
    bool have_first = false;
    Instant first_appearance;
    std::vector<std::string> reposts;
    for (size_t i = 0; i < posts.size(); ++i) {
      const bool in_eval = eval_window.contains(posts[i].timestamp);
      const bool in_base = base_window.contains(posts[i].timestamp);
      if (!in_eval && !in_base) continue;
      if (find_token_subsequence(canon[i], needle).empty()) continue;
      if (in_base) ++base_count;
      if (in_eval) {
        ++eval_count;
        if (!have_first) {
          have_first = true;
          first_appearance = posts[i].timestamp;
        }
        if (posts[i].is_repost) reposts.push_back(posts[i].id);
      }
    }
    if (eval_count <= min_eval_mentions || base_count > max_base_mentions) continue;
    ReferenceEntity r;
    r.surface = canonicalize(e.title);
    r.registered_at = e.registered_at;
    r.eval_mention_count = eval_count;
    r.base_mention_count = base_count;
    r.first_appearance = first_appearance;
    r.repost_post_ids = std::move(reposts);
    reference.push_back(std::move(r));
  }
  std::sort(reference.begin(), reference.end(),
            [](const ReferenceEntity& a, const ReferenceEntity& b) {
              return a.surface < b.surface;
            });
  return reference;
}

double relative_recall(const std::vector<std::string>& detected_surfaces,
                       std::span<const ReferenceEntity> reference) {
  if (reference.empty()) fail("relative recall is undefined for an empty reference");
  std::set<std::string> detected;
  for (const auto& s : detected_surfaces) detected.insert(canonicalize(s));
  size_t hit = 0;
  for (const ReferenceEntity& r : reference)
    if (detected.contains(r.surface)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(reference.size());
}

LeadTimeStats lead_time_stats(const std::map<std::string, Instant>& first_detection,
                              std::span<const ReferenceEntity> reference,
                              bool exclude_negative) {
  std::map<std::string, const ReferenceEntity*> by_surface;
  for (const ReferenceEntity& r : reference) by_surface.emplace(r.surface, &r);
  std::vector<std::int64_t> leads;
  size_t earlier = 0;
  for (const auto& [surface, detected_at] : first_detection) {
    const auto it = by_surface.find(canonicalize(surface));
    if (it == by_surface.end())
      fail("surface '" + surface + "' is not in the reference list");
    const std::int64_t delta = it->second->registered_at.sec - detected_at.sec;
    const std::int64_t lead = delta / kSecondsPerDay;  // whole days, toward zero
    if (lead > 0) ++earlier;
    if (exclude_negative && lead < 0) continue;
    leads.push_back(lead);
  }
  LeadTimeStats stats;
  if (leads.empty()) return stats;
  std::sort(leads.begin(), leads.end());
  double sum = 0.0;
  for (auto l : leads) sum += static_cast<double>(l);
  stats.mean_days = sum / static_cast<double>(leads.size());
  stats.median_days = leads[(leads.size() - 1) / 2];  // lower central value
  stats.fraction_earlier =
      static_cast<double>(earlier) / static_cast<double>(first_detection.size());
  return stats;
}

double fleiss_kappa(std::span<const std::vector<size_t>> ratings, size_t raters_per_item) {
  if (ratings.empty()) fail("fleiss kappa requires at least one item");
  if (raters_per_item < 2) fail("fleiss kappa requires at least two raters");
  const double n = static_cast<double>(raters_per_item);
  const double n_items = static_cast<double>(ratings.size());
  size_t num_categories = 0;
  for (const auto& item : ratings) num_categories = std::max(num_categories, item.size());
  std::vector<double> p_cat(num_categories, 0.0);
  double p_bar = 0.0;
  for (const auto& item : ratings) {
    size_t total = 0;
    double agree = 0.0;
    for (size_t j = 0; j < item.size(); ++j) {
      total += item[j];
      const double c = static_cast<double>(item[j]);
      agree += c * (c - 1.0);
      p_cat[j] += c;
    }
    if (total != raters_per_item)
      fail("item rating counts must sum to raters_per_item");
    p_bar += agree / (n * (n - 1.0));
  }
  p_bar /= n_items;
  double p_e = 0.0;
  for (double& p : p_cat) {
    p /= n_items * n;
    p_e += p * p;
  }
  if (p_e >= 1.0) return 1.0;  // all raters used a single category everywhere
  return (p_bar - p_e) / (1.0 - p_e);
}

std::map<std::string, bool> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open judgments file '" + path.string() + "'");
  std::map<std::string, std::pair<size_t, size_t>> votes;  // surface -> (true, false)
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos)
      fail(path.string() + ":" + std::to_string(line_no) + ": expected tab-separated fields");
    const std::string surface = line.substr(0, t1);
    const std::string label =
        t2 == std::string::npos ? line.substr(t1 + 1) : line.substr(t1 + 1, t2 - t1 - 1);
    if (label != "0" && label != "1")
      fail(path.string() + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    auto& v = votes[canonicalize(surface)];
    if (label == "1")
      ++v.first;
    else
      ++v.second;
  }
  std::map<std::string, bool> judgments;
  for (const auto& [surface, v] : votes) judgments[surface] = v.first > v.second;
  return judgments;
}

std::vector<std::vector<size_t>> judgment_rating_counts(const std::filesystem::path& path,
                                                        size_t raters_per_item) {
  std::ifstream in(path);
  if (!in) fail("cannot open judgments file '" + path.string() + "'");
  std::map<std::string, std::vector<size_t>> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    if (t1 == std::string::npos) continue;
    const size_t t2 = line.find('\t', t1 + 1);
    const std::string surface = line.substr(0, t1);
    const std::string label =
        t2 == std::string::npos ? line.substr(t1 + 1) : line.substr(t1 + 1, t2 - t1 - 1);
    auto& c = counts[canonicalize(surface)];
    c.resize(2, 0);
    if (label == "1")
      ++c[0];
    else
      ++c[1];
  }
  std::vector<std::vector<size_t>> out;
  for (auto& [surface, c] : counts)
    if (c[0] + c[1] == raters_per_item) out.push_back(std::move(c));
  return out;
}

std::vector<ReferenceEntity> load_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open reference file '" + path.string() + "'");
  std::vector<ReferenceEntity> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ReferenceEntity r;
      r.surface = j.at("surface").get<std::string>();
      r.registered_at = parse_instant(j.at("registered_at").get<std::string>());
      r.eval_mention_count = j.at("eval_mentions").get<size_t>();
      r.base_mention_count = j.at("base_mentions").get<size_t>();
      r.first_appearance = parse_instant(j.at("first_appearance").get<std::string>());
      r.repost_post_ids = j.at("repost_post_ids").get<std::vector<std::string>>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": parse error: " + e.what());
    }
  }
  return out;
}

void save_reference(const std::filesystem::path& path,
                    std::span<const ReferenceEntity> reference) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const ReferenceEntity& r : reference) {
    json j;
    j["surface"] = r.surface;
    j["registered_at"] = format_rfc3339(r.registered_at);
    j["eval_mentions"] = r.eval_mention_count;
    j["base_mentions"] = r.base_mention_count;
    j["first_appearance"] = format_rfc3339(r.first_appearance);
    j["repost_post_ids"] = r.repost_post_ids;
    out << j.dump() << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

void save_ranking_tsv(const std::filesystem::path& path,
                      std::span<const RankedEntity> ranking) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  char buf[32];
  for (size_t i = 0; i < ranking.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", ranking[i].score);
    out << (i + 1) << '\t' << ranking[i].surface << '\t' << buf << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

void save_precision_curve_tsv(const std::filesystem::path& path,
                              std::span<const std::pair<size_t, double>> curve) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  char buf[32];
  for (const auto& [k, p] : curve) {
    std::snprintf(buf, sizeof(buf), "%.6f", p);
    out << k << '\t' << buf << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

}  // namespace eed
