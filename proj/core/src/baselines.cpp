#include "eed/baselines.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "eed/error.hpp"
#include "eed/text.hpp"

namespace eed {

void HistoryIndex::add(const std::string& surface, Instant when) {
  auto& h = surfaces_[canonicalize(surface)];
  h.detections.insert(std::upper_bound(h.detections.begin(), h.detections.end(), when),
                      when);
  ++h.daily[day_index(when)];
}

bool HistoryIndex::any_detection_in(const std::string& canonical_surface, Instant lo,
                                    Instant hi) const {
  const auto it = surfaces_.find(canonical_surface);
  if (it == surfaces_.end()) return false;
  const auto& d = it->second.detections;
  const auto first = std::lower_bound(d.begin(), d.end(), lo);
  return first != d.end() && *first < hi;
}

std::uint64_t HistoryIndex::count_on_day(const std::string& canonical_surface,
                                         std::int64_t day) const {
  const auto it = surfaces_.find(canonical_surface);
  if (it == surfaces_.end()) return 0;
  const auto dit = it->second.daily.find(day);
  return dit == it->second.daily.end() ? 0 : dit->second;
}

void HistoryIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const auto& [surface, h] : surfaces_)
    for (const auto& [day, count] : h.daily)
      out << surface << '\t' << format_date(instant_from_day(day)) << '\t' << count << '\n';
  if (!out) fail("write to '" + path.string() + "' failed");
}

HistoryIndex HistoryIndex::load(const std::filesystem::path& path, CorpusWindow coverage) {
  std::ifstream in(path);
  if (!in) fail("cannot open history index '" + path.string() + "'");
  HistoryIndex index(coverage);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      fail(path.string() + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    const std::string surface = line.substr(0, t1);
    Instant day_start;
    try {
      day_start = parse_instant(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const Error& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::uint64_t count = std::strtoull(line.c_str() + t2 + 1, nullptr, 10);
    auto& h = index.surfaces_[surface];
    h.daily[day_index(day_start)] += count;
    // window queries only need one instant per day
    if (count > 0) h.detections.push_back(day_start);
  }
  for (auto& [surface, h] : index.surfaces_)
    std::sort(h.detections.begin(), h.detections.end());
  return index;
}

bool baseline_unseen_in_stream(const std::string& surface, Instant post_time,
                               const HistoryIndex& index) {
  const Instant lo = sub_months(post_time, 12);
  const Instant hi = add_days(post_time, -7);
  if (!index.has_coverage())
    fail("history index has no coverage window");
  if (index.coverage().start > lo || index.coverage().end < hi)
    fail("history index coverage [" + format_rfc3339(index.coverage().start) + ", " +
         format_rfc3339(index.coverage().end) + ") does not include [" + format_rfc3339(lo) +
         ", " + format_rfc3339(hi) + ")");
  return !index.any_detection_in(canonicalize(surface), lo, hi);
}

bool baseline_unseen_in_kb(const std::string& surface, Instant post_time,
                           std::span<const KBEntity> kb) {
  const Instant cutoff = sub_months(post_time, 1);
  const std::string canon = canonicalize(surface);
  for (const KBEntity& e : kb) {
    if (canonicalize(e.title) != canon) continue;
    if (e.registered_at <= cutoff) return false;
  }
  return true;
}

double burst_score(const std::string& surface, std::int64_t day, const HistoryIndex& index,
                   bool smoothing) {
  const std::string canon = canonicalize(surface);
  const double today = static_cast<double>(index.count_on_day(canon, day));
  const double yesterday = static_cast<double>(index.count_on_day(canon, day - 1));
  if (today == 0.0) return 0.0;
  if (smoothing) return today / (yesterday + 1.0);
  if (yesterday == 0.0) return std::numeric_limits<double>::infinity();
  return today / yesterday;
}

double burst_score(const std::string& surface, CivilDate day, const HistoryIndex& index,
                   bool smoothing) {
  return burst_score(surface, day_from_civil(day), index, smoothing);
}

std::vector<Span> gazetteer_spans(std::span<const std::string> tokens,
                                  std::span<const std::vector<std::string>> gazetteer) {
  const auto hay = canonical_tokens(tokens);
  std::vector<std::vector<std::string>> needles;
  needles.reserve(gazetteer.size());
  for (const auto& g : gazetteer) needles.push_back(canonical_tokens(g));
  std::vector<Span> spans;
  size_t i = 0;
  while (i < hay.size()) {
    size_t best_len = 0;
    for (const auto& needle : needles) {
      if (needle.empty() || needle.size() > hay.size() - i || needle.size() <= best_len)
        continue;
      bool match = true;
      for (size_t j = 0; j < needle.size(); ++j)
        if (hay[i + j] != needle[j]) {
          match = false;
          break;
        }
      if (match) best_len = needle.size();
    }
    if (best_len > 0) {
      spans.push_back({i, i + best_len});
      i += best_len;
    } else {
      ++i;
    }
  }
  return spans;
}

namespace {

bool name_like(const std::string& token) {
  size_t pos = 0;
  const CharClass c = classify_char(decode_utf8(token, pos));
  return c == CharClass::latin_upper || c == CharClass::cjk_ideograph ||
         c == CharClass::katakana;
}

}  // namespace

std::vector<Span> heuristic_spans(std::span<const std::string> tokens) {
  std::vector<Span> spans;
  size_t i = 0;
  while (i < tokens.size()) {
    if (!name_like(tokens[i])) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < tokens.size() && name_like(tokens[j])) ++j;
    spans.push_back({i, j});
    i = j;
  }
  return spans;
}

}  // namespace eed
