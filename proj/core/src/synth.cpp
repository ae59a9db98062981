#include "eed/synth.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "eed/error.hpp"
#include "eed/text.hpp"

namespace eed {

using nlohmann::json;

const char* to_string(SynthKind k) {
  switch (k) {
    case SynthKind::normal: return "normal";
    case SynthKind::homograph: return "homograph";
    case SynthKind::below_threshold: return "below_threshold";
    case SynthKind::viral: return "viral";
    case SynthKind::short_prevalent: return "short_prevalent";
  }
  return "normal";
}

SynthKind synth_kind_from_string(std::string_view s) {
  if (s == "normal") return SynthKind::normal;
  if (s == "homograph") return SynthKind::homograph;
  if (s == "below_threshold") return SynthKind::below_threshold;
  if (s == "viral") return SynthKind::viral;
  if (s == "short_prevalent") return SynthKind::short_prevalent;
  fail("unknown synthetic entity kind '" + std::string(s) + "'");
}

void SynthConfig::validate() const {
  if (total_entities() <= 0) fail("synthetic corpus config declares zero entities");
  if (normal_entities < 0 || homograph_pairs < 0 || below_threshold_entities < 0 ||
      viral_entities < 0 || short_prevalent_entities < 0)
    fail("entity counts must be non-negative");
  if (fan_out <= k_prime) fail("fan_out must exceed k_prime");
  if (low_fan_out > k_prime) fail("low_fan_out must not exceed k_prime");
  if (trickle > k_prime) fail("trickle must not exceed k_prime");
  if (span_days < 40) fail("emergence span must be at least 40 days");
  if (base_days < 30) fail("base window must be at least 30 days");
  if (eval_homographs > eval_emerging) fail("eval_homographs cannot exceed eval_emerging");
  if (short_prevalent_gap < 1) fail("short_prevalent_gap must be at least 1");
}

namespace {

// All randomness goes through the raw mt19937_64 stream; std distributions
// are avoided so output bytes do not depend on the standard library.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t next() { return eng(); }
  size_t below(size_t n) { return n == 0 ? 0 : static_cast<size_t>(next() % n); }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<size_t>(hi - lo + 1))); }
};

const std::vector<std::vector<std::string>>& emerging_templates() {
  static const std::vector<std::vector<std::string>> t = {
      {"breaking", ":", "<E>", "will", "be", "released", "on", "friday", "!"},
      {"announcing", "<E>", ",", "a", "brand", "new", "project", "launching", "soon"},
      {"just", "revealed", ":", "<E>", "debuts", "next", "month"},
      {"meet", "<E>", ",", "the", "newest", "arrival", "coming", "this", "week"},
      {"official", ":", "<E>", "opens", "its", "doors", "on", "saturday"},
      {"first", "look", "at", "<E>", ",", "arriving", "in", "stores", "soon"},
      {"introducing", "<E>", "to", "the", "world", "today"},
      {"<E>", "has", "been", "announced", "for", "a", "release", "this", "fall"},
  };
  return t;
}

const std::vector<std::vector<std::string>>& prevalent_templates() {
  static const std::vector<std::vector<std::string>> t = {
      {"just", "watched", "<E>", "again", "and", "it", "still", "holds", "up"},
      {"playing", "<E>", "all", "night", "with", "friends"},
      {"had", "a", "great", "time", "at", "<E>", "yesterday"},
      {"<E>", "remains", "my", "favorite", "after", "all", "these", "years"},
      {"listening", "to", "<E>", "on", "repeat", "today"},
      {"cannot", "believe", "how", "popular", "<E>", "is", "these", "days"},
  };
  return t;
}

const std::vector<std::string>& chatter_nouns() {
  static const std::vector<std::string> n = {"movie",  "game", "album", "cafe",
                                             "park",   "book", "show",  "song",
                                             "museum", "team"};
  return n;
}

const std::vector<std::string>& syllables() {
  static const std::vector<std::string> s = {
      "zor", "vex", "qua", "lin", "tam", "rek", "bal", "nov", "mir", "dex",
      "fol", "gri", "hul", "jas", "kel", "pon", "rud", "sel", "tib", "wex"};
  return s;
}

const std::vector<std::string>& second_tokens() {
  static const std::vector<std::string> s = {"Prime", "Nova", "Ultra", "Arc", "One"};
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Surfaces get a globally unique first token, so no surface can occur as a
// token subsequence of another and every mention in the corpus is planted.
std::vector<std::string> make_surface(Rng& rng, std::set<std::string>& used_first) {
  const auto& syl = syllables();
  std::string first;
  while (true) {
    first = syl[rng.below(syl.size())] + syl[rng.below(syl.size())];
    if (rng.below(2) == 0) first += syl[rng.below(syl.size())];
    first = capitalize(first);
    const std::string canon = canonicalize(first);
    if (!used_first.contains(canon)) {
      used_first.insert(canon);
      break;
    }
  }
  std::vector<std::string> surface{first};
  const size_t extra = rng.below(10);
  if (extra >= 5 && extra < 9) {
    surface.push_back(second_tokens()[rng.below(second_tokens().size())]);
  } else if (extra >= 9) {
    surface.push_back(second_tokens()[rng.below(second_tokens().size())]);
    surface.push_back("II");
  }
  return surface;
}

struct PendingPost {
  std::int64_t ts = 0;
  size_t seq = 0;
  bool is_repost = false;
  size_t origin_seq = static_cast<size_t>(-1);
  std::vector<std::string> tokens;
  size_t span_start = 0, span_end = 0;  // entity mention; end == 0 means none
  std::string entity;
  bool emerging_context = false;
};

struct Filled {
  std::vector<std::string> tokens;
  size_t start = 0, end = 0;
};

Filled fill_template(const std::vector<std::string>& tmpl,
                     const std::vector<std::string>& surface) {
  Filled f;
  for (const auto& tok : tmpl) {
    if (tok == "<E>") {
      f.start = f.tokens.size();
      f.tokens.insert(f.tokens.end(), surface.begin(), surface.end());
      f.end = f.tokens.size();
    } else {
      f.tokens.push_back(tok);
    }
  }
  return f;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

class Builder {
 public:
  Builder(std::uint64_t seed, const SynthConfig& cfg) : rng_(seed), cfg_(cfg) {}

  size_t add_post(std::int64_t ts, Filled filled, const std::string& entity,
                  bool emerging_context, size_t origin_seq = static_cast<size_t>(-1)) {
    PendingPost p;
    p.ts = ts;
    p.seq = pending_.size();
    p.is_repost = origin_seq != static_cast<size_t>(-1);
    p.origin_seq = origin_seq;
    if (p.is_repost) {
      p.tokens = {"rt", ":"};
      p.tokens.insert(p.tokens.end(), filled.tokens.begin(), filled.tokens.end());
      if (filled.end > filled.start) {
        p.span_start = filled.start + 2;
        p.span_end = filled.end + 2;
      }
    } else {
      p.tokens = std::move(filled.tokens);
      p.span_start = filled.start;
      p.span_end = filled.end;
    }
    p.entity = entity;
    p.emerging_context = emerging_context;
    pending_.push_back(std::move(p));
    return pending_.back().seq;
  }

  Rng& rng() { return rng_; }
  std::vector<PendingPost>& pending() { return pending_; }

 private:
  Rng rng_;
  SynthConfig cfg_;
  std::vector<PendingPost> pending_;
};

}  // namespace

SynthPaths generate_synthetic_corpus(std::uint64_t seed, const SynthConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  Builder b(seed, cfg);
  Rng& rng = b.rng();
  std::set<std::string> used_first;

  const Instant base_end = add_days(cfg.base_start, cfg.base_days);
  const CorpusWindow base_window{cfg.base_start, base_end};
  const std::int64_t ew_day0 = day_index(base_end);  // first emergence-window day
  const std::int64_t eval_day_index = ew_day0 + cfg.span_days + 40;

  const auto day_ts = [](std::int64_t day, int seconds_into_day) {
    return day * kSecondsPerDay + seconds_into_day;
  };

  // ---- training entities -------------------------------------------------
  struct EntityGen {
    std::vector<std::string> surface;
    SynthKind kind;
    std::int64_t emergence_day = 0;  // absolute day index
    Instant registered_at;
    std::vector<size_t> emerging_seqs;   // planted repost mentions, < registered_at
    std::vector<size_t> prevalent_seqs;  // planted prevalent-era mentions
    size_t base_mentions = 0;
  };
  std::vector<EntityGen> entities;

  const auto plant_entity = [&](SynthKind kind) {
    EntityGen e;
    e.kind = kind;
    e.surface = make_surface(rng, used_first);
    const int offset = rng.range(2, cfg.span_days - 32);
    e.emergence_day = ew_day0 + offset;
    const int lag = rng.range(10, 25);
    e.registered_at = {day_ts(e.emergence_day + lag, rng.range(0, 86399))};

    const auto& etmpl = emerging_templates()[rng.below(emerging_templates().size())];
    const bool with_trickle = kind != SynthKind::below_threshold && rng.below(2) == 0;
    const std::int64_t origin_day =
        (kind == SynthKind::viral) ? e.emergence_day - 1
                                   : (with_trickle ? e.emergence_day - 2 : e.emergence_day);
    const size_t origin_seq = b.add_post(day_ts(origin_day, 6 * 3600 + rng.range(0, 599)),
                                         fill_template(etmpl, e.surface),
                                         join(e.surface), true);

    const auto plant_reposts = [&](std::int64_t day, int count, int hour) {
      for (int i = 0; i < count; ++i) {
        const std::int64_t ts = day_ts(day, hour * 3600 + i * 137 + rng.range(0, 59));
        e.emerging_seqs.push_back(b.add_post(ts, fill_template(etmpl, e.surface),
                                             join(e.surface), true, origin_seq));
      }
    };

    switch (kind) {
      case SynthKind::viral: {
        const int total = cfg.n + cfg.viral_extra;
        const int first = (total + 1) / 2;
        plant_reposts(e.emergence_day, first, 8);
        plant_reposts(e.emergence_day + 1, total - first, 8);
        break;
      }
      case SynthKind::below_threshold:
        plant_reposts(e.emergence_day, cfg.low_fan_out, 8);
        plant_reposts(e.emergence_day + 1, 2, 9);
        break;
      default:
        if (with_trickle) plant_reposts(e.emergence_day - 2, cfg.trickle, 9);
        plant_reposts(e.emergence_day, cfg.fan_out, 8);
        break;
    }

    if (kind == SynthKind::homograph) {
      // prevalent usage of the same surface throughout the base year
      e.base_mentions = static_cast<size_t>(cfg.k) + 2;
      for (size_t i = 0; i < e.base_mentions; ++i) {
        const std::int64_t day =
            day_index(cfg.base_start) + 3 + static_cast<std::int64_t>(i) *
                                                (cfg.base_days - 6) /
                                                static_cast<std::int64_t>(e.base_mentions);
        const auto& ptmpl = prevalent_templates()[rng.below(prevalent_templates().size())];
        b.add_post(day_ts(day, 12 * 3600 + rng.range(0, 3599)),
                   fill_template(ptmpl, e.surface), join(e.surface), false);
      }
    }
    entities.push_back(std::move(e));
  };

  for (int i = 0; i < cfg.normal_entities; ++i) plant_entity(SynthKind::normal);
  for (int i = 0; i < cfg.homograph_pairs; ++i) plant_entity(SynthKind::homograph);
  for (int i = 0; i < cfg.below_threshold_entities; ++i) plant_entity(SynthKind::below_threshold);
  for (int i = 0; i < cfg.viral_entities; ++i) plant_entity(SynthKind::viral);
  for (int i = 0; i < cfg.short_prevalent_entities; ++i) plant_entity(SynthKind::short_prevalent);

  // ---- expected dataset, derived from the plan ---------------------------
  auto& pending = b.pending();
  struct Expectation {
    std::string burst_day;
    std::vector<size_t> emerging;   // seqs
    std::vector<size_t> prevalent;  // seqs
    bool in_dataset = false;
  };
  std::vector<Expectation> expect(entities.size());

  for (size_t ei = 0; ei < entities.size(); ++ei) {
    auto& e = entities[ei];
    auto& x = expect[ei];
    std::map<std::int64_t, int> per_day;
    std::vector<size_t> sorted = e.emerging_seqs;
    std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
      return pending[a].ts != pending[b].ts ? pending[a].ts < pending[b].ts
                                            : pending[a].seq < pending[b].seq;
    });
    for (size_t s : sorted)
      if (Instant{pending[s].ts} < e.registered_at) ++per_day[day_index({pending[s].ts})];
    std::int64_t burst = 0;
    bool found = false;
    for (const auto& [day, count] : per_day)
      if (count > cfg.k_prime) {
        burst = day;
        found = true;
        break;
      }
    if (!found) continue;
    x.burst_day = format_date(instant_from_day(burst));
    for (size_t s : sorted) {
      if (pending[s].ts < burst * kSecondsPerDay) continue;
      if (!(Instant{pending[s].ts} < e.registered_at)) continue;
      x.emerging.push_back(s);
      if (x.emerging.size() >= static_cast<size_t>(cfg.n)) break;
    }
    if (x.emerging.empty()) continue;
    if (e.kind == SynthKind::homograph) continue;  // k-excluded, never a candidate

    // plant prevalent mentions one year after the last collected context
    const std::int64_t last_ts = pending[x.emerging.back()].ts;
    const int needed = static_cast<int>(x.emerging.size());
    const int planted = e.kind == SynthKind::short_prevalent
                            ? std::max(0, needed - cfg.short_prevalent_gap)
                            : needed + cfg.prevalent_spare;
    const std::int64_t start_day = day_index({last_ts + cfg.prevalent_offset}) + 1;
    for (int i = 0; i < planted; ++i) {
      const auto& ptmpl = prevalent_templates()[rng.below(prevalent_templates().size())];
      const std::int64_t ts =
          day_ts(start_day + i % 20, 10 * 3600 + (i / 20) * 977 + rng.range(0, 59));
      e.prevalent_seqs.push_back(
          b.add_post(ts, fill_template(ptmpl, e.surface), join(e.surface), false));
    }
    std::sort(e.prevalent_seqs.begin(), e.prevalent_seqs.end(), [&](size_t a, size_t bb) {
      return pending[a].ts != pending[bb].ts ? pending[a].ts < pending[bb].ts
                                             : pending[a].seq < pending[bb].seq;
    });
    if (planted >= needed) {
      x.in_dataset = true;
      x.prevalent.assign(e.prevalent_seqs.begin(), e.prevalent_seqs.begin() + needed);
    }
  }

  // ---- background chatter -------------------------------------------------
  const auto add_chatter = [&](std::int64_t day) {
    const auto& ptmpl = prevalent_templates()[rng.below(prevalent_templates().size())];
    const std::vector<std::string> noun{chatter_nouns()[rng.below(chatter_nouns().size())]};
    Filled f = fill_template(ptmpl, noun);
    f.start = f.end = 0;  // not an entity mention
    b.add_post(day_ts(day, 13 * 3600 + rng.range(0, 7199)), std::move(f), "", false);
  };
  for (int i = 0; i < cfg.chatter_posts; ++i)
    add_chatter(day_index(cfg.base_start) + rng.range(1, cfg.base_days - 2));
  // sentinels pinning the availability span
  add_chatter(day_index(cfg.base_start));
  add_chatter(ew_day0 + cfg.span_days + 370 + 30);

  // ---- eval day ------------------------------------------------------------
  std::vector<SynthEvalEntity> eval_entities;
  std::vector<PendingPost> eval_pending;
  std::vector<KBEntity> extra_kb;

  const auto add_eval_post = [&](std::int64_t ts, Filled filled, const std::string& entity,
                                 bool emerging_context, bool repost) {
    PendingPost p;
    p.ts = ts;
    p.seq = eval_pending.size();
    p.is_repost = repost;
    if (repost) {
      p.tokens = {"rt", ":"};
      p.tokens.insert(p.tokens.end(), filled.tokens.begin(), filled.tokens.end());
    } else {
      p.tokens = std::move(filled.tokens);
    }
    p.entity = entity;
    p.emerging_context = emerging_context;
    eval_pending.push_back(std::move(p));
  };

  for (int i = 0; i < cfg.eval_emerging; ++i) {
    SynthEvalEntity ee;
    const auto surface = make_surface(rng, used_first);
    ee.surface = join(surface);
    ee.emerging = true;
    ee.pre_registered = i < cfg.eval_homographs;
    if (ee.pre_registered) {
      // pre-registered long before the eval day, so the KB baseline must
      // classify it as non-emerging
      KBEntity kb_row{ee.surface,
                      {day_ts(day_index(cfg.base_start) + 10 + i, 3600)},
                      false,
                      false};
      extra_kb.push_back(kb_row);
    }
    const auto& etmpl = emerging_templates()[rng.below(emerging_templates().size())];
    const int base_sec = 7 * 3600 + i * 577;
    add_eval_post(day_ts(eval_day_index, base_sec), fill_template(etmpl, surface), ee.surface,
                  true, false);
    for (int r = 0; r < cfg.eval_reposts_per_entity; ++r)
      add_eval_post(day_ts(eval_day_index, base_sec + 120 + r * 97 + rng.range(0, 30)),
                    fill_template(etmpl, surface), ee.surface, true, true);
    eval_entities.push_back(std::move(ee));
  }

  // distractor surfaces: the training homographs plus fresh pre-registered ones
  std::vector<std::vector<std::string>> distractor_surfaces;
  for (const auto& e : entities)
    if (e.kind == SynthKind::homograph) distractor_surfaces.push_back(e.surface);
  const int fresh_distractors = 15;
  for (int i = 0; i < fresh_distractors; ++i) {
    const auto surface = make_surface(rng, used_first);
    extra_kb.push_back({join(surface),
                        {day_ts(day_index(cfg.base_start) + 40 + i, 7200)},
                        false,
                        false});
    distractor_surfaces.push_back(surface);
  }
  for (const auto& s : distractor_surfaces) {
    SynthEvalEntity ee;
    ee.surface = join(s);
    ee.emerging = false;
    ee.pre_registered = true;
    eval_entities.push_back(std::move(ee));
  }
  // training normal surfaces appear as prevalent distractor mentions too
  std::vector<std::vector<std::string>> normal_surfaces;
  for (const auto& e : entities)
    if (e.kind == SynthKind::normal) normal_surfaces.push_back(e.surface);
  for (const auto& e : entities)
    if (e.kind == SynthKind::normal) {
      SynthEvalEntity ee;
      ee.surface = join(e.surface);
      ee.emerging = false;
      ee.pre_registered = true;  // registered during the emergence window, so in the KB
      eval_entities.push_back(std::move(ee));
    }

  for (int i = 0; i < cfg.eval_distractors; ++i) {
    const bool use_normal = i % 5 < 3 && !normal_surfaces.empty();
    const auto& surface = use_normal
                              ? normal_surfaces[static_cast<size_t>(i) % normal_surfaces.size()]
                              : distractor_surfaces[static_cast<size_t>(i) %
                                                    distractor_surfaces.size()];
    const auto& ptmpl = prevalent_templates()[rng.below(prevalent_templates().size())];
    add_eval_post(day_ts(eval_day_index, 9 * 3600 + i * 311 + rng.range(0, 59)),
                  fill_template(ptmpl, surface), join(surface), false, i % 3 == 0);
  }

  // ---- finalize posts: sort, assign ids, emit ------------------------------
  const auto finalize = [](std::vector<PendingPost>& pp, const std::string& prefix) {
    std::vector<size_t> order(pp.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t bb) {
      return pp[a].ts != pp[bb].ts ? pp[a].ts < pp[bb].ts : pp[a].seq < pp[bb].seq;
    });
    std::vector<std::string> seq_to_id(pp.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%s%06zu", prefix.c_str(), rank);
      seq_to_id[pp[order[rank]].seq] = buf;
    }
    std::vector<Post> posts;
    std::vector<GoldSpan> gold;
    posts.reserve(pp.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
      const PendingPost& src = pp[order[rank]];
      Post p;
      p.id = seq_to_id[src.seq];
      p.timestamp = {src.ts};
      p.tokens = src.tokens;
      p.is_repost = src.is_repost;
      if (src.is_repost && src.origin_seq != static_cast<size_t>(-1))
        p.original_id = seq_to_id[src.origin_seq];
      posts.push_back(std::move(p));
      if (src.emerging_context && src.span_end > src.span_start)
        gold.push_back({seq_to_id[src.seq], src.span_start, src.span_end, src.entity});
    }
    return std::tuple{std::move(posts), std::move(gold), std::move(seq_to_id)};
  };

  auto [posts, gold, seq_to_id] = finalize(pending, "p");
  auto [eval_posts, eval_gold, eval_ids] = finalize(eval_pending, "e");
  (void)eval_gold;

  // ---- KB ------------------------------------------------------------------
  std::vector<KBEntity> kb;
  for (const auto& e : entities) kb.push_back({join(e.surface), e.registered_at, false, false});
  for (const auto& row : extra_kb) kb.push_back(row);
  {  // noise rows: redirects, disambiguations, early registrations
    std::set<std::string> throwaway;
    for (int i = 0; i < 3; ++i)
      kb.push_back({join(make_surface(rng, used_first)),
                    {day_ts(ew_day0 + 5 + i, 3600)},
                    true,
                    false});
    for (int i = 0; i < 2; ++i)
      kb.push_back({join(make_surface(rng, used_first)),
                    {day_ts(ew_day0 + 8 + i, 3600)},
                    false,
                    true});
    for (int i = 0; i < 2; ++i)  // registered inside the base window
      kb.push_back({join(make_surface(rng, used_first)),
                    {day_ts(day_index(cfg.base_start) + 100 + i, 3600)},
                    false,
                    false});
  }
  std::sort(kb.begin(), kb.end(),
            [](const KBEntity& a, const KBEntity& b) { return a.title < b.title; });

  // ---- plan ------------------------------------------------------------------
  SynthPlan plan;
  plan.seed = seed;
  plan.base_window = base_window;
  plan.eval_day = format_date(instant_from_day(eval_day_index));
  for (size_t ei = 0; ei < entities.size(); ++ei) {
    const auto& e = entities[ei];
    const auto& x = expect[ei];
    SynthEntityPlan p;
    p.surface = join(e.surface);
    p.kind = e.kind;
    p.registered_at = e.registered_at;
    p.burst_day = x.burst_day;
    p.base_mentions = e.base_mentions;
    p.expected_in_dataset = x.in_dataset;
    if (x.in_dataset) {
      for (size_t s : x.emerging) p.expected_emerging_ids.push_back(seq_to_id[s]);
      for (size_t s : x.prevalent) p.expected_prevalent_ids.push_back(seq_to_id[s]);
    }
    plan.entities.push_back(std::move(p));
  }
  std::sort(plan.entities.begin(), plan.entities.end(),
            [](const SynthEntityPlan& a, const SynthEntityPlan& b) {
              return a.surface < b.surface;
            });
  plan.eval_entities = std::move(eval_entities);
  std::sort(plan.eval_entities.begin(), plan.eval_entities.end(),
            [](const SynthEvalEntity& a, const SynthEvalEntity& b) {
              return a.surface < b.surface;
            });

  // ---- write artifacts --------------------------------------------------------
  SynthPaths paths;
  paths.posts = out_dir / "posts.jsonl";
  paths.kb = out_dir / "kb.tsv";
  paths.gold_spans = out_dir / "gold_spans.jsonl";
  paths.plan = out_dir / "plan.json";
  paths.eval_posts = out_dir / "eval_posts.jsonl";

  save_posts(paths.posts, posts);
  save_kb(paths.kb, kb);
  save_gold_spans(paths.gold_spans, gold);
  save_posts(paths.eval_posts, eval_posts);

  json j;
  j["seed"] = plan.seed;
  j["base_window"] = {{"start", format_rfc3339(plan.base_window.start)},
                      {"end", format_rfc3339(plan.base_window.end)}};
  j["eval_day"] = plan.eval_day;
  json ents = json::array();
  for (const auto& e : plan.entities) {
    json je;
    je["surface"] = e.surface;
    je["kind"] = to_string(e.kind);
    je["registered_at"] = format_rfc3339(e.registered_at);
    je["burst_day"] = e.burst_day;
    je["base_mentions"] = e.base_mentions;
    je["expected_in_dataset"] = e.expected_in_dataset;
    je["expected_emerging_ids"] = e.expected_emerging_ids;
    je["expected_prevalent_ids"] = e.expected_prevalent_ids;
    ents.push_back(std::move(je));
  }
  j["entities"] = std::move(ents);
  json evals = json::array();
  for (const auto& e : plan.eval_entities) {
    json je;
    je["surface"] = e.surface;
    je["emerging"] = e.emerging;
    je["pre_registered"] = e.pre_registered;
    evals.push_back(std::move(je));
  }
  j["eval_entities"] = std::move(evals);
  std::ofstream out(paths.plan);
  if (!out) fail("cannot open '" + paths.plan.string() + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) fail("write to '" + paths.plan.string() + "' failed");

  return paths;
}

SynthPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open plan file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("plan file '" + path.string() + "': " + e.what());
  }
  SynthPlan plan;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.base_window.start = parse_instant(j.at("base_window").at("start").get<std::string>());
  plan.base_window.end = parse_instant(j.at("base_window").at("end").get<std::string>());
  plan.eval_day = j.at("eval_day").get<std::string>();
  for (const auto& je : j.at("entities")) {
    SynthEntityPlan e;
    e.surface = je.at("surface").get<std::string>();
    e.kind = synth_kind_from_string(je.at("kind").get<std::string>());
    e.registered_at = parse_instant(je.at("registered_at").get<std::string>());
    e.burst_day = je.at("burst_day").get<std::string>();
    e.base_mentions = je.at("base_mentions").get<size_t>();
    e.expected_in_dataset = je.at("expected_in_dataset").get<bool>();
    e.expected_emerging_ids =
        je.at("expected_emerging_ids").get<std::vector<std::string>>();
    e.expected_prevalent_ids =
        je.at("expected_prevalent_ids").get<std::vector<std::string>>();
    plan.entities.push_back(std::move(e));
  }
  for (const auto& je : j.at("eval_entities")) {
    SynthEvalEntity e;
    e.surface = je.at("surface").get<std::string>();
    e.emerging = je.at("emerging").get<bool>();
    e.pre_registered = je.at("pre_registered").get<bool>();
    plan.eval_entities.push_back(std::move(e));
  }
  return plan;
}

}  // namespace eed
