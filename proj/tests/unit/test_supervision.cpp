#include <doctest.h>

#include <filesystem>

#include "eed/error.hpp"
#include "eed/supervision.hpp"

using namespace eed;

namespace {

Post mk(const std::string& id, const std::string& ts, std::vector<std::string> tokens,
        bool repost = false) {
  Post p;
  p.id = id;
  p.timestamp = parse_instant(ts);
  p.tokens = std::move(tokens);
  p.is_repost = repost;
  if (repost) p.original_id = "o";
  return p;
}

SupervisionConfig config_2012() {
  SupervisionConfig cfg;
  cfg.base_window = {parse_instant("2012-01-01"), parse_instant("2013-01-01")};
  return cfg;
}

KBEntity entity(const std::string& title, const std::string& registered) {
  return {title, parse_instant(registered), false, false};
}

}  // namespace

TEST_CASE("collect_candidates: availability span, base precedence, k cap") {
  const auto cfg = config_2012();
  std::vector<Post> posts;
  posts.push_back(mk("p0", "2012-01-01T00:00:00Z", {"start"}));
  // 6 base-window mentions of "Busy" (k = 5 excludes it)
  for (int i = 0; i < 6; ++i)
    posts.push_back(mk("b" + std::to_string(i), "2012-03-0" + std::to_string(i + 1),
                       {"about", "Busy", "today"}));
  posts.push_back(mk("tail", "2013-12-31T00:00:00Z", {"end"}));

  const std::vector<KBEntity> kb{
      entity("Fresh", "2013-06-01"),       // 0 base mentions, in span
      entity("Busy", "2013-06-01"),        // 6 base mentions > k
      entity("Early", "2012-06-01"),       // registered inside the base window
      entity("Late", "2014-06-01"),        // registered after the stream ends
  };
  const auto candidates = collect_candidates(kb, posts, cfg);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].title == "Fresh");
}

TEST_CASE("collect_candidates: exactly k mentions is still included") {
  const auto cfg = config_2012();
  std::vector<Post> posts;
  posts.push_back(mk("p0", "2012-01-01", {"start"}));
  for (int i = 0; i < 5; ++i)
    posts.push_back(
        mk("b" + std::to_string(i), "2012-03-0" + std::to_string(i + 1), {"Edge", "case"}));
  posts.push_back(mk("tail", "2013-12-31", {"end"}));
  const std::vector<KBEntity> kb{entity("Edge", "2013-06-01")};
  const auto candidates = collect_candidates(kb, posts, cfg);
  CHECK(candidates.size() == 1);  // "more than k" is strict
}

TEST_CASE("collect_emerging_contexts: day selection, n cap, repost filter") {
  auto cfg = config_2012();
  cfg.k_prime = 10;
  cfg.n = 20;
  const auto e = entity("Zorq", "2013-01-20");

  // reposts per day [3, 11, 50] on Jan 10/11/12; registration after day 3
  std::vector<Post> posts;
  int id = 0;
  const auto add_day = [&](const char* day, int count, bool repost) {
    for (int i = 0; i < count; ++i) {
      Post p = mk("r" + std::to_string(id++),
                  std::string(day) + "T08:" + (i < 10 ? "0" : "") + std::to_string(i) +
                      ":00Z",
                  {"rt", "new", "Zorq", "soon"}, repost);
      posts.push_back(std::move(p));
    }
  };
  add_day("2013-01-10", 3, true);
  add_day("2013-01-11", 11, true);
  add_day("2013-01-12", 50, true);

  const auto emerging = collect_emerging_contexts(e, posts, cfg);
  REQUIRE(emerging.size() == 20);  // n cap
  // starts on day 2 (the first day whose repost count exceeds k')
  CHECK(day_index(emerging.front().timestamp) == day_index(parse_instant("2013-01-11")));
  // 11 from day 2, then 9 from day 3
  size_t day2 = 0;
  for (const auto& p : emerging)
    if (day_index(p.timestamp) == day_index(parse_instant("2013-01-11"))) ++day2;
  CHECK(day2 == 11);
}

TEST_CASE("collect_emerging_contexts: filter that never fires yields empty") {
  auto cfg = config_2012();
  const auto e = entity("Quiet", "2013-01-20");
  std::vector<Post> posts;
  for (int d = 0; d < 5; ++d)
    for (int i = 0; i < 10; ++i)  // exactly k' = 10, never strictly more
      posts.push_back(mk("q" + std::to_string(d * 10 + i),
                         "2013-01-1" + std::to_string(d) + "T09:0" + std::to_string(i % 10) +
                             ":00Z",
                         {"rt", "Quiet", "spotted"}, true));
  CHECK(collect_emerging_contexts(e, posts, cfg).empty());
}

TEST_CASE("collect_emerging_contexts: non-reposts and post-registration posts ignored") {
  auto cfg = config_2012();
  const auto e = entity("Zorq", "2013-01-12");
  std::vector<Post> posts;
  for (int i = 0; i < 12; ++i)  // 12 > k' but none are reposts
    posts.push_back(mk("n" + std::to_string(i), "2013-01-10T08:0" + std::to_string(i % 10) +
                                                    ":00Z",
                       {"Zorq", "everywhere"}, false));
  CHECK(collect_emerging_contexts(e, posts, cfg).empty());
  // 12 reposts but all on/after registration day boundary
  posts.clear();
  for (int i = 0; i < 12; ++i)
    posts.push_back(mk("r" + std::to_string(i),
                       "2013-01-12T08:0" + std::to_string(i % 10) + ":00Z",
                       {"rt", "Zorq", "everywhere"}, true));
  CHECK(collect_emerging_contexts(e, posts, cfg).empty());
}

TEST_CASE("collect_prevalent_contexts: first |emerging| mentions after the offset") {
  auto cfg = config_2012();
  cfg.prevalent_offset = 365 * kSecondsPerDay;
  const auto e = entity("Zorq", "2013-02-01");
  std::vector<Post> emerging;
  for (int i = 0; i < 5; ++i)
    emerging.push_back(mk("e" + std::to_string(i), "2013-01-10T08:0" + std::to_string(i) +
                                                       ":00Z",
                          {"rt", "Zorq", "soon"}, true));
  std::vector<Post> posts = emerging;
  // 7 later mentions starting one year + a day after the last emerging post
  for (int i = 0; i < 7; ++i)
    posts.push_back(mk("l" + std::to_string(i),
                       "2014-01-1" + std::to_string(1 + i) + "T10:00:00Z",
                       {"playing", "Zorq", "again"}));
  const auto prevalent = collect_prevalent_contexts(e, posts, emerging, cfg);
  REQUIRE(prevalent.size() == 5);  // the first 5 of the 7
  CHECK(prevalent.front().id == "l0");
  CHECK(prevalent.back().id == "l4");

  // mentions before the offset boundary are not eligible
  std::vector<Post> early = emerging;
  for (int i = 0; i < 7; ++i)
    early.push_back(mk("x" + std::to_string(i), "2013-06-0" + std::to_string(1 + i),
                       {"Zorq", "still", "around"}));
  CHECK(collect_prevalent_contexts(e, early, emerging, cfg).empty());
}

TEST_CASE("build_dataset balances polarities and tags only the target entity") {
  auto cfg = config_2012();
  cfg.k_prime = 2;
  cfg.n = 5;
  std::vector<Post> posts;
  posts.push_back(mk("p0", "2012-01-01", {"start"}));
  // shared post mentioning both entities in an emerging context
  for (int i = 0; i < 3; ++i)
    posts.push_back(mk("s" + std::to_string(i), "2013-01-10T08:0" + std::to_string(i) +
                                                    ":00Z",
                       {"rt", "Alpha", "and", "Beta", "launch", "soon"}, true));
  // prevalent mentions a year later for both
  for (int i = 0; i < 3; ++i)
    posts.push_back(mk("q" + std::to_string(i),
                       "2014-01-2" + std::to_string(i) + "T10:00:00Z",
                       {"enjoying", "Alpha", "and", "Beta", "today"}));
  const std::vector<KBEntity> kb{entity("Alpha", "2013-02-01"),
                                 entity("Beta", "2013-02-01")};
  const auto dataset = build_dataset(kb, posts, cfg);
  REQUIRE(dataset.size() == 12);  // 2 entities x (3 emerging + 3 prevalent)

  size_t emerging_count = 0;
  for (const auto& ex : dataset) {
    ex.validate();
    if (ex.polarity == Polarity::emerging) {
      ++emerging_count;
      size_t non_o = 0;
      for (size_t t = 0; t < ex.tags.size(); ++t)
        if (ex.tags[t] != BioesTag::O) {
          ++non_o;
          CHECK(ex.tokens[t] == (ex.entity == "Alpha" ? "Alpha" : "Beta"));
        }
      CHECK(non_o == 1);  // only its own single-token span
    } else {
      for (BioesTag t : ex.tags) CHECK(t == BioesTag::O);
    }
  }
  CHECK(emerging_count == 6);
  // deterministic ordering: entity title, emerging then prevalent, by time
  CHECK(dataset[0].entity == "Alpha");
  CHECK(dataset[6].entity == "Beta");
  CHECK(dataset[0].polarity == Polarity::emerging);
  CHECK(dataset[3].polarity == Polarity::prevalent);
}

TEST_CASE("build_dataset drops entities with short prevalent harvests") {
  auto cfg = config_2012();
  cfg.k_prime = 2;
  std::vector<Post> posts;
  posts.push_back(mk("p0", "2012-01-01", {"start"}));
  for (int i = 0; i < 4; ++i)
    posts.push_back(mk("s" + std::to_string(i), "2013-01-10T08:0" + std::to_string(i) +
                                                    ":00Z",
                       {"rt", "Gone", "arrives"}, true));
  posts.push_back(mk("late", "2014-03-01", {"Gone", "once"}));  // only 1 < 4 needed
  const std::vector<KBEntity> kb{entity("Gone", "2013-02-01")};
  const auto dataset = build_dataset(kb, posts, cfg);
  CHECK(dataset.empty());
}

TEST_CASE("dataset serialization round trip and validation") {
  LabeledExample ex;
  ex.post_id = "p1";
  ex.tokens = {"new", "Zorq", "today"};
  ex.tags = {BioesTag::O, BioesTag::S, BioesTag::O};
  ex.polarity = Polarity::emerging;
  ex.entity = "Zorq";
  const auto path = std::filesystem::temp_directory_path() / "eed_test_dataset.jsonl";
  save_dataset(path, std::vector<LabeledExample>{ex});
  const auto loaded = load_dataset(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0] == ex);

  LabeledExample bad = ex;
  bad.polarity = Polarity::prevalent;  // prevalent with a non-O tag
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("split_dev is a deterministic 90/10 split") {
  std::vector<LabeledExample> dataset(100);
  for (size_t i = 0; i < dataset.size(); ++i) {
    dataset[i].post_id = std::to_string(i);
    dataset[i].tokens = {"x"};
    dataset[i].tags = {BioesTag::O};
  }
  const auto [train, dev] = split_dev(dataset);
  CHECK(train.size() == 90);
  CHECK(dev.size() == 10);
  CHECK(dev[0].post_id == "9");
  CHECK(dev[9].post_id == "99");
}
