#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "eed/error.hpp"
#include "eed/evaluation.hpp"

using namespace eed;

namespace {

Detection det(const std::string& surface, double conf, const std::string& ts,
              const std::string& post_id = "p") {
  Detection d;
  d.post_id = post_id;
  d.surface = surface;
  d.confidence = conf;
  d.timestamp = parse_instant(ts);
  d.end = 1;
  return d;
}

}  // namespace

TEST_CASE("rank_daily aggregates by max confidence with lexicographic ties") {
  const CivilDate day{2013, 5, 10};
  std::vector<Detection> dets{det("X", 0.3, "2013-05-10T10:00:00Z", "a"),
                              det("X", 0.9, "2013-05-10T11:00:00Z", "b"),
                              det("bb", 0.5, "2013-05-10T09:00:00Z", "c"),
                              det("aa", 0.5, "2013-05-10T09:30:00Z", "d"),
                              det("low", 0.2, "2013-05-10T09:00:00Z", "e")};
  const auto ranking = rank_daily(dets, day);
  REQUIRE(ranking.size() == 4);
  CHECK(ranking[0].surface == "x");
  CHECK(ranking[0].score == 0.9);
  CHECK(ranking[0].first_detection == parse_instant("2013-05-10T10:00:00Z"));
  CHECK(ranking[0].supporting_post_ids == std::vector<std::string>{"a", "b"});
  CHECK(ranking[1].surface == "aa");  // 0.5 tie broken lexicographically
  CHECK(ranking[2].surface == "bb");
  CHECK(ranking[3].surface == "low");
  CHECK(rank_daily({}, day).empty());
  CHECK_THROWS_AS(rank_daily(std::vector<Detection>{det("y", 0.1, "2013-05-11T00:00:00Z")},
                             day),
                  Error);
}

TEST_CASE("precision_at_k fixtures") {
  std::vector<RankedEntity> ranking(4);
  ranking[0].surface = "a";
  ranking[1].surface = "b";
  ranking[2].surface = "c";
  ranking[3].surface = "d";
  const std::map<std::string, bool> judgments{
      {"a", true}, {"b", true}, {"c", false}, {"d", true}};
  const auto curve = precision_at_k(ranking, judgments, 10);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0] == std::pair<size_t, double>{1, 1.0});
  CHECK(curve[2].second == doctest::Approx(2.0 / 3.0));
  CHECK(curve[3].second == doctest::Approx(0.75));

  SUBCASE("all true") {
    std::map<std::string, bool> all_true;
    for (const auto& r : ranking) all_true[r.surface] = true;
    for (const auto& [k, p] : precision_at_k(ranking, all_true, 4)) CHECK(p == 1.0);
  }
  SUBCASE("missing judgment names the surface") {
    std::map<std::string, bool> partial{{"a", true}};
    try {
      precision_at_k(ranking, partial, 4);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
  }
  SUBCASE("invariant under reranking within a constant-judgment tie group") {
    std::swap(ranking[0], ranking[1]);  // a and b are both true
    const auto swapped = precision_at_k(ranking, judgments, 10);
    for (size_t i = 0; i < curve.size(); ++i) CHECK(swapped[i].second == curve[i].second);
  }
}

TEST_CASE("build_reference applies both mention-count constraints") {
  const CorpusWindow base{parse_instant("2012-01-01"), parse_instant("2013-01-01")};
  const CorpusWindow eval{parse_instant("2013-01-01"), parse_instant("2014-01-01")};
  std::vector<Post> posts;
  int id = 0;
  const auto add = [&](const std::string& day, const std::string& token, bool repost) {
    Post p;
    p.id = "p" + std::to_string(id++);
    p.timestamp = parse_instant(day);
    p.tokens = {"about", token, "here"};
    p.is_repost = repost;
    if (repost) p.original_id = "o";
    posts.push_back(std::move(p));
  };
  // "Keeper": 4 eval mentions (threshold 3 exclusive), 1 base mention (cap 2)
  add("2012-05-01", "Keeper", false);
  for (int i = 0; i < 4; ++i) add("2013-03-0" + std::to_string(i + 1), "Keeper", i % 2 == 0);
  // "TooProlific": fails the base cap
  for (int i = 0; i < 3; ++i) add("2012-06-0" + std::to_string(i + 1), "TooProlific", false);
  for (int i = 0; i < 4; ++i)
    add("2013-04-0" + std::to_string(i + 1), "TooProlific", false);
  // "TooQuiet": not enough eval mentions
  for (int i = 0; i < 3; ++i) add("2013-05-0" + std::to_string(i + 1), "TooQuiet", false);
  std::sort(posts.begin(), posts.end(),
            [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });

  const std::vector<KBEntity> kb{{"Keeper", parse_instant("2013-06-01"), false, false},
                                 {"TooProlific", parse_instant("2013-06-01"), false, false},
                                 {"TooQuiet", parse_instant("2013-06-01"), false, false}};
  const auto reference = build_reference(posts, kb, eval, base, 3, 2);
  REQUIRE(reference.size() == 1);
  CHECK(reference[0].surface == "keeper");
  CHECK(reference[0].eval_mention_count == 4);
  CHECK(reference[0].base_mention_count == 1);
  CHECK(reference[0].first_appearance == parse_instant("2013-03-01"));
  CHECK(reference[0].repost_post_ids.size() == 2);  // the repost mentions
}

TEST_CASE("relative recall") {
  std::vector<ReferenceEntity> reference(5);
  const char* names[] = {"a", "b", "c", "d", "e"};
  for (int i = 0; i < 5; ++i) reference[i].surface = names[i];
  CHECK(relative_recall({"a", "b", "c", "d", "e", "extra"}, reference) == 1.0);
  CHECK(relative_recall({"zzz"}, reference) == 0.0);
  CHECK(relative_recall({"a", "B", "c", "d"}, reference) == doctest::Approx(0.8));
  CHECK_THROWS_AS(relative_recall({"a"}, {}), Error);
}

TEST_CASE("lead time statistics") {
  SUBCASE("calendar fixture: 2013-01-01 to 2013-03-01 is 59 days") {
    std::vector<ReferenceEntity> ref(1);
    ref[0].surface = "x";
    ref[0].registered_at = parse_instant("2013-03-01");
    const std::map<std::string, Instant> det{{"x", parse_instant("2013-01-01")}};
    const auto stats = lead_time_stats(det, ref);
    CHECK(stats.mean_days == doctest::Approx(59.0));
    CHECK(stats.median_days == 59);
    CHECK(stats.fraction_earlier == 1.0);
  }
  SUBCASE("leads [10, 20, 400]") {
    std::vector<ReferenceEntity> ref(3);
    std::map<std::string, Instant> det;
    const int leads[] = {10, 20, 400};
    for (int i = 0; i < 3; ++i) {
      ref[i].surface = "e" + std::to_string(i);
      det["e" + std::to_string(i)] = parse_instant("2013-01-01");
      ref[i].registered_at = add_days(parse_instant("2013-01-01"), leads[i]);
    }
    const auto stats = lead_time_stats(det, ref);
    CHECK(stats.mean_days == doctest::Approx(430.0 / 3.0));
    CHECK(stats.median_days == 20);
    CHECK(stats.fraction_earlier == 1.0);
  }
  SUBCASE("negative lead counts against fraction_earlier") {
    std::vector<ReferenceEntity> ref(2);
    std::map<std::string, Instant> det;
    ref[0].surface = "late";
    ref[0].registered_at = parse_instant("2013-01-01");
    det["late"] = parse_instant("2013-02-01");  // detected after registration
    ref[1].surface = "early";
    ref[1].registered_at = parse_instant("2013-03-01");
    det["early"] = parse_instant("2013-01-01");
    auto stats = lead_time_stats(det, ref);
    CHECK(stats.fraction_earlier == doctest::Approx(0.5));
    CHECK(stats.median_days == -31);  // lower central value of {-31, 59}
    stats = lead_time_stats(det, ref, true);
    CHECK(stats.mean_days == doctest::Approx(59.0));  // negative lead excluded
    CHECK(stats.fraction_earlier == doctest::Approx(0.5));
  }
  SUBCASE("even count takes the lower central value") {
    std::vector<ReferenceEntity> ref(4);
    std::map<std::string, Instant> det;
    const int leads[] = {1, 5, 9, 100};
    for (int i = 0; i < 4; ++i) {
      ref[i].surface = "e" + std::to_string(i);
      det["e" + std::to_string(i)] = parse_instant("2013-01-01");
      ref[i].registered_at = add_days(parse_instant("2013-01-01"), leads[i]);
    }
    CHECK(lead_time_stats(det, ref).median_days == 5);
  }
  SUBCASE("surface missing from the reference is an error") {
    std::vector<ReferenceEntity> ref(1);
    ref[0].surface = "known";
    const std::map<std::string, Instant> det{{"unknown", parse_instant("2013-01-01")}};
    CHECK_THROWS_AS(lead_time_stats(det, ref), Error);
  }
}

TEST_CASE("independent streaming recomputation matches the batch lead stats") {
  std::vector<ReferenceEntity> ref;
  std::map<std::string, Instant> det;
  std::mt19937_64 rng(71);
  for (int i = 0; i < 31; ++i) {
    ReferenceEntity r;
    r.surface = "e" + std::to_string(i);
    const Instant d = add_days(parse_instant("2013-01-01"), static_cast<int>(rng() % 200));
    r.registered_at = add_days(d, static_cast<int>(rng() % 900) - 100);
    ref.push_back(r);
    det[r.surface] = d;
  }
  const auto batch = lead_time_stats(det, ref);
  // streaming pass: running sum and insertion-sorted leads
  std::vector<std::int64_t> sorted;
  double sum = 0.0;
  size_t earlier = 0;
  for (const auto& r : ref) {
    const std::int64_t lead = (r.registered_at.sec - det[r.surface].sec) / kSecondsPerDay;
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), lead), lead);
    sum += static_cast<double>(lead);
    if (lead > 0) ++earlier;
  }
  CHECK(batch.mean_days == sum / static_cast<double>(sorted.size()));
  CHECK(batch.median_days == sorted[(sorted.size() - 1) / 2]);
  CHECK(batch.fraction_earlier ==
        static_cast<double>(earlier) / static_cast<double>(ref.size()));
}

TEST_CASE("fleiss kappa") {
  SUBCASE("unanimous items across two categories give 1") {
    const std::vector<std::vector<size_t>> ratings{{3, 0}, {0, 3}, {3, 0}};
    CHECK(fleiss_kappa(ratings, 3) == doctest::Approx(1.0));
  }
  SUBCASE("hand-checked fixture evaluates to exactly 0.625") {
    const std::vector<std::vector<size_t>> ratings{{3, 0}, {0, 3}, {3, 0}, {2, 1}};
    CHECK(fleiss_kappa(ratings, 3) == doctest::Approx(0.625).epsilon(1e-12));
  }
  SUBCASE("single category everywhere is defined as 1") {
    const std::vector<std::vector<size_t>> ratings{{3}, {3}};
    CHECK(fleiss_kappa(ratings, 3) == 1.0);
  }
  SUBCASE("kappa stays within [-1, 1] on random inputs") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 50; ++trial) {
      const size_t raters = 2 + rng() % 4;
      std::vector<std::vector<size_t>> ratings;
      const size_t items = 1 + rng() % 6;
      for (size_t i = 0; i < items; ++i) {
        std::vector<size_t> row(2 + rng() % 3, 0);
        for (size_t r = 0; r < raters; ++r) ++row[rng() % row.size()];
        ratings.push_back(std::move(row));
      }
      const double k = fleiss_kappa(ratings, raters);
      CHECK(k <= 1.0 + 1e-12);
      CHECK(k >= -1.0 - 1e-12);
    }
  }
  SUBCASE("count mismatch is an error") {
    CHECK_THROWS_AS(fleiss_kappa(std::vector<std::vector<size_t>>{{2, 0}}, 3), Error);
  }
}

TEST_CASE("judgments file loading with majority vote") {
  const auto path = std::filesystem::temp_directory_path() / "eed_test_judgments.tsv";
  {
    std::ofstream out(path);
    out << "Nova\t1\ta1\nNova\t1\ta2\nNova\t0\ta3\n";
    out << "other\t0\ta1\nother\t0\ta2\nother\t1\ta3\n";
  }
  const auto judgments = load_judgments(path);
  CHECK(judgments.at("nova") == true);
  CHECK(judgments.at("other") == false);
  const auto counts = judgment_rating_counts(path, 3);
  REQUIRE(counts.size() == 2);
  CHECK(fleiss_kappa(counts, 3) >= -1.0);
}
