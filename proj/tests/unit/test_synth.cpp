#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "eed/error.hpp"
#include "eed/supervision.hpp"
#include "eed/synth.hpp"

using namespace eed;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.normal_entities = 6;
  cfg.homograph_pairs = 2;
  cfg.below_threshold_entities = 2;
  cfg.viral_entities = 1;
  cfg.short_prevalent_entities = 1;
  cfg.n = 30;  // keep the viral entity small
  cfg.chatter_posts = 40;
  cfg.eval_emerging = 6;
  cfg.eval_homographs = 2;
  cfg.eval_distractors = 20;
  return cfg;
}

}  // namespace

TEST_CASE("generator output is byte-identical across runs") {
  const fs::path a = fs::temp_directory_path() / "eed_synth_a";
  const fs::path b = fs::temp_directory_path() / "eed_synth_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto cfg = small_config();
  const auto pa = generate_synthetic_corpus(7, cfg, a);
  const auto pb = generate_synthetic_corpus(7, cfg, b);
  CHECK(slurp(pa.posts) == slurp(pb.posts));
  CHECK(slurp(pa.kb) == slurp(pb.kb));
  CHECK(slurp(pa.gold_spans) == slurp(pb.gold_spans));
  CHECK(slurp(pa.plan) == slurp(pb.plan));
  CHECK(slurp(pa.eval_posts) == slurp(pb.eval_posts));
  // different seed, different corpus
  const fs::path c = fs::temp_directory_path() / "eed_synth_c";
  fs::remove_all(c);
  const auto pc = generate_synthetic_corpus(8, cfg, c);
  CHECK(slurp(pa.posts) != slurp(pc.posts));
}

TEST_CASE("generated posts satisfy invariants and ordering; plan is coherent") {
  const fs::path dir = fs::temp_directory_path() / "eed_synth_inv";
  fs::remove_all(dir);
  const auto cfg = small_config();
  const auto paths = generate_synthetic_corpus(11, cfg, dir);
  const auto posts = load_posts(paths.posts);  // enforces order + invariants
  CHECK(posts.size() > 100);
  const auto plan = load_plan(paths.plan);
  CHECK(plan.entities.size() == static_cast<size_t>(cfg.total_entities()));

  std::set<std::string> kinds;
  for (const auto& e : plan.entities) {
    kinds.insert(to_string(e.kind));
    if (e.kind == SynthKind::homograph) {
      CHECK(e.base_mentions > static_cast<size_t>(cfg.k));
      CHECK_FALSE(e.expected_in_dataset);
    }
    if (e.kind == SynthKind::below_threshold) {
      CHECK(e.burst_day.empty());
      CHECK_FALSE(e.expected_in_dataset);
    }
    if (e.kind == SynthKind::short_prevalent) CHECK_FALSE(e.expected_in_dataset);
    if (e.kind == SynthKind::normal || e.kind == SynthKind::viral) {
      CHECK(e.expected_in_dataset);
      CHECK(e.expected_emerging_ids.size() == e.expected_prevalent_ids.size());
    }
    if (e.kind == SynthKind::viral)
      CHECK(e.expected_emerging_ids.size() == static_cast<size_t>(cfg.n));
  }
  CHECK(kinds.size() == 5);

  // gold spans reference real posts and in-bounds spans
  std::map<std::string, const Post*> by_id;
  for (const auto& p : posts) by_id[p.id] = &p;
  const auto gold = load_gold_spans(paths.gold_spans);
  CHECK(!gold.empty());
  for (const auto& g : gold) {
    REQUIRE(by_id.count(g.post_id));
    CHECK(g.start < g.end);
    CHECK(g.end <= by_id[g.post_id]->tokens.size());
  }
}

TEST_CASE("generated corpus agrees with the supervision pipeline end to end") {
  const fs::path dir = fs::temp_directory_path() / "eed_synth_sup";
  fs::remove_all(dir);
  const auto cfg = small_config();
  const auto paths = generate_synthetic_corpus(13, cfg, dir);
  const auto posts = load_posts(paths.posts);
  const auto kb = load_kb(paths.kb);
  const auto plan = load_plan(paths.plan);

  SupervisionConfig sup;
  sup.k = cfg.k;
  sup.n = cfg.n;
  sup.k_prime = cfg.k_prime;
  sup.base_window = plan.base_window;
  sup.prevalent_offset = cfg.prevalent_offset;
  const auto dataset = build_dataset(kb, posts, sup);

  // per-entity example ids grouped from the dataset
  std::map<std::string, std::vector<std::string>> emerging_ids, prevalent_ids;
  for (const auto& ex : dataset)
    (ex.polarity == Polarity::emerging ? emerging_ids : prevalent_ids)[ex.entity]
        .push_back(ex.post_id);
  for (const auto& e : plan.entities) {
    if (!e.expected_in_dataset) {
      CHECK(emerging_ids.count(e.surface) == 0);
      continue;
    }
    CHECK(emerging_ids[e.surface] == e.expected_emerging_ids);
    CHECK(prevalent_ids[e.surface] == e.expected_prevalent_ids);
  }

  // no emerging-context example is timestamped at or after registration
  std::map<std::string, Instant> registered;
  for (const auto& e : kb) registered[e.title] = e.registered_at;
  std::map<std::string, Instant> post_ts;
  for (const auto& p : posts) post_ts[p.id] = p.timestamp;
  for (const auto& ex : dataset) {
    if (ex.polarity != Polarity::emerging) continue;
    CHECK(post_ts.at(ex.post_id) < registered.at(ex.entity));
  }
}

TEST_CASE("zero entities is an error") {
  SynthConfig cfg;
  cfg.normal_entities = 0;
  cfg.homograph_pairs = 0;
  cfg.below_threshold_entities = 0;
  cfg.viral_entities = 0;
  cfg.short_prevalent_entities = 0;
  CHECK_THROWS_AS(
      generate_synthetic_corpus(1, cfg, fs::temp_directory_path() / "eed_synth_zero"),
      Error);
}
