#include <doctest.h>

#include <cmath>
#include <random>

#include "eed/crf.hpp"
#include "eed/error.hpp"
#include "oracle.hpp"

using namespace eed;
using namespace eed::test;

namespace {

Lattice empty_lattice(size_t n) {
  Lattice lat;
  lat.attrs.resize(n);
  return lat;
}

}  // namespace

TEST_CASE("transition mask encodes BIOES validity") {
  const auto m = TransitionMask::bioes();
  const auto idx = [](BioesTag t) { return static_cast<size_t>(t); };
  CHECK(m.pair[idx(BioesTag::B)][idx(BioesTag::I)]);
  CHECK(m.pair[idx(BioesTag::B)][idx(BioesTag::E)]);
  CHECK_FALSE(m.pair[idx(BioesTag::O)][idx(BioesTag::I)]);
  CHECK_FALSE(m.pair[idx(BioesTag::B)][idx(BioesTag::S)]);
  CHECK_FALSE(m.pair[idx(BioesTag::E)][idx(BioesTag::I)]);
  CHECK_FALSE(m.start[idx(BioesTag::I)]);
  CHECK_FALSE(m.start[idx(BioesTag::E)]);
  CHECK_FALSE(m.end[idx(BioesTag::B)]);
  CHECK_FALSE(m.end[idx(BioesTag::I)]);
  // every masked-in transition is realizable by some encoded span layout
  size_t allowed = 0;
  for (const auto& row : m.pair)
    for (bool b : row) allowed += b;
  CHECK(allowed == 13);
}

TEST_CASE("uniform model: log Z is length * ln(labels) with mask disabled") {
  CrfModel model({}, TransitionMask::unmasked());
  const auto lat = empty_lattice(3);
  const auto m = log_forward_backward(model, lat);
  CHECK(m.log_z == doctest::Approx(3.0 * std::log(5.0)).epsilon(1e-12));
  for (const auto& node : m.node)
    for (double p : node) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("length-1 marginals are a softmax over start-and-end-valid labels") {
  std::mt19937_64 rng(3);
  CrfModel model = random_model(rng, true, 4);
  Lattice lat;
  lat.attrs = {{0, 2}};
  const auto unary = model.unary_scores(lat);
  const auto m = log_forward_backward(model, lat);
  double z = 0.0;
  for (size_t y = 0; y < kL; ++y)
    if (model.start_allowed(y) && model.end_allowed(y)) z += std::exp(unary[0][y]);
  for (size_t y = 0; y < kL; ++y) {
    const bool valid = model.start_allowed(y) && model.end_allowed(y);
    const double expected = valid ? std::exp(unary[0][y]) / z : 0.0;
    CHECK(m.node[0][y] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("marginals normalize and match enumeration on random instances") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 60; ++it) {
    const bool masked = it % 2 == 0;
    CrfModel model = random_model(rng, masked, 6);
    const size_t len = 1 + rng() % 6;
    const Lattice lat = random_lattice(rng, model, len, 3);
    const auto m = log_forward_backward(model, lat);
    const auto oracle = enumerate_paths(model, lat);
    CHECK(m.log_z == doctest::Approx(oracle.log_z).epsilon(1e-10));
    for (size_t t = 0; t < len; ++t) {
      double sum = 0.0;
      for (size_t y = 0; y < kL; ++y) {
        sum += m.node[t][y];
        CHECK(std::abs(m.node[t][y] - oracle.node[t][y]) < 1e-9);
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    for (size_t t = 0; t + 1 < len; ++t)
      for (size_t k = 0; k < kL * kL; ++k)
        CHECK(std::abs(m.edge[t][k] - oracle.edge[t][k]) < 1e-9);
  }
}

TEST_CASE("full path probabilities sum to one (brute force)") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 10; ++it) {
    CrfModel model = random_model(rng, true, 5);
    const Lattice lat = random_lattice(rng, model, 1 + rng() % 5, 2);
    const auto unary = model.unary_scores(lat);
    const auto m = log_forward_backward(model, lat);
    std::vector<size_t> path(lat.size(), 0);
    double total = 0.0;
    while (true) {
      const double s = oracle_path_score(model, unary, path);
      if (s != kNegInfD) total += std::exp(s - m.log_z);
      size_t t = 0;
      while (t < path.size() && ++path[t] == kL) path[t++] = 0;
      if (t == path.size()) break;
    }
    CHECK(std::abs(total - 1.0) < 1e-8);
  }
}

TEST_CASE("viterbi matches enumeration including the tie-break") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 60; ++it) {
    CrfModel model = random_model(rng, it % 2 == 0, 6);
    const Lattice lat = random_lattice(rng, model, 1 + rng() % 6, 3);
    const auto path = viterbi(model, lat);
    const auto oracle = enumerate_paths(model, lat);
    const double score = path_score(model, lat, path);
    CHECK(score == doctest::Approx(oracle.max_score).epsilon(1e-10));
  }
}

TEST_CASE("viterbi tie-break: all-zero weights with mask give all-O") {
  CrfModel model({}, TransitionMask::bioes());
  const auto path = viterbi(model, empty_lattice(4));
  for (BioesTag t : path) CHECK(t == BioesTag::O);
}

TEST_CASE("viterbi tie-break picks lowest label at the latest differing position") {
  // crafted exact tie: integer weights, two optimal paths [O,O] and [O,S]
  CrfModel model({}, TransitionMask::unmasked());
  const int a = model.intern_attr("f");
  auto w = model.weights();
  w[model.unary_index(static_cast<size_t>(a), static_cast<size_t>(BioesTag::O))] = 1.0;
  w[model.unary_index(static_cast<size_t>(a), static_cast<size_t>(BioesTag::S))] = 1.0;
  Lattice lat;
  lat.attrs = {{}, {a}};
  const auto path = viterbi(model, lat);  // ties on the last position -> O(0) over S(4)
  CHECK(path == std::vector<BioesTag>{BioesTag::O, BioesTag::O});
  const auto oracle = enumerate_paths(model, lat);
  for (size_t t = 0; t < path.size(); ++t)
    CHECK(static_cast<size_t>(path[t]) == oracle.best_path[t]);
}

TEST_CASE("constrained marginal fixtures") {
  std::mt19937_64 rng(23);
  CrfModel model = random_model(rng, true, 5);
  const Lattice lat = random_lattice(rng, model, 4, 2);

  SUBCASE("empty constraint is 1") {
    CHECK(constrained_marginal(model, lat, 2, {}) == 1.0);
  }
  SUBCASE("whole-sequence constraint equals exp(score - log Z)") {
    const std::vector<BioesTag> tags{BioesTag::O, BioesTag::B, BioesTag::E, BioesTag::S};
    const double p = constrained_marginal(model, lat, 0, tags);
    const auto m = log_forward_backward(model, lat);
    const double expected = std::exp(path_score(model, lat, tags) - m.log_z);
    CHECK(p == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("mask-invalid constraint yields 0") {
    const std::vector<BioesTag> bad{BioesTag::B, BioesTag::S};
    CHECK(constrained_marginal(model, lat, 0, bad) == 0.0);
  }
  SUBCASE("node marginal equals length-1 constraint") {
    const auto m = log_forward_backward(model, lat);
    for (size_t t = 0; t < 4; ++t)
      for (size_t y = 0; y < kL; ++y) {
        const std::vector<BioesTag> c{static_cast<BioesTag>(y)};
        CHECK(std::abs(constrained_marginal(model, lat, t, c) - m.node[t][y]) < 1e-10);
      }
  }
}

TEST_CASE("constrained marginal matches path-sum enumeration") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 40; ++it) {
    CrfModel model = random_model(rng, it % 2 == 0, 5);
    const size_t len = 2 + rng() % 5;
    const Lattice lat = random_lattice(rng, model, len, 2);
    const size_t begin = rng() % len;
    const size_t clen = 1 + rng() % (len - begin);
    std::vector<BioesTag> constraint;
    for (size_t i = 0; i < clen; ++i)
      constraint.push_back(static_cast<BioesTag>(rng() % kL));
    const double got = constrained_marginal(model, lat, begin, constraint);
    const double want = enumerate_constrained(model, lat, begin, constraint);
    CHECK(std::abs(got - want) < 1e-9);
  }
}

TEST_CASE("constrained marginal of a viterbi span dominates the single path") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 20; ++it) {
    CrfModel model = random_model(rng, true, 5);
    const Lattice lat = random_lattice(rng, model, 2 + rng() % 5, 2);
    const auto best = viterbi(model, lat);
    const auto m = log_forward_backward(model, lat);
    const double path_p = std::exp(path_score(model, lat, best) - m.log_z);
    for (const Span& s : decode_bioes(best)) {
      const std::span<const BioesTag> c(best.data() + s.start, s.end - s.start);
      CHECK(constrained_marginal(model, lat, s.start, c) >= path_p - 1e-12);
    }
  }
}

TEST_CASE("score_extractions composition") {
  Post post;
  post.id = "p";
  post.timestamp = parse_instant("2013-05-10T12:00:00Z");
  post.tokens = {"alpha", "beta", "gamma"};

  SUBCASE("all-O viterbi gives no detections") {
    CrfModel model({}, TransitionMask::bioes());
    CHECK(score_extractions(model, post, {}).empty());
  }
  SUBCASE("one S-tagged token carries its constrained marginal") {
    FeatureTemplateSet templates;
    templates.use_pos = templates.use_ne = templates.use_cluster = false;
    CrfModel model(templates, TransitionMask::bioes());
    const int a = model.intern_attr("w[0]=beta");
    auto w = model.weights();
    w[model.unary_index(static_cast<size_t>(a), static_cast<size_t>(BioesTag::S))] = 6.0;
    const auto dets = score_extractions(model, post, {});
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].start == 1);
    CHECK(dets[0].end == 2);
    CHECK(dets[0].surface == "beta");
    const Lattice lat = model.build_lattice(post.tokens, {});
    const std::vector<BioesTag> c{BioesTag::S};
    CHECK(dets[0].confidence ==
          doctest::Approx(constrained_marginal(model, lat, 1, c)).epsilon(1e-12));
    CHECK(dets[0].confidence > 0.0);
    CHECK(dets[0].confidence <= 1.0);
  }
}

TEST_CASE("score_extractions confidences equal the brute-force span path-sums") {
  std::mt19937_64 rng(41);
  FeatureTemplateSet lean;
  lean.use_pos = lean.use_ne = lean.use_cluster = false;
  for (int it = 0; it < 15; ++it) {
    Post post;
    post.id = "p" + std::to_string(it);
    post.timestamp = parse_instant("2013-05-10T12:00:00Z");
    const size_t len = 2 + rng() % 4;
    for (size_t t = 0; t < len; ++t)
      post.tokens.push_back("tok" + std::to_string(rng() % 4));
    CrfModel model(lean, TransitionMask::bioes());
    model.build_lattice_interning(post.tokens, {});
    for (double& w : model.weights()) w = uniform(rng, -2.0, 2.0);
    const Lattice lat = model.build_lattice(post.tokens, {});
    const auto tags = viterbi(model, lat);
    for (const Detection& d : score_extractions(model, post, {})) {
      CHECK(d.confidence > 0.0);
      CHECK(d.confidence <= 1.0 + 1e-12);
      const std::span<const BioesTag> c(tags.data() + d.start, d.end - d.start);
      const double want = enumerate_constrained(model, lat, d.start, c);
      CHECK(std::abs(d.confidence - want) < 1e-9);
    }
  }
}

TEST_CASE("model save/load round trip and template mismatch") {
  std::mt19937_64 rng(37);
  CrfModel model = random_model(rng, true, 8);
  TrainConfig cfg;
  cfg.c = 0.125;
  model.set_train_config(cfg);
  const auto path = std::filesystem::temp_directory_path() / "eed_test_model.json";
  model.save(path);
  const CrfModel loaded = CrfModel::load(path);
  CHECK(loaded.num_attrs() == model.num_attrs());
  CHECK(loaded.train_config().c == 0.125);
  for (size_t i = 0; i < model.num_weights(); ++i)
    CHECK(loaded.weights()[i] == model.weights()[i]);  // bit-exact round trip
  const Lattice lat = random_lattice(rng, model, 4, 2);
  const auto a = log_forward_backward(model, lat);
  const auto b = log_forward_backward(loaded, lat);
  CHECK(a.log_z == b.log_z);

  FeatureTemplateSet other;
  other.use_cluster = false;
  CHECK_THROWS_AS(CrfModel::load(path, other), Error);
  CHECK_NOTHROW(CrfModel::load(path, model.templates()));
}
