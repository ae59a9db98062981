// eed: emerging-entity discovery toolkit.
//
// Subcommands: synth, build-dataset, brown, train, tag, rank, evaluate.
// Logs go to stderr; data goes to files or stdout. All commands are
// deterministic given (inputs, seed, flags); --threads only changes wall
// time, never bytes.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "eed/baselines.hpp"
#include "eed/brown.hpp"
#include "eed/corpus.hpp"
#include "eed/crf.hpp"
#include "eed/crf_train.hpp"
#include "eed/error.hpp"
#include "eed/evaluation.hpp"
#include "eed/parallel.hpp"
#include "eed/supervision.hpp"
#include "eed/synth.hpp"
#include "eed/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_readable(const fs::path& path, const std::string& what) {
  if (path.empty()) {
    std::cerr << "error: " << what << " path is required\n";
    std::exit(2);
  }
  if (!fs::exists(path)) {
    std::cerr << "error: " << what << " path '" << path.string() << "' does not exist\n";
    std::exit(2);
  }
}

eed::TokenAnnotations annotate(const std::vector<std::string>& tokens,
                               const eed::ClusterModel* clusters) {
  eed::TokenAnnotations a;
  if (clusters) {
    a.cluster_bits.reserve(tokens.size());
    for (const auto& t : tokens) {
      const auto it = clusters->assignment.find(t);
      a.cluster_bits.push_back(it == clusters->assignment.end() ? "" : it->second);
    }
  }
  return a;
}

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out = ".";
  eed::SynthConfig cfg;
};

int run_synth(const SynthArgs& args) {
  const auto paths = eed::generate_synthetic_corpus(args.seed, args.cfg, args.out);
  // gazetteer + sample judgments for the eval day
  const eed::SynthPlan plan = eed::load_plan(paths.plan);
  {
    std::ofstream gaz(fs::path(args.out) / "eval_gazetteer.txt");
    std::ofstream jud(fs::path(args.out) / "eval_judgments.tsv");
    for (const auto& e : plan.eval_entities) {
      gaz << e.surface << '\n';
      jud << e.surface << '\t' << (e.emerging ? 1 : 0) << '\t' << "gold" << '\n';
    }
  }
  std::cerr << "synthetic corpus written to " << args.out << " (eval day " << plan.eval_day
            << ")\n";
  return 0;
}

struct DatasetArgs {
  fs::path posts, kb, out, stats;
  eed::SupervisionConfig cfg;
  std::string base_start;
  int base_days = 365;
  int prevalent_offset_days = 365;
  bool split = false;
  bool strip_noise = false;
};

int run_build_dataset(DatasetArgs& args) {
  require_readable(args.posts, "posts");
  require_readable(args.kb, "kb");
  args.cfg.base_window.start = eed::parse_instant(args.base_start);
  args.cfg.base_window.end = eed::add_days(args.cfg.base_window.start, args.base_days);
  args.cfg.prevalent_offset =
      static_cast<std::int64_t>(args.prevalent_offset_days) * eed::kSecondsPerDay;
  args.cfg.validate();

  const auto posts = eed::load_posts(args.posts, {args.strip_noise});
  const auto kb = eed::load_kb(args.kb);
  const auto dataset = eed::build_dataset(kb, posts, args.cfg);
  eed::save_dataset(args.out, dataset);

  size_t emerging = 0, prevalent = 0;
  std::set<std::string> entities;
  for (const auto& ex : dataset) {
    entities.insert(ex.entity);
    (ex.polarity == eed::Polarity::emerging ? emerging : prevalent) += 1;
  }
  json stats;
  stats["entities_retained"] = entities.size();
  stats["examples_emerging"] = emerging;
  stats["examples_prevalent"] = prevalent;
  stats["examples_total"] = dataset.size();
  stats["posts_scanned"] = posts.size();
  stats["kb_entities"] = kb.size();
  if (!args.stats.empty()) {
    std::ofstream out(args.stats);
    out << stats.dump(1) << '\n';
  }
  if (args.split) {
    const auto [train, dev] = eed::split_dev(dataset);
    eed::save_dataset(args.out.string() + ".train", train);
    eed::save_dataset(args.out.string() + ".dev", dev);
  }
  std::cerr << "dataset: " << entities.size() << " entities, " << emerging << " emerging + "
            << prevalent << " prevalent examples\n";
  return 0;
}

struct BrownArgs {
  fs::path posts, out;
  eed::BrownOptions options;
  bool strip_noise = false;
};

int run_brown(const BrownArgs& args) {
  require_readable(args.posts, "posts");
  const auto posts = eed::load_posts(args.posts, {args.strip_noise});
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(posts.size());
  for (const auto& p : posts) sentences.push_back(p.tokens);
  const auto model = eed::brown_cluster(sentences, args.options);
  model.save(args.out);
  std::cerr << "brown: " << model.num_clusters << " clusters over " << model.vocab.size()
            << " tokens, leaf MI " << model.leaf_mi << "\n";
  return 0;
}

struct TrainArgs {
  fs::path dataset, out, clusters;
  eed::TrainConfig cfg;
  std::vector<int> cluster_prefixes;
  bool no_pos = false, no_ne = false, no_cluster = false;
};

int run_train(const TrainArgs& args) {
  require_readable(args.dataset, "dataset");
  const auto dataset = eed::load_dataset(args.dataset);
  std::optional<eed::ClusterModel> clusters;
  if (!args.clusters.empty()) {
    require_readable(args.clusters, "clusters");
    clusters = eed::ClusterModel::load(args.clusters);
  }
  eed::FeatureTemplateSet templates;
  templates.use_pos = !args.no_pos;
  templates.use_ne = !args.no_ne;
  templates.use_cluster = !args.no_cluster && clusters.has_value();
  if (!args.cluster_prefixes.empty()) templates.cluster_prefix_lengths = args.cluster_prefixes;

  std::vector<eed::TaggedSequence> sequences;
  sequences.reserve(dataset.size());
  for (const auto& ex : dataset) {
    eed::TaggedSequence seq;
    seq.tokens = ex.tokens;
    seq.tags = ex.tags;
    seq.annotations = annotate(ex.tokens, clusters ? &*clusters : nullptr);
    sequences.push_back(std::move(seq));
  }
  eed::TrainReport report;
  const auto model = eed::train_crf(sequences, templates, args.cfg, &report);
  model.save(args.out);
  std::cerr << "train: " << report.num_sequences << " sequences, " << report.num_attributes
            << " features, " << report.optimizer.iterations << " iterations, objective "
            << report.optimizer.final_objective
            << (report.optimizer.converged ? " (converged)" : "") << "\n";
  return 0;
}

struct TagArgs {
  fs::path model, posts, out, clusters;
  int threads = 1;
  bool strip_noise = false;
};

int run_tag(const TagArgs& args) {
  require_readable(args.model, "model");
  require_readable(args.posts, "posts");
  const auto model = eed::CrfModel::load(args.model);
  std::optional<eed::ClusterModel> clusters;
  if (!args.clusters.empty()) {
    require_readable(args.clusters, "clusters");
    clusters = eed::ClusterModel::load(args.clusters);
  }
  const auto posts = eed::load_posts(args.posts, {args.strip_noise});

  std::vector<std::vector<eed::Detection>> per_post(posts.size());
  constexpr size_t kBlock = 64;
  const size_t blocks = (posts.size() + kBlock - 1) / kBlock;
  eed::parallel_blocks(blocks, args.threads, [&](size_t b) {
    const size_t lo = b * kBlock;
    const size_t hi = std::min(lo + kBlock, posts.size());
    for (size_t i = lo; i < hi; ++i) {
      const auto annotations = annotate(posts[i].tokens, clusters ? &*clusters : nullptr);
      per_post[i] = eed::score_extractions(model, posts[i], annotations);
    }
  });
  std::vector<eed::Detection> detections;
  for (auto& d : per_post) detections.insert(detections.end(), d.begin(), d.end());
  eed::save_detections(args.out, detections);
  std::cerr << "tag: " << detections.size() << " detections over " << posts.size()
            << " posts\n";
  return 0;
}

struct RankArgs {
  std::string engine = "crf";
  std::string date;
  fs::path out;
  fs::path detections;     // crf engine
  fs::path posts;          // baseline engines: the day's posts
  fs::path kb;             // baseline-kb
  fs::path history;        // precomputed history index
  fs::path history_posts;  // build the history index from these posts
  fs::path save_history;
  fs::path gazetteer;  // candidate recognizer; default heuristic
  std::string history_start, history_end;
  bool no_burst_smoothing = false;
};

std::vector<std::vector<std::string>> load_gazetteer(const fs::path& path) {
  std::ifstream in(path);
  if (!in) eed::fail("cannot open gazetteer '" + path.string() + "'");
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(eed::whitespace_tokenize(line));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, const eed::Span& s) {
  std::string surface;
  for (size_t i = s.start; i < s.end; ++i) {
    if (i > s.start) surface += ' ';
    surface += tokens[i];
  }
  return surface;
}

int run_rank(const RankArgs& args) {
  const eed::CivilDate day = eed::parse_date(args.date);
  const std::int64_t day_idx = eed::day_from_civil(day);
  std::vector<eed::RankedEntity> ranking;

  if (args.engine == "crf") {
    require_readable(args.detections, "detections");
    const auto all = eed::load_detections(args.detections);
    std::vector<eed::Detection> today;
    for (const auto& d : all)
      if (eed::day_index(d.timestamp) == day_idx) today.push_back(d);
    ranking = eed::rank_daily(today, day);
  } else {
    require_readable(args.posts, "posts");
    const auto posts = eed::load_posts(args.posts);
    std::vector<std::vector<std::string>> gaz;
    if (!args.gazetteer.empty()) {
      require_readable(args.gazetteer, "gazetteer");
      gaz = load_gazetteer(args.gazetteer);
    }
    const auto recognize = [&](const std::vector<std::string>& tokens) {
      return args.gazetteer.empty() ? eed::heuristic_spans(tokens)
                                    : eed::gazetteer_spans(tokens, gaz);
    };

    eed::HistoryIndex history;
    if (!args.history.empty()) {
      require_readable(args.history, "history");
      if (args.history_start.empty() || args.history_end.empty())
        eed::fail("--history requires --history-start and --history-end coverage");
      history = eed::HistoryIndex::load(args.history,
                                        {eed::parse_instant(args.history_start),
                                         eed::parse_instant(args.history_end)});
    } else if (!args.history_posts.empty()) {
      require_readable(args.history_posts, "history-posts");
      const auto hist_posts = eed::load_posts(args.history_posts);
      if (hist_posts.empty()) eed::fail("history posts file is empty");
      history = eed::HistoryIndex({hist_posts.front().timestamp,
                                   eed::add_seconds(hist_posts.back().timestamp, 1)});
      for (const auto& p : hist_posts)
        for (const auto& s : recognize(p.tokens))
          history.add(join_tokens(p.tokens, s), p.timestamp);
      if (!args.save_history.empty()) history.save(args.save_history);
    }

    std::vector<eed::KBEntity> kb;
    if (args.engine == "baseline-kb") {
      require_readable(args.kb, "kb");
      kb = eed::load_kb(args.kb);
    }

    struct Candidate {
      size_t today_count = 0;
      bool emerging = false;
      eed::Instant first;
      std::vector<std::string> post_ids;
    };
    std::map<std::string, Candidate> candidates;
    for (const auto& p : posts) {
      if (eed::day_index(p.timestamp) != day_idx) continue;
      for (const auto& s : recognize(p.tokens)) {
        const std::string surface = join_tokens(p.tokens, s);
        const std::string canon = eed::canonicalize(surface);
        auto& c = candidates[canon];
        if (c.today_count == 0) {
          c.first = p.timestamp;
          c.emerging = args.engine == "baseline-kb"
                           ? eed::baseline_unseen_in_kb(surface, p.timestamp, kb)
                           : eed::baseline_unseen_in_stream(surface, p.timestamp, history);
        }
        ++c.today_count;
        c.post_ids.push_back(p.id);
        history.add(surface, p.timestamp);  // today's extraction counts
      }
    }
    for (auto& [canon, c] : candidates) {
      if (!c.emerging) continue;
      eed::RankedEntity r;
      r.surface = canon;
      r.score = eed::burst_score(canon, day_idx, history, !args.no_burst_smoothing);
      r.first_detection = c.first;
      std::sort(c.post_ids.begin(), c.post_ids.end());
      c.post_ids.erase(std::unique(c.post_ids.begin(), c.post_ids.end()), c.post_ids.end());
      r.supporting_post_ids = std::move(c.post_ids);
      ranking.push_back(std::move(r));
    }
    std::sort(ranking.begin(), ranking.end(),
              [](const eed::RankedEntity& a, const eed::RankedEntity& b) {
                return a.score != b.score ? a.score > b.score : a.surface < b.surface;
              });
  }

  eed::save_ranking_tsv(args.out, ranking);
  std::cerr << "rank(" << args.engine << "): " << ranking.size() << " entities for "
            << args.date << "\n";
  return 0;
}

struct EvaluateArgs {
  fs::path ranking, judgments, detections, reference;
  fs::path posts, kb;  // reference construction
  std::string eval_start, eval_end, base_start, base_end;
  fs::path reference_out, precision_out, summary_out, plot_csv;
  size_t k_max = 500;
  size_t raters = 3;
  size_t min_eval_mentions = 100;
  size_t max_base_mentions = 5;
  bool assume_unjudged_false = false;
  bool exclude_negative_leads = false;
};

std::vector<eed::RankedEntity> load_ranking_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) eed::fail("cannot open ranking '" + path.string() + "'");
  std::vector<eed::RankedEntity> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      eed::fail("malformed ranking line '" + line + "'");
    eed::RankedEntity r;
    r.surface = line.substr(t1 + 1, t2 - t1 - 1);
    r.score = std::strtod(line.c_str() + t2 + 1, nullptr);
    out.push_back(std::move(r));
  }
  return out;
}

int run_evaluate(const EvaluateArgs& args) {
  json summary;
  summary["recall"] = nullptr;
  summary["mean_lead"] = nullptr;
  summary["median_lead"] = nullptr;
  summary["fraction_earlier"] = nullptr;
  summary["kappa"] = nullptr;

  if (!args.ranking.empty()) {
    require_readable(args.ranking, "ranking");
    require_readable(args.judgments, "judgments");
    const auto ranking = load_ranking_tsv(args.ranking);
    auto judgments = eed::load_judgments(args.judgments);
    if (args.assume_unjudged_false)
      for (const auto& r : ranking) judgments.try_emplace(r.surface, false);
    const auto curve = eed::precision_at_k(ranking, judgments, args.k_max);
    if (!args.precision_out.empty()) eed::save_precision_curve_tsv(args.precision_out, curve);
    if (!args.plot_csv.empty()) {
      std::ofstream out(args.plot_csv);
      out << "k,precision\n";
      char buf[32];
      for (const auto& [k, p] : curve) {
        std::snprintf(buf, sizeof(buf), "%.6f", p);
        out << k << ',' << buf << '\n';
      }
    }
    if (!curve.empty()) summary["precision_at_last_k"] = curve.back().second;
  }

  if (!args.judgments.empty()) {
    require_readable(args.judgments, "judgments");
    const auto counts = eed::judgment_rating_counts(args.judgments, args.raters);
    if (!counts.empty()) summary["kappa"] = eed::fleiss_kappa(counts, args.raters);
  }

  std::vector<eed::ReferenceEntity> reference;
  if (!args.reference.empty()) {
    require_readable(args.reference, "reference");
    reference = eed::load_reference(args.reference);
  } else if (!args.posts.empty()) {
    require_readable(args.posts, "posts");
    require_readable(args.kb, "kb");
    const auto posts = eed::load_posts(args.posts);
    const auto kb = eed::load_kb(args.kb);
    const eed::CorpusWindow eval_w{eed::parse_instant(args.eval_start),
                                   eed::parse_instant(args.eval_end)};
    const eed::CorpusWindow base_w{eed::parse_instant(args.base_start),
                                   eed::parse_instant(args.base_end)};
    reference = eed::build_reference(posts, kb, eval_w, base_w, args.min_eval_mentions,
                                     args.max_base_mentions);
    if (!args.reference_out.empty()) eed::save_reference(args.reference_out, reference);
  }

  if (!reference.empty() && !args.detections.empty()) {
    require_readable(args.detections, "detections");
    const auto detections = eed::load_detections(args.detections);
    std::vector<std::string> surfaces;
    std::map<std::string, eed::Instant> first_detection;
    for (const auto& d : detections) {
      const std::string canon = eed::canonicalize(d.surface);
      surfaces.push_back(canon);
      const auto it = first_detection.find(canon);
      if (it == first_detection.end() || d.timestamp < it->second)
        first_detection[canon] = d.timestamp;
    }
    summary["recall"] = eed::relative_recall(surfaces, reference);
    std::set<std::string> ref_surfaces;
    for (const auto& r : reference) ref_surfaces.insert(r.surface);
    std::map<std::string, eed::Instant> in_reference;
    for (const auto& [s, t] : first_detection)
      if (ref_surfaces.contains(s)) in_reference.emplace(s, t);
    if (!in_reference.empty()) {
      const auto stats =
          eed::lead_time_stats(in_reference, reference, args.exclude_negative_leads);
      summary["mean_lead"] = stats.mean_days;
      summary["median_lead"] = stats.median_days;
      summary["fraction_earlier"] = stats.fraction_earlier;
    }
  }

  if (!args.summary_out.empty()) {
    std::ofstream out(args.summary_out);
    out << summary.dump(1) << '\n';
  } else {
    std::cout << summary.dump(1) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emerging-entity discovery toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file; flags take precedence");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output directory")
      ->envname("EED_DATA_DIR")
      ->capture_default_str();
  synth_cmd->add_option("--entities", synth.cfg.normal_entities, "normal emerging entities");
  synth_cmd->add_option("--homographs", synth.cfg.homograph_pairs, "homograph pairs");
  synth_cmd->add_option("--below-threshold", synth.cfg.below_threshold_entities,
                        "entities whose repost share never exceeds k'");
  synth_cmd->add_option("--viral", synth.cfg.viral_entities, "entities that exceed the n cap");
  synth_cmd->add_option("--short-prevalent", synth.cfg.short_prevalent_entities,
                        "entities with an undersized prevalent harvest");
  synth_cmd->add_option("--span-days", synth.cfg.span_days, "emergence window length");
  synth_cmd->add_option("--fan-out", synth.cfg.fan_out, "burst-day repost count");
  synth_cmd->add_option("--eval-emerging", synth.cfg.eval_emerging,
                        "planted emerging entities on the eval day");
  synth_cmd->add_option("--eval-homographs", synth.cfg.eval_homographs,
                        "eval emerging entities pre-registered in the KB");
  synth_cmd->add_option("--eval-distractors", synth.cfg.eval_distractors,
                        "prevalent distractor posts on the eval day");

  DatasetArgs ds;
  auto* ds_cmd = app.add_subcommand("build-dataset", "time-sensitive distant supervision");
  ds_cmd->add_option("--posts", ds.posts, "posts JSONL")->required();
  ds_cmd->add_option("--kb", ds.kb, "KB TSV")->required();
  ds_cmd->add_option("--out", ds.out, "output dataset JSONL")->required();
  ds_cmd->add_option("--stats", ds.stats, "stats JSON path");
  ds_cmd->add_option("--k", ds.cfg.k, "homograph-exclusion mention cap")->capture_default_str();
  ds_cmd->add_option("--n", ds.cfg.n, "max emerging posts per entity")->capture_default_str();
  ds_cmd->add_option("--k-prime", ds.cfg.k_prime, "repost-share threshold")
      ->capture_default_str();
  ds_cmd->add_option("--base-start", ds.base_start, "base window start (date or RFC 3339)")
      ->required();
  ds_cmd->add_option("--base-days", ds.base_days, "base window length in days")
      ->capture_default_str();
  ds_cmd->add_option("--prevalent-offset-days", ds.prevalent_offset_days,
                     "prevalent context offset in days")
      ->capture_default_str();
  ds_cmd->add_flag("--split-dev", ds.split, "also write a deterministic 90/10 split");
  ds_cmd->add_flag("--strip-noise", ds.strip_noise, "drop URL/@user/#tag tokens at load");

  BrownArgs brown;
  auto* brown_cmd = app.add_subcommand("brown", "Brown clustering over post tokens");
  brown_cmd->add_option("--posts", brown.posts, "posts JSONL")->required();
  brown_cmd->add_option("--out", brown.out, "cluster TSV output")->required();
  brown_cmd->add_option("--clusters", brown.options.num_clusters, "number of clusters")
      ->required();
  brown_cmd->add_option("--window", brown.options.merge_window,
                        "merge window (default: clusters + 1)");
  brown_cmd->add_option("--min-freq", brown.options.min_frequency,
                        "rare-token floor (1 disables)");
  brown_cmd->add_flag("--strip-noise", brown.strip_noise, "drop URL/@user/#tag tokens");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the CRF tagger");
  train_cmd->add_option("--dataset", train.dataset, "labeled dataset JSONL")->required();
  train_cmd->add_option("--out", train.out, "model output path")->required();
  train_cmd->add_option("--clusters", train.clusters, "Brown cluster TSV");
  train_cmd->add_option("--c", train.cfg.c, "Gaussian prior variance")->capture_default_str();
  train_cmd->add_option("--max-iter", train.cfg.max_iterations, "optimizer iteration cap")
      ->capture_default_str();
  train_cmd->add_option("--tol", train.cfg.gradient_tolerance, "gradient tolerance")
      ->capture_default_str();
  train_cmd->add_option("--threads", train.cfg.threads, "gradient worker threads")
      ->capture_default_str();
  train_cmd
      ->add_option("--cluster-prefixes", train.cluster_prefixes,
                   "cluster-ID prefix lengths, 0 for the full path (default 4,8,12,0)")
      ->delimiter(',');
  train_cmd->add_flag("--no-pos", train.no_pos, "disable POS templates");
  train_cmd->add_flag("--no-ne", train.no_ne, "disable NE templates");
  train_cmd->add_flag("--no-cluster", train.no_cluster, "disable cluster templates");

  TagArgs tag;
  auto* tag_cmd = app.add_subcommand("tag", "tag posts and score extractions");
  tag_cmd->add_option("--model", tag.model, "trained model")->required();
  tag_cmd->add_option("--posts", tag.posts, "posts JSONL")->required();
  tag_cmd->add_option("--out", tag.out, "detections JSONL output")->required();
  tag_cmd->add_option("--clusters", tag.clusters, "Brown cluster TSV");
  tag_cmd->add_option("--threads", tag.threads, "tagging threads")->capture_default_str();
  tag_cmd->add_flag("--strip-noise", tag.strip_noise, "drop URL/@user/#tag tokens");

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "rank one day's discoveries");
  rank_cmd->add_option("--engine", rank.engine, "crf | baseline-stream | baseline-kb")
      ->check(CLI::IsMember({"crf", "baseline-stream", "baseline-kb"}))
      ->capture_default_str();
  rank_cmd->add_option("--date", rank.date, "target day (YYYY-MM-DD)")->required();
  rank_cmd->add_option("--out", rank.out, "ranking TSV output")->required();
  rank_cmd->add_option("--detections", rank.detections, "detections JSONL (crf engine)");
  rank_cmd->add_option("--posts", rank.posts, "day posts JSONL (baseline engines)");
  rank_cmd->add_option("--kb", rank.kb, "KB TSV (baseline-kb)");
  rank_cmd->add_option("--history", rank.history, "history index TSV");
  rank_cmd->add_option("--history-start", rank.history_start, "history coverage start");
  rank_cmd->add_option("--history-end", rank.history_end, "history coverage end");
  rank_cmd->add_option("--history-posts", rank.history_posts,
                       "posts to build the history index from");
  rank_cmd->add_option("--save-history", rank.save_history, "persist the built history index");
  rank_cmd->add_option("--gazetteer", rank.gazetteer,
                       "candidate surfaces, one per line (default: heuristic recognizer)");
  rank_cmd->add_flag("--no-burst-smoothing", rank.no_burst_smoothing,
                     "disable add-one smoothing in the burst score");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "precision/recall/lead-time report");
  ev_cmd->add_option("--ranking", ev.ranking, "ranking TSV");
  ev_cmd->add_option("--judgments", ev.judgments, "judgments TSV (surface, 0/1, annotator)");
  ev_cmd->add_option("--detections", ev.detections, "detections JSONL");
  ev_cmd->add_option("--reference", ev.reference, "reference JSONL");
  ev_cmd->add_option("--posts", ev.posts, "posts JSONL (reference construction)");
  ev_cmd->add_option("--kb", ev.kb, "KB TSV (reference construction)");
  ev_cmd->add_option("--eval-start", ev.eval_start, "reference eval window start");
  ev_cmd->add_option("--eval-end", ev.eval_end, "reference eval window end");
  ev_cmd->add_option("--base-start", ev.base_start, "reference base window start");
  ev_cmd->add_option("--base-end", ev.base_end, "reference base window end");
  ev_cmd->add_option("--min-eval-mentions", ev.min_eval_mentions,
                     "reference eval-mention floor (exclusive)")
      ->capture_default_str();
  ev_cmd->add_option("--max-base-mentions", ev.max_base_mentions,
                     "reference base-mention cap (inclusive)")
      ->capture_default_str();
  ev_cmd->add_option("--reference-out", ev.reference_out, "persist the built reference");
  ev_cmd->add_option("--precision-out", ev.precision_out, "precision curve TSV");
  ev_cmd->add_option("--summary-out", ev.summary_out, "summary JSON (default: stdout)");
  ev_cmd->add_option("--plot-csv", ev.plot_csv, "optional plot-data CSV");
  ev_cmd->add_option("--k-max", ev.k_max, "precision curve depth")->capture_default_str();
  ev_cmd->add_option("--raters", ev.raters, "annotators per item for Fleiss kappa")
      ->capture_default_str();
  ev_cmd->add_flag("--assume-unjudged-false", ev.assume_unjudged_false,
                   "treat surfaces without judgments as negative");
  ev_cmd->add_flag("--exclude-negative-leads", ev.exclude_negative_leads,
                   "drop late detections from lead statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*ds_cmd) return run_build_dataset(ds);
    if (*brown_cmd) return run_brown(brown);
    if (*train_cmd) return run_train(train);
    if (*tag_cmd) return run_tag(tag);
    if (*rank_cmd) return run_rank(rank);
    if (*ev_cmd) return run_evaluate(ev);
  } catch (const eed::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
