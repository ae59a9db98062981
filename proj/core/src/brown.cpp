#include "eed/brown.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>

#include "eed/error.hpp"
#include "eed/features.hpp"

namespace eed {

namespace {

constexpr size_t kNoSlot = static_cast<size_t>(-1);

struct ActiveClass {
  size_t id = 0;
  std::vector<int> words;       // word ids in this class
  std::vector<size_t> leaves;   // leaf class ids under this node (tree phase)
};

// Greedy agglomeration state over the active-class window. Class-bigram
// counts are dense over active slots; marginals and per-slot MI terms are
// rebuilt after every structural change.
struct Agglomerator {
  double total = 0.0;  // bigram mass between inserted words
  std::vector<ActiveClass> classes;
  std::vector<std::vector<double>> cnt;   // cnt[slot_a][slot_b]
  std::vector<double> left, right;        // marginals per slot
  std::vector<double> row_term, col_term; // per-slot contribution to MI
  double mi = 0.0;

  static double term(double c, double l, double r, double n) {
    if (c <= 0) return 0.0;
    return c / n * std::log(c * n / (l * r));
  }

  void rebuild_terms() {
    const size_t w = classes.size();
    left.assign(w, 0.0);
    right.assign(w, 0.0);
    row_term.assign(w, 0.0);
    col_term.assign(w, 0.0);
    for (size_t a = 0; a < w; ++a)
      for (size_t b = 0; b < w; ++b) {
        left[a] += cnt[a][b];
        right[b] += cnt[a][b];
      }
    mi = 0.0;
    if (total <= 0) return;
    for (size_t a = 0; a < w; ++a)
      for (size_t b = 0; b < w; ++b) {
        const double t = term(cnt[a][b], left[a], right[b], total);
        row_term[a] += t;
        col_term[b] += t;
        mi += t;
      }
  }

  double merged_mi(size_t i, size_t j) const {
    if (total <= 0) return 0.0;
    double out = mi - row_term[i] - row_term[j] - col_term[i] - col_term[j] +
                 term(cnt[i][i], left[i], right[i], total) +
                 term(cnt[i][j], left[i], right[j], total) +
                 term(cnt[j][i], left[j], right[i], total) +
                 term(cnt[j][j], left[j], right[j], total);
    const double lm = left[i] + left[j];
    const double rm = right[i] + right[j];
    for (size_t d = 0; d < classes.size(); ++d) {
      if (d == i || d == j) continue;
      out += term(cnt[i][d] + cnt[j][d], lm, right[d], total);
      out += term(cnt[d][i] + cnt[d][j], left[d], rm, total);
    }
    out += term(cnt[i][i] + cnt[i][j] + cnt[j][i] + cnt[j][j], lm, rm, total);
    return out;
  }

  // Best pair by post-merge MI; exact ties resolve to the smallest
  // (min id, max id) pair.
  std::pair<size_t, size_t> best_pair(double* mi_after) const {
    const size_t w = classes.size();
    double best = -std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    std::pair<size_t, size_t> best_ids{0, 0};
    bool have = false;
    for (size_t i = 0; i < w; ++i)
      for (size_t j = i + 1; j < w; ++j) {
        const double m = merged_mi(i, j);
        const auto ids = std::minmax(classes[i].id, classes[j].id);
        const std::pair<size_t, size_t> id_pair{ids.first, ids.second};
        if (!have || m > best || (m == best && id_pair < best_ids)) {
          have = true;
          best = m;
          bi = i;
          bj = j;
          best_ids = id_pair;
        }
      }
    *mi_after = best;
    return {bi, bj};
  }

  // Folds slot j into slot i and swap-removes slot j.
  void merge_slots(size_t i, size_t j) {
    const size_t w = classes.size();
    for (size_t d = 0; d < w; ++d) cnt[i][d] += cnt[j][d];
    for (size_t d = 0; d < w; ++d) cnt[d][i] += cnt[d][j];
    auto& a = classes[i];
    auto& b = classes[j];
    a.words.insert(a.words.end(), b.words.begin(), b.words.end());
    a.leaves.insert(a.leaves.end(), b.leaves.begin(), b.leaves.end());
    const size_t last = w - 1;
    if (j != last) {
      classes[j] = std::move(classes[last]);
      for (size_t d = 0; d < w; ++d) cnt[d][j] = cnt[d][last];
      cnt[j] = std::move(cnt[last]);
    }
    classes.pop_back();
    cnt.pop_back();
    for (auto& row : cnt) row.pop_back();
    rebuild_terms();
  }
};

}  // namespace

std::string ClusterModel::prefix(const std::string& token, size_t length) const {
  const auto it = assignment.find(token);
  if (it == assignment.end()) return kAbsentValue;
  if (length == 0 || length >= it->second.size()) return it->second;
  return it->second.substr(0, length);
}

std::string cluster_prefix(const ClusterModel& model, const std::string& token,
                           size_t length) {
  return model.prefix(token, length);
}

ClusterModel brown_cluster(std::span<const std::vector<std::string>> sentences,
                           const BrownOptions& options,
                           std::vector<BrownEvent>* trace) {
  if (options.num_clusters < 1) fail("num_clusters must be at least 1");
  if (sentences.empty()) fail("brown clustering requires a non-empty corpus");

  // Unigram and sentence-internal bigram counts.
  std::map<std::string, std::uint64_t> freq;
  for (const auto& sent : sentences)
    for (const auto& tok : sent) ++freq[tok];
  if (freq.empty()) fail("brown clustering requires a non-empty corpus");

  const std::string oov = "<OOV>";
  const bool use_oov = options.min_frequency > 1;
  const auto map_token = [&](const std::string& t) -> const std::string& {
    if (use_oov && freq.at(t) < options.min_frequency) return oov;
    return t;
  };

  std::map<std::string, std::uint64_t> eff_freq;
  for (const auto& [tok, f] : freq) eff_freq[map_token(tok)] += f;

  // Word ids in (frequency desc, token asc) order.
  std::vector<std::string> words;
  words.reserve(eff_freq.size());
  for (const auto& [tok, f] : eff_freq) words.push_back(tok);
  std::sort(words.begin(), words.end(), [&](const std::string& a, const std::string& b) {
    const auto fa = eff_freq.at(a), fb = eff_freq.at(b);
    return fa != fb ? fa > fb : a < b;
  });
  std::unordered_map<std::string, int> word_id;
  for (size_t i = 0; i < words.size(); ++i) word_id.emplace(words[i], static_cast<int>(i));
  const size_t v = words.size();
  if (options.num_clusters > v)
    fail("num_clusters " + std::to_string(options.num_clusters) + " exceeds vocabulary size " +
         std::to_string(v));

  std::vector<std::unordered_map<int, double>> out_edges(v), in_edges(v);
  for (const auto& sent : sentences)
    for (size_t i = 0; i + 1 < sent.size(); ++i) {
      const int a = word_id.at(map_token(sent[i]));
      const int b = word_id.at(map_token(sent[i + 1]));
      out_edges[static_cast<size_t>(a)][b] += 1.0;
      in_edges[static_cast<size_t>(b)][a] += 1.0;
    }

  const size_t window = options.merge_window == 0 ? options.num_clusters + 1
                                                  : options.merge_window;

  Agglomerator agg;
  std::vector<size_t> word_slot(v, kNoSlot);
  size_t next_class_id = 0;

  const auto insert_word = [&](int x) {
    const size_t slot = agg.classes.size();
    ActiveClass cls;
    cls.id = next_class_id++;
    cls.words.push_back(x);
    agg.classes.push_back(std::move(cls));
    for (auto& row : agg.cnt) row.push_back(0.0);
    agg.cnt.emplace_back(agg.classes.size(), 0.0);
    word_slot[static_cast<size_t>(x)] = slot;
    for (const auto& [vec, c] : out_edges[static_cast<size_t>(x)]) {
      const size_t vs = word_slot[static_cast<size_t>(vec)];
      if (vs == kNoSlot) continue;
      agg.cnt[slot][vs] += c;
      agg.total += c;
    }
    for (const auto& [u, c] : in_edges[static_cast<size_t>(x)]) {
      if (u == x) continue;  // the self bigram was handled by the out edge
      const size_t us = word_slot[static_cast<size_t>(u)];
      if (us == kNoSlot) continue;
      agg.cnt[us][slot] += c;
      agg.total += c;
    }
    agg.rebuild_terms();
    if (trace) {
      BrownEvent e;
      e.kind = BrownEvent::Kind::insert;
      e.token = words[static_cast<size_t>(x)];
      e.class_a = agg.classes[slot].id;
      trace->push_back(std::move(e));
    }
  };

  std::unordered_map<size_t, std::string> leaf_bits;  // leaf class id -> path

  const auto merge_best = [&](bool tree_phase) {
    double mi_after = 0.0;
    const auto [i, j] = agg.best_pair(&mi_after);
    size_t lo = i, hi = j;
    if (agg.classes[lo].id > agg.classes[hi].id) std::swap(lo, hi);
    const size_t id_a = agg.classes[lo].id;
    const size_t id_b = agg.classes[hi].id;
    if (tree_phase) {
      for (size_t leaf : agg.classes[lo].leaves) leaf_bits[leaf].insert(0, 1, '0');
      for (size_t leaf : agg.classes[hi].leaves) leaf_bits[leaf].insert(0, 1, '1');
    }
    for (int wd : agg.classes[hi].words) word_slot[static_cast<size_t>(wd)] = lo;
    agg.merge_slots(lo, hi);
    // slots moved: refresh the word -> slot map from class membership
    for (size_t s = 0; s < agg.classes.size(); ++s)
      for (int wd : agg.classes[s].words) word_slot[static_cast<size_t>(wd)] = s;
    if (trace) {
      BrownEvent e;
      e.kind = BrownEvent::Kind::merge;
      e.class_a = id_a;
      e.class_b = id_b;
      e.mi_after = mi_after;
      trace->push_back(std::move(e));
    }
  };

  // Window phase: fill the window, then keep it at `window` classes while
  // inserting the remaining vocabulary.
  size_t next_word = 0;
  while (next_word < v && agg.classes.size() < window) insert_word(static_cast<int>(next_word++));
  while (next_word < v) {
    insert_word(static_cast<int>(next_word++));
    while (agg.classes.size() > window) merge_best(false);
  }
  while (agg.classes.size() > options.num_clusters) merge_best(false);

  // Leaf snapshot: these classes become the hierarchy leaves.
  const double leaf_mi = agg.mi;
  std::vector<std::pair<size_t, std::vector<int>>> leaves;
  for (auto& cls : agg.classes) {
    leaves.emplace_back(cls.id, cls.words);
    cls.leaves = {cls.id};
    leaf_bits[cls.id] = "";
  }
  while (agg.classes.size() > 1) merge_best(true);

  ClusterModel model;
  model.num_clusters = options.num_clusters;
  model.leaf_mi = leaf_mi;
  for (const auto& [leaf_id, members] : leaves)
    for (int wd : members) {
      const std::string& w = words[static_cast<size_t>(wd)];
      model.assignment[w] = leaf_bits.at(leaf_id);
    }
  for (const auto& [tok, f] : freq) {
    model.vocab[tok] = f;
    if (use_oov && f < options.min_frequency) model.assignment[tok] = model.assignment.at(oov);
  }
  if (use_oov) model.vocab[oov] = eff_freq.at(oov);
  return model;
}

void ClusterModel::save(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, std::string>> rows;  // (bits, token)
  rows.reserve(assignment.size());
  for (const auto& [tok, bits] : assignment) rows.emplace_back(bits, tok);
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const auto& [bits, tok] : rows) {
    const auto it = vocab.find(tok);
    out << bits << '\t' << tok << '\t' << (it == vocab.end() ? 0 : it->second) << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

ClusterModel ClusterModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open cluster file '" + path.string() + "'");
  ClusterModel model;
  std::string line;
  size_t line_no = 0;
  std::unordered_map<std::string, bool> distinct;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      fail(path.string() + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    const std::string bits = line.substr(0, t1);
    const std::string token = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string freq_s = line.substr(t2 + 1);
    for (char ch : bits)
      if (ch != '0' && ch != '1')
        fail(path.string() + ":" + std::to_string(line_no) + ": malformed bit-string");
    model.assignment[token] = bits;
    model.vocab[token] = std::strtoull(freq_s.c_str(), nullptr, 10);
    distinct[bits] = true;
  }
  model.num_clusters = distinct.size();
  return model;
}

}  // namespace eed
