#include "eed/crf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "eed/error.hpp"

namespace eed {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr size_t L = kNumBioesTags;

double log_sum_exp(std::span<const double> v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

TransitionMask TransitionMask::bioes() {
  TransitionMask m;
  constexpr auto O = static_cast<size_t>(BioesTag::O);
  constexpr auto B = static_cast<size_t>(BioesTag::B);
  constexpr auto I = static_cast<size_t>(BioesTag::I);
  constexpr auto E = static_cast<size_t>(BioesTag::E);
  constexpr auto S = static_cast<size_t>(BioesTag::S);
  for (auto& row : m.pair) row.fill(false);
  const auto allow = [&](size_t a, size_t b) { m.pair[a][b] = true; };
  allow(O, O); allow(O, B); allow(O, S);
  allow(B, I); allow(B, E);
  allow(I, I); allow(I, E);
  allow(E, O); allow(E, B); allow(E, S);
  allow(S, O); allow(S, B); allow(S, S);
  m.start = {true, true, false, false, true};  // O, B, S
  m.end = {true, false, false, true, true};    // O, E, S
  return m;
}

TransitionMask TransitionMask::unmasked() {
  TransitionMask m;
  for (auto& row : m.pair) row.fill(true);
  m.start.fill(true);
  m.end.fill(true);
  return m;
}

CrfModel::CrfModel(FeatureTemplateSet templates, TransitionMask mask)
    : templates_(std::move(templates)), mask_(mask), weights_(L * L, 0.0) {}

int CrfModel::attr_id(const std::string& name) const {
  const auto it = attr_index_.find(name);
  return it == attr_index_.end() ? -1 : it->second;
}

int CrfModel::intern_attr(const std::string& name) {
  const auto it = attr_index_.find(name);
  if (it != attr_index_.end()) return it->second;
  const int id = static_cast<int>(attr_names_.size());
  attr_names_.push_back(name);
  attr_index_.emplace(name, id);
  // keep the transition block at the tail
  weights_.insert(weights_.end() - static_cast<std::ptrdiff_t>(L * L), L, 0.0);
  return id;
}

Lattice CrfModel::build_lattice(std::span<const std::string> tokens,
                                const TokenAnnotations& annotations) const {
  Lattice lat;
  lat.attrs.resize(tokens.size());
  for (size_t t = 0; t < tokens.size(); ++t) {
    for (const auto& f : extract_features(tokens, annotations, t, templates_)) {
      const int id = attr_id(f);
      if (id >= 0) lat.attrs[t].push_back(id);
    }
  }
  return lat;
}

Lattice CrfModel::build_lattice_interning(std::span<const std::string> tokens,
                                          const TokenAnnotations& annotations) {
  Lattice lat;
  lat.attrs.resize(tokens.size());
  for (size_t t = 0; t < tokens.size(); ++t)
    for (const auto& f : extract_features(tokens, annotations, t, templates_))
      lat.attrs[t].push_back(intern_attr(f));
  return lat;
}

std::vector<std::array<double, kNumBioesTags>> CrfModel::unary_scores(
    const Lattice& lattice) const {
  std::vector<std::array<double, L>> scores(lattice.size());
  for (size_t t = 0; t < lattice.size(); ++t) {
    scores[t].fill(0.0);
    for (int attr : lattice.attrs[t]) {
      const double* w = &weights_[unary_index(static_cast<size_t>(attr), 0)];
      for (size_t y = 0; y < L; ++y) scores[t][y] += w[y];
    }
  }
  return scores;
}

namespace {

// Forward recursion over masked transitions. `allowed` restricts the label
// set per position (constrained forward-backward); empty means unrestricted.
double forward_log_z(const CrfModel& model,
                     const std::vector<std::array<double, L>>& unary,
                     const std::vector<std::array<bool, L>>* allowed,
                     std::vector<std::array<double, L>>* alpha_out = nullptr) {
  const size_t n = unary.size();
  if (n == 0) fail("forward pass over an empty sequence");
  std::vector<std::array<double, L>> alpha(n);
  const auto ok = [&](size_t t, size_t y) { return allowed == nullptr || (*allowed)[t][y]; };
  for (size_t y = 0; y < L; ++y)
    alpha[0][y] = (model.start_allowed(y) && ok(0, y)) ? unary[0][y] : kNegInf;
  for (size_t t = 1; t < n; ++t) {
    for (size_t y = 0; y < L; ++y) {
      if (!ok(t, y)) {
        alpha[t][y] = kNegInf;
        continue;
      }
      std::array<double, L> terms;
      for (size_t p = 0; p < L; ++p)
        terms[p] = model.transition_allowed(p, y)
                       ? alpha[t - 1][p] + model.transition_weight(p, y)
                       : kNegInf;
      alpha[t][y] = log_sum_exp(terms) + unary[t][y];
    }
  }
  std::array<double, L> finals;
  for (size_t y = 0; y < L; ++y)
    finals[y] = model.end_allowed(y) ? alpha[n - 1][y] : kNegInf;
  if (alpha_out) *alpha_out = std::move(alpha);
  return log_sum_exp(finals);
}

}  // namespace

Marginals log_forward_backward(const CrfModel& model, const Lattice& lattice) {
  const size_t n = lattice.size();
  if (n == 0) fail("forward-backward over an empty sequence");
  const auto unary = model.unary_scores(lattice);

  std::vector<std::array<double, L>> alpha;
  const double log_z = forward_log_z(model, unary, nullptr, &alpha);

  // beta[t][y]: log-sum over suffix continuations given y at t, excluding
  // the unary at t itself.
  std::vector<std::array<double, L>> beta(n);
  for (size_t y = 0; y < L; ++y) beta[n - 1][y] = model.end_allowed(y) ? 0.0 : kNegInf;
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t y = 0; y < L; ++y) {
      std::array<double, L> terms;
      for (size_t q = 0; q < L; ++q)
        terms[q] = model.transition_allowed(y, q)
                       ? model.transition_weight(y, q) + unary[t + 1][q] + beta[t + 1][q]
                       : kNegInf;
      beta[t][y] = log_sum_exp(terms);
    }
  }

  Marginals m;
  m.log_z = log_z;
  m.node.resize(n);
  for (size_t t = 0; t < n; ++t)
    for (size_t y = 0; y < L; ++y) {
      if (alpha[t][y] == kNegInf || beta[t][y] == kNegInf) {
        m.node[t][y] = 0.0;
        continue;
      }
      m.node[t][y] = std::exp(alpha[t][y] + beta[t][y] - log_z);
    }
  if (n > 1) {
    m.edge.resize(n - 1);
    for (size_t t = 0; t + 1 < n; ++t)
      for (size_t a = 0; a < L; ++a)
        for (size_t b = 0; b < L; ++b) {
          if (!model.transition_allowed(a, b) || alpha[t][a] == kNegInf ||
              beta[t + 1][b] == kNegInf) {
            m.edge[t][a * L + b] = 0.0;
            continue;
          }
          m.edge[t][a * L + b] = std::exp(alpha[t][a] + model.transition_weight(a, b) +
                                          unary[t + 1][b] + beta[t + 1][b] - log_z);
        }
  }
  return m;
}

Marginals log_forward_backward(const CrfModel& model, std::span<const std::string> tokens,
                               const TokenAnnotations& annotations) {
  return log_forward_backward(model, model.build_lattice(tokens, annotations));
}

double path_score(const CrfModel& model, const Lattice& lattice,
                  std::span<const BioesTag> tags) {
  const size_t n = lattice.size();
  if (tags.size() != n) fail("path length does not match lattice");
  const auto unary = model.unary_scores(lattice);
  const auto y0 = static_cast<size_t>(tags[0]);
  if (!model.start_allowed(y0)) return kNegInf;
  double score = unary[0][y0];
  for (size_t t = 1; t < n; ++t) {
    const auto p = static_cast<size_t>(tags[t - 1]);
    const auto y = static_cast<size_t>(tags[t]);
    if (!model.transition_allowed(p, y)) return kNegInf;
    score += model.transition_weight(p, y) + unary[t][y];
  }
  if (!model.end_allowed(static_cast<size_t>(tags[n - 1]))) return kNegInf;
  return score;
}

std::vector<BioesTag> viterbi(const CrfModel& model, const Lattice& lattice) {
  const size_t n = lattice.size();
  if (n == 0) fail("viterbi over an empty sequence");
  const auto unary = model.unary_scores(lattice);
  std::vector<std::array<double, L>> delta(n);
  std::vector<std::array<size_t, L>> back(n);
  for (size_t y = 0; y < L; ++y)
    delta[0][y] = model.start_allowed(y) ? unary[0][y] : kNegInf;
  for (size_t t = 1; t < n; ++t) {
    for (size_t y = 0; y < L; ++y) {
      double best = kNegInf;
      size_t arg = 0;
      // ascending scan, strict improvement: ties keep the lowest label index
      for (size_t p = 0; p < L; ++p) {
        if (!model.transition_allowed(p, y)) continue;
        const double s = delta[t - 1][p] + model.transition_weight(p, y);
        if (s > best) {
          best = s;
          arg = p;
        }
      }
      delta[t][y] = best == kNegInf ? kNegInf : best + unary[t][y];
      back[t][y] = arg;
    }
  }
  double best = kNegInf;
  size_t arg = 0;
  for (size_t y = 0; y < L; ++y) {
    if (!model.end_allowed(y)) continue;
    if (delta[n - 1][y] > best) {
      best = delta[n - 1][y];
      arg = y;
    }
  }
  if (best == kNegInf) fail("no mask-valid path exists");
  std::vector<BioesTag> tags(n);
  tags[n - 1] = static_cast<BioesTag>(arg);
  for (size_t t = n - 1; t > 0; --t) {
    arg = back[t][arg];
    tags[t - 1] = static_cast<BioesTag>(arg);
  }
  return tags;
}

std::vector<BioesTag> viterbi(const CrfModel& model, std::span<const std::string> tokens,
                              const TokenAnnotations& annotations) {
  return viterbi(model, model.build_lattice(tokens, annotations));
}

double constrained_marginal(const CrfModel& model, const Lattice& lattice, size_t begin,
                            std::span<const BioesTag> constraint) {
  const size_t n = lattice.size();
  if (begin + constraint.size() > n) fail("constraint range out of bounds");
  if (constraint.empty()) return 1.0;
  const auto unary = model.unary_scores(lattice);
  const double log_z = forward_log_z(model, unary, nullptr);
  std::vector<std::array<bool, L>> allowed(n);
  for (auto& row : allowed) row.fill(true);
  for (size_t i = 0; i < constraint.size(); ++i) {
    allowed[begin + i].fill(false);
    allowed[begin + i][static_cast<size_t>(constraint[i])] = true;
  }
  const double log_zc = forward_log_z(model, unary, &allowed);
  if (log_zc == kNegInf) return 0.0;
  return std::exp(log_zc - log_z);
}

double constrained_marginal(const CrfModel& model, std::span<const std::string> tokens,
                            const TokenAnnotations& annotations, size_t begin,
                            std::span<const BioesTag> constraint) {
  return constrained_marginal(model, model.build_lattice(tokens, annotations), begin,
                              constraint);
}

std::vector<Detection> score_extractions(const CrfModel& model, const Post& post,
                                         const TokenAnnotations& annotations) {
  std::vector<Detection> out;
  if (post.tokens.empty()) return out;
  const Lattice lattice = model.build_lattice(post.tokens, annotations);
  const auto tags = viterbi(model, lattice);
  for (const Span& span : decode_bioes(tags)) {
    Detection d;
    d.post_id = post.id;
    d.start = span.start;
    d.end = span.end;
    for (size_t i = span.start; i < span.end; ++i) {
      if (i > span.start) d.surface += ' ';
      d.surface += post.tokens[i];
    }
    const std::span<const BioesTag> constraint(tags.data() + span.start,
                                               span.end - span.start);
    d.confidence = constrained_marginal(model, lattice, span.start, constraint);
    d.timestamp = post.timestamp;
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

json mask_to_json(const TransitionMask& m) {
  json j;
  j["start"] = m.start;
  j["end"] = m.end;
  json pairs = json::array();
  for (const auto& row : m.pair) pairs.push_back(row);
  j["pairs"] = pairs;
  return j;
}

TransitionMask mask_from_json(const json& j) {
  TransitionMask m;
  for (size_t i = 0; i < L; ++i) {
    m.start[i] = j.at("start").at(i).get<bool>();
    m.end[i] = j.at("end").at(i).get<bool>();
    for (size_t k = 0; k < L; ++k) m.pair[i][k] = j.at("pairs").at(i).at(k).get<bool>();
  }
  return m;
}

json templates_to_json(const FeatureTemplateSet& t) {
  json j;
  j["use_pos"] = t.use_pos;
  j["use_ne"] = t.use_ne;
  j["use_cluster"] = t.use_cluster;
  j["cluster_prefix_lengths"] = t.cluster_prefix_lengths;
  j["description"] = t.description();
  return j;
}

FeatureTemplateSet templates_from_json(const json& j) {
  FeatureTemplateSet t;
  t.use_pos = j.at("use_pos").get<bool>();
  t.use_ne = j.at("use_ne").get<bool>();
  t.use_cluster = j.at("use_cluster").get<bool>();
  t.cluster_prefix_lengths = j.at("cluster_prefix_lengths").get<std::vector<int>>();
  return t;
}

}  // namespace

void CrfModel::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "eed-crf";
  j["version"] = 1;
  j["labels"] = {"O", "B", "I", "E", "S"};
  j["templates"] = templates_to_json(templates_);
  j["transition_mask"] = mask_to_json(mask_);
  j["attrs"] = attr_names_;
  j["weights"] = weights_;
  j["train_config"] = {{"c", train_config_.c},
                       {"max_iterations", train_config_.max_iterations},
                       {"gradient_tolerance", train_config_.gradient_tolerance},
                       {"optimizer", "quasi-newton-limited-memory"}};
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) fail("write to '" + path.string() + "' failed");
}

CrfModel CrfModel::load(const std::filesystem::path& path,
                        const std::optional<FeatureTemplateSet>& expected_templates) {
  std::ifstream in(path);
  if (!in) fail("cannot open model file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("model file '" + path.string() + "': " + e.what());
  }
  if (j.value("format", "") != "eed-crf")
    fail("'" + path.string() + "' is not an eed CRF model file");
  const FeatureTemplateSet templates = templates_from_json(j.at("templates"));
  if (expected_templates &&
      expected_templates->description() != templates.description())
    fail("model template description '" + templates.description() +
         "' does not match expected '" + expected_templates->description() + "'");
  CrfModel model(templates, mask_from_json(j.at("transition_mask")));
  for (const auto& name : j.at("attrs")) model.intern_attr(name.get<std::string>());
  const auto weights = j.at("weights").get<std::vector<double>>();
  if (weights.size() != model.num_weights())
    fail("model file '" + path.string() + "' has inconsistent weight count");
  std::copy(weights.begin(), weights.end(), model.weights_.begin());
  const auto& tc = j.at("train_config");
  model.train_config_.c = tc.at("c").get<double>();
  model.train_config_.max_iterations = tc.at("max_iterations").get<int>();
  model.train_config_.gradient_tolerance = tc.at("gradient_tolerance").get<double>();
  for (double w : model.weights_)
    if (!std::isfinite(w)) fail("model file '" + path.string() + "' has non-finite weights");
  return model;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open detections file '" + path.string() + "'");
  std::vector<Detection> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      Detection d;
      d.post_id = j.at("post_id").get<std::string>();
      d.start = j.at("start").get<size_t>();
      d.end = j.at("end").get<size_t>();
      d.surface = j.at("surface").get<std::string>();
      d.confidence = j.at("confidence").get<double>();
      d.timestamp = parse_instant(j.at("ts").get<std::string>());
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": parse error: " + e.what());
    }
  }
  return out;
}

void save_detections(const std::filesystem::path& path,
                     std::span<const Detection> detections) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  for (const Detection& d : detections) {
    json j;
    j["post_id"] = d.post_id;
    j["start"] = d.start;
    j["end"] = d.end;
    j["surface"] = d.surface;
    j["confidence"] = d.confidence;
    j["ts"] = format_rfc3339(d.timestamp);
    out << j.dump() << '\n';
  }
  if (!out) fail("write to '" + path.string() + "' failed");
}

}  // namespace eed
