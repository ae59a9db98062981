#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eed/corpus.hpp"
#include "eed/features.hpp"
#include "eed/tagging.hpp"
#include "eed/time.hpp"

namespace eed {

/// Training hyperparameters, echoed into the model file.
struct TrainConfig {
  double c = 0.125;  // Gaussian prior variance; penalty is |w|^2 / (2c)
  int max_iterations = 200;
  double gradient_tolerance = 1e-5;
  int threads = 1;
};

/// Hard BIOES transition constraints plus start/end state validity.
struct TransitionMask {
  std::array<bool, kNumBioesTags> start{};
  std::array<bool, kNumBioesTags> end{};
  std::array<std::array<bool, kNumBioesTags>, kNumBioesTags> pair{};

  static TransitionMask bioes();     // forbids exactly the BIOES-invalid moves
  static TransitionMask unmasked();  // everything allowed (testing / ablation)

  friend bool operator==(const TransitionMask&, const TransitionMask&) = default;
};

/// A token sequence with gold BIOES tags; the training unit.
struct TaggedSequence {
  std::vector<std::string> tokens;
  std::vector<BioesTag> tags;
  TokenAnnotations annotations;
};

/// Sequence prepared for inference: per-position ids of known observation
/// features. Unknown features are dropped.
struct Lattice {
  std::vector<std::vector<int>> attrs;
  size_t size() const { return attrs.size(); }
};

/// Linear-chain CRF over the fixed BIOES alphabet with an explicit
/// observation-feature index. Weight layout: one weight per (attribute,
/// label) pair followed by a dense label-transition block.
class CrfModel {
 public:
  explicit CrfModel(FeatureTemplateSet templates = {},
                    TransitionMask mask = TransitionMask::bioes());

  size_t num_labels() const { return kNumBioesTags; }
  size_t num_attrs() const { return attr_names_.size(); }
  size_t num_weights() const { return weights_.size(); }

  const FeatureTemplateSet& templates() const { return templates_; }
  const TransitionMask& mask() const { return mask_; }
  const TrainConfig& train_config() const { return train_config_; }
  void set_train_config(const TrainConfig& cfg) { train_config_ = cfg; }

  int attr_id(const std::string& name) const;  // -1 when unknown
  int intern_attr(const std::string& name);    // grows weights with zeros
  const std::string& attr_name(size_t id) const { return attr_names_[id]; }

  size_t unary_index(size_t attr, size_t label) const {
    return attr * kNumBioesTags + label;
  }
  size_t transition_index(size_t prev, size_t cur) const {
    return attr_names_.size() * kNumBioesTags + prev * kNumBioesTags + cur;
  }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }

  double transition_weight(size_t prev, size_t cur) const {
    return weights_[transition_index(prev, cur)];
  }
  bool transition_allowed(size_t prev, size_t cur) const { return mask_.pair[prev][cur]; }
  bool start_allowed(size_t label) const { return mask_.start[label]; }
  bool end_allowed(size_t label) const { return mask_.end[label]; }

  /// Looks up features for every position; unknown features are dropped.
  Lattice build_lattice(std::span<const std::string> tokens,
                        const TokenAnnotations& annotations) const;
  /// Interning variant used while building the training index.
  Lattice build_lattice_interning(std::span<const std::string> tokens,
                                  const TokenAnnotations& annotations);

  /// Unary score table: score[t][y] = sum of weights of the features active
  /// at position t under label y.
  std::vector<std::array<double, kNumBioesTags>> unary_scores(const Lattice& lattice) const;

  void save(const std::filesystem::path& path) const;
  /// Throws when `expected_templates` is given and does not match the
  /// template description stored in the file.
  static CrfModel load(const std::filesystem::path& path,
                       const std::optional<FeatureTemplateSet>& expected_templates = {});

 private:
  FeatureTemplateSet templates_;
  TransitionMask mask_;
  TrainConfig train_config_;
  std::vector<std::string> attr_names_;
  std::unordered_map<std::string, int> attr_index_;
  std::vector<double> weights_;  // attrs * 5, then 5x5 transitions
};

/// Forward-backward quantities. Node marginals are P(y_t = y | x); edge
/// marginals P(y_t = a, y_{t+1} = b | x) are stored flattened at
/// edge[t][a * 5 + b] for t in [0, n-1).
struct Marginals {
  double log_z = 0.0;
  std::vector<std::array<double, kNumBioesTags>> node;
  std::vector<std::array<double, kNumBioesTags * kNumBioesTags>> edge;
};

Marginals log_forward_backward(const CrfModel& model, const Lattice& lattice);
Marginals log_forward_backward(const CrfModel& model, std::span<const std::string> tokens,
                               const TokenAnnotations& annotations);

/// Score of one complete path; -inf when the path violates the mask.
double path_score(const CrfModel& model, const Lattice& lattice,
                  std::span<const BioesTag> tags);

/// Max-score mask-valid path. Ties break toward the lowest label index at
/// the latest differing position.
std::vector<BioesTag> viterbi(const CrfModel& model, const Lattice& lattice);
std::vector<BioesTag> viterbi(const CrfModel& model, std::span<const std::string> tokens,
                              const TokenAnnotations& annotations);

/// P(tags over [begin, begin + constraint.size()) = constraint | x) via the
/// constrained forward pass. An empty constraint yields 1; a mask-invalid
/// constraint yields 0.
double constrained_marginal(const CrfModel& model, const Lattice& lattice, size_t begin,
                            std::span<const BioesTag> constraint);
double constrained_marginal(const CrfModel& model, std::span<const std::string> tokens,
                            const TokenAnnotations& annotations, size_t begin,
                            std::span<const BioesTag> constraint);

/// An extracted span with its constrained-forward-backward confidence.
struct Detection {
  std::string post_id;
  size_t start = 0;
  size_t end = 0;
  std::string surface;  // original (non-canonical) tokens joined by spaces
  double confidence = 0.0;
  Instant timestamp;
};

/// Viterbi-decode the post and attach the constrained marginal of each
/// decoded span as its confidence.
std::vector<Detection> score_extractions(const CrfModel& model, const Post& post,
                                         const TokenAnnotations& annotations);

std::vector<Detection> load_detections(const std::filesystem::path& path);
void save_detections(const std::filesystem::path& path, std::span<const Detection> detections);

}  // namespace eed
