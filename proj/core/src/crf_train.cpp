#include "eed/crf_train.hpp"

#include <algorithm>
#include <cmath>

#include "eed/error.hpp"
#include "eed/parallel.hpp"

namespace eed {

namespace {
constexpr size_t L = kNumBioesTags;
}

CrfObjective::CrfObjective(CrfModel model, std::vector<Lattice> lattices,
                           std::vector<std::vector<BioesTag>> gold, double c, int threads)
    : model_(std::move(model)),
      lattices_(std::move(lattices)),
      gold_(std::move(gold)),
      c_(c),
      threads_(threads) {
  if (c_ <= 0) fail("prior variance c must be positive");
  if (lattices_.size() != gold_.size()) fail("lattice/gold size mismatch");
  empirical_.assign(model_.num_weights(), 0.0);
  for (size_t i = 0; i < lattices_.size(); ++i) {
    const auto& lat = lattices_[i];
    const auto& tags = gold_[i];
    for (size_t t = 0; t < lat.size(); ++t) {
      const auto y = static_cast<size_t>(tags[t]);
      for (int attr : lat.attrs[t])
        empirical_[model_.unary_index(static_cast<size_t>(attr), y)] += 1.0;
      if (t > 0)
        empirical_[model_.transition_index(static_cast<size_t>(tags[t - 1]), y)] += 1.0;
    }
  }
  const size_t blocks = (lattices_.size() + block_size_ - 1) / block_size_;
  block_grad_.assign(blocks, std::vector<double>(empirical_.size(), 0.0));
  block_log_z_.assign(blocks, 0.0);
}

double CrfObjective::operator()(std::span<const double> w, std::span<double> grad) const {
  std::copy(w.begin(), w.end(), model_.weights().begin());
  const size_t blocks = block_grad_.size();
  parallel_blocks(blocks, threads_, [&](size_t b) {
    auto& g = block_grad_[b];
    std::fill(g.begin(), g.end(), 0.0);
    double log_z_sum = 0.0;
    const size_t lo = b * block_size_;
    const size_t hi = std::min(lo + block_size_, lattices_.size());
    for (size_t i = lo; i < hi; ++i) {
      const auto& lat = lattices_[i];
      const Marginals m = log_forward_backward(model_, lat);
      log_z_sum += m.log_z;
      for (size_t t = 0; t < lat.size(); ++t)
        for (int attr : lat.attrs[t]) {
          double* dst = &g[model_.unary_index(static_cast<size_t>(attr), 0)];
          for (size_t y = 0; y < L; ++y) dst[y] += m.node[t][y];
        }
      for (size_t t = 0; t + 1 < lat.size(); ++t) {
        double* dst = &g[model_.transition_index(0, 0)];
        for (size_t k = 0; k < L * L; ++k) dst[k] += m.edge[t][k];
      }
    }
    block_log_z_[b] = log_z_sum;
  });

  std::fill(grad.begin(), grad.end(), 0.0);
  double log_z_total = 0.0;
  for (size_t b = 0; b < blocks; ++b) {  // fixed reduction order
    log_z_total += block_log_z_[b];
    const auto& g = block_grad_[b];
    for (size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
  }

  double w_dot_emp = 0.0, w_dot_w = 0.0;
  for (size_t j = 0; j < grad.size(); ++j) {
    grad[j] += -empirical_[j] + w[j] / c_;
    w_dot_emp += w[j] * empirical_[j];
    w_dot_w += w[j] * w[j];
  }
  return log_z_total - w_dot_emp + w_dot_w / (2.0 * c_);
}

CrfModel train_crf(std::span<const TaggedSequence> dataset,
                   const FeatureTemplateSet& templates, const TrainConfig& cfg,
                   TrainReport* report) {
  if (dataset.empty()) fail("training dataset is empty");
  if (cfg.c <= 0) fail("prior variance c must be positive");
  for (size_t i = 0; i < dataset.size(); ++i) {
    const auto& seq = dataset[i];
    if (seq.tokens.empty()) fail("training sequence " + std::to_string(i) + " is empty");
    if (seq.tags.size() != seq.tokens.size())
      fail("training sequence " + std::to_string(i) + " has tag/token length mismatch");
    if (!is_valid_bioes(seq.tags))
      fail("training sequence " + std::to_string(i) + " has an invalid BIOES tag sequence");
  }

  CrfModel model(templates, TransitionMask::bioes());
  std::vector<Lattice> lattices;
  std::vector<std::vector<BioesTag>> gold;
  lattices.reserve(dataset.size());
  gold.reserve(dataset.size());
  for (const auto& seq : dataset) {
    lattices.push_back(model.build_lattice_interning(seq.tokens, seq.annotations));
    gold.push_back(seq.tags);
  }

  CrfObjective objective(model, std::move(lattices), std::move(gold), cfg.c, cfg.threads);

  std::vector<double> w(model.num_weights(), 0.0);
  LbfgsOptions opt;
  opt.max_iterations = cfg.max_iterations;
  opt.gradient_tolerance = cfg.gradient_tolerance;
  const LbfgsReport lbfgs = lbfgs_minimize(
      [&objective](std::span<const double> x, std::span<double> g) { return objective(x, g); },
      w, opt);

  std::copy(w.begin(), w.end(), model.weights().begin());
  model.set_train_config(cfg);
  if (report) {
    report->num_sequences = dataset.size();
    report->num_attributes = model.num_attrs();
    report->optimizer = lbfgs;
  }
  return model;
}

}  // namespace eed
