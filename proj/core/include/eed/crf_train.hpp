#pragma once

#include <span>
#include <vector>

#include "eed/crf.hpp"
#include "eed/lbfgs.hpp"

namespace eed {

/// Regularized negative conditional log-likelihood of a fixed dataset:
///   f(w) = sum_i [log Z_i(w) - w . counts_i] + |w|^2 / (2c)
/// The gradient is (expected counts - empirical counts) + w / c. Expected
/// counts are accumulated per fixed-size block and reduced in block order,
/// so results are identical for any thread count.
class CrfObjective {
 public:
  CrfObjective(CrfModel model, std::vector<Lattice> lattices,
               std::vector<std::vector<BioesTag>> gold, double c, int threads = 1);

  size_t dim() const { return empirical_.size(); }
  double operator()(std::span<const double> w, std::span<double> grad) const;

 private:
  mutable CrfModel model_;
  std::vector<Lattice> lattices_;
  std::vector<std::vector<BioesTag>> gold_;
  std::vector<double> empirical_;
  double c_;
  int threads_;
  size_t block_size_ = 64;
  mutable std::vector<std::vector<double>> block_grad_;
  mutable std::vector<double> block_log_z_;
};

struct TrainReport {
  size_t num_sequences = 0;
  size_t num_attributes = 0;
  LbfgsReport optimizer;
};

/// Builds the feature index over the dataset and trains by maximizing the
/// L2-penalized conditional log-likelihood with limited-memory quasi-Newton
/// iteration. Throws before optimization if any tag sequence is invalid.
CrfModel train_crf(std::span<const TaggedSequence> dataset,
                   const FeatureTemplateSet& templates, const TrainConfig& cfg,
                   TrainReport* report = nullptr);

}  // namespace eed
