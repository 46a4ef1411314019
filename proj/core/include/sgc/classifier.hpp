#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgc/data.hpp"
#include "sgc/likelihood.hpp"

namespace sgc {

struct ClassificationResult {
  Eigen::VectorXd log_likes;  // per-class conditional log-likelihoods
  Eigen::VectorXd posterior;  // uniform-prior Bayes posterior, sums to 1
  int predicted = 0;          // argmax posterior, ties -> smallest index
  std::optional<int> ground_truth;
};

// log p(x0 | y) for y = 0..n-1. One config means one probe draw shared by all
// classes, so entry differences reflect conditioning rather than probe noise.
Eigen::VectorXd class_log_likelihoods(const SdeSpec& spec, const ScoreFunction& net,
                                      const Eigen::VectorXd& x0, int n,
                                      const LikelihoodConfig& cfg);

// Softmax via log-sum-exp with max subtraction; -inf entries get probability
// zero. All -inf (no class has support) is an error.
Eigen::VectorXd posterior(const Eigen::VectorXd& log_likes);

ClassificationResult classify(const SdeSpec& spec, const ScoreFunction& net,
                              const Eigen::VectorXd& x0, int n,
                              const LikelihoodConfig& cfg);

// Classifies every row against classes 0..n-1; input i uses the probe
// substream (cfg.seed, i) so results are independent of evaluation order.
// Ground truth is copied from the dataset labels.
std::vector<ClassificationResult> classify_dataset(const SdeSpec& spec,
                                                   const ScoreFunction& net,
                                                   const LabeledDataset& ds, int n,
                                                   const LikelihoodConfig& cfg);

// One row per input: index, ground_truth (empty if absent), predicted,
// log_like_0..n-1, posterior_0..n-1.
void write_predictions_csv(const std::vector<ClassificationResult>& results,
                           const std::string& path);

}  // namespace sgc
