#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgc/data.hpp"
#include "sgc/rng.hpp"
#include "sgc/score_model.hpp"

namespace sgc {

struct TrainConfig {
  int batch_size = 32;
  double lr = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double scheduler_gamma = 0.25;  // LR multiplier on validation plateau
  int scheduler_patience = 10;
  int early_stop_patience = 25;
  int max_epochs = 500;
  std::uint64_t seed = 0;
  double val_fraction = 0.1;

  void validate() const;
};

// One noised training pair: t ~ U(eps, t_end), z ~ N(0, I),
// xt = mean(x0, t) + sigma * z, and the kernel score
// target = (mean - xt) / sigma^2 = -z / sigma.
struct Perturbation {
  double t = 0.0;
  double sigma = 0.0;
  Eigen::VectorXd z;
  Eigen::VectorXd xt;
  Eigen::VectorXd target;
};

Perturbation sample_perturbation(const SdeSpec& spec, const Eigen::VectorXd& x0,
                                 Rng& rng);
// Deterministic variant with (t, z) supplied by the caller.
Perturbation perturb_at(const SdeSpec& spec, const Eigen::VectorXd& x0, double t,
                        const Eigen::VectorXd& z);

// Denoising score-matching loss over a batch with weight sigma(t)^2:
//   (1/2N) sum_i sigma_i^2 ||s(xt_i, t_i, y_i) - target_i||^2,
// each summand equal to ||sigma_i s + z_i||^2 / 2, O(1) across noise levels.
double dsm_loss(const ScoreFunction& net,
                const std::vector<std::pair<Eigen::VectorXd, int>>& batch,
                const SdeSpec& spec, Rng& rng);
// Same loss on pre-drawn perturbations (ys aligned with perturbations).
double dsm_loss_at(const ScoreFunction& net, const std::vector<Perturbation>& perts,
                   const std::vector<int>& ys, const SdeSpec& spec);

class AdamOptimizer {
 public:
  AdamOptimizer(Eigen::Index dim, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);
  double lr() const { return lr_; }
  void set_lr(double lr);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::vector<std::string> warnings;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

struct TrainResult {
  MlpScoreNet net;
  TrainReport report;
};

// Mini-batch Adam on the DSM loss with a stratified validation split,
// plateau LR decay, early stopping, and best-validation weight restore.
// Validation perturbations are drawn once up front so the plateau signal is
// not noise-driven. Deterministic in cfg.seed.
TrainResult train(const LabeledDataset& ds, const SdeSpec& spec,
                  const TrainConfig& cfg);

// CSV with columns epoch, train_loss, val_loss, lr.
void write_train_report_csv(const TrainReport& report, const std::string& path);

}  // namespace sgc
