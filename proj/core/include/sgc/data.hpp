#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgc/score_model.hpp"

namespace sgc {

// Per-class Gaussian parameters (diagonal covariance). Generators that draw
// from Gaussians record them so tests can rebuild the matching analytic
// oracle without re-threading arguments.
struct GaussianMixtureParams {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::VectorXd> variances;
};

struct LabeledDataset {
  Eigen::MatrixXd features;  // N x D, one row per sample
  std::vector<int> labels;   // N entries in [0, num_classes)
  int num_classes = 0;
  std::string name;
  std::optional<GaussianMixtureParams> gaussian_params;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  // Throws std::invalid_argument on any broken invariant (empty, label out of
  // range, non-finite feature).
  void validate() const;
};

// Exact score of the noised class-conditional density. For a class Gaussian
// N(m_y, S_y) the perturbed marginal stays Gaussian:
//   VP/SubVP: N(a(t) m_y, a(t)^2 S_y + std(t)^2 I),  a(t) = mean_scale
//   VE:       N(m_y, S_y + std(t)^2 I)
// so evaluate returns -(S_t)^{-1} (x - mu_t), and the input Jacobian is the
// constant diagonal -(S_t)^{-1}.
class AnalyticGaussianScore : public ScoreFunction {
 public:
  AnalyticGaussianScore(std::vector<Eigen::VectorXd> means,
                        std::vector<Eigen::VectorXd> variances, const SdeSpec& spec);

  int input_dim() const override { return int(means_[0].size()); }
  int num_classes() const override { return int(means_.size()); }
  const SdeSpec& sde() const { return spec_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double t, int y) const override;
  Eigen::VectorXd input_jvp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override;
  Eigen::VectorXd input_vjp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override;

  // Mean and diagonal variance of the perturbed class marginal at time t.
  void marginal_moments(double t, int y, Eigen::VectorXd& mu,
                        Eigen::VectorXd& var) const;
  // Exact log density of the perturbed class marginal at time t.
  double class_logpdf(const Eigen::VectorXd& x, double t, int y) const;
  // Log density of the unperturbed class Gaussian (t = 0).
  double data_logpdf(const Eigen::VectorXd& x, int y) const;

 private:
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::VectorXd> variances_;
  SdeSpec spec_;
};

// Builds the analytic oracle for a dataset produced by a Gaussian generator.
// Throws std::invalid_argument if the dataset has no recorded parameters.
AnalyticGaussianScore oracle_for(const LabeledDataset& ds, const SdeSpec& spec);

// Balanced two-class Gaussian draw, rows [0, n) labeled 0 and [n, 2n)
// labeled 1. cov is the shared diagonal covariance.
LabeledDataset gen_two_gaussians(int n_per_class, const Eigen::VectorXd& mean0,
                                 const Eigen::VectorXd& mean1,
                                 const Eigen::VectorXd& cov, std::uint64_t seed);

// Two interleaved half-circle arcs with isotropic Gaussian noise:
//   class 0: (cos a, sin a),  class 1: (1 - cos a, 1/2 - sin a),  a ~ U(0, pi).
LabeledDataset gen_two_moons(int n_per_class, double noise_std, std::uint64_t seed);

// Stratified split; fraction is the test share per class (rounded to nearest).
// Deterministic in seed; train and test are disjoint and exhaustive.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double fraction, std::uint64_t seed);

// Binary tensor file, format:
//   magic "SGCT" | u32 version = 1 | u64 N | u64 D | u32 num_classes |
//   N*D little-endian f64 row-major | N labels as u32.
void write_tensor_file(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_tensor_file(const std::string& path);

// CSV alternative: header "f0,...,f{D-1},label", one row per sample, floats
// printed with 17 significant digits so the round-trip is lossless.
void write_csv_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_csv_dataset(const std::string& path);

}  // namespace sgc
