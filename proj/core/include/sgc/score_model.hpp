#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgc/sde.hpp"

namespace sgc {

// Interface every score model satisfies: s(x, t, y) approximates the gradient
// of log p_t(x | y). Implementations must be C1 in x so the divergence of the
// probability-flow field exists everywhere.
class ScoreFunction {
 public:
  virtual ~ScoreFunction() = default;

  virtual int input_dim() const = 0;
  virtual int num_classes() const = 0;

  // s(x, t, y); output dimension equals input dimension.
  virtual Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double t, int y) const = 0;

  // (ds/dx) * v, exact forward-mode directional derivative.
  virtual Eigen::VectorXd input_jvp(const Eigen::VectorXd& x, double t, int y,
                                    const Eigen::VectorXd& v) const = 0;

  // v^T * (ds/dx), exact reverse-mode directional derivative.
  virtual Eigen::VectorXd input_vjp(const Eigen::VectorXd& x, double t, int y,
                                    const Eigen::VectorXd& v) const = 0;

 protected:
  void check_args(const Eigen::VectorXd& x, double t, int y, const SdeSpec& spec) const;
};

// Class- and time-conditional MLP score network for vector data.
//
//   input  = [x, fourier(t), embed(y)]
//   hidden = two dense layers of width 128, SiLU activation (smooth, so the
//            input Jacobian has no kinks)
//   output = dense head to input_dim, zero-initialized, scaled by
//            1 / marginal_std(t) so the raw regression target stays O(1)
//            across noise levels
//
// The time embedding is a bank of 32 Gaussian Fourier frequencies drawn
// N(0, 30^2) at construction and frozen, giving [sin, cos] features of
// dimension 64. Class conditioning is a learned 64-wide table fused by
// concatenation. All parameters live in one flat vector (column-major
// per matrix) in the order: class_embed, W1, b1, W2, b2, W3, b3.
class MlpScoreNet : public ScoreFunction {
 public:
  static constexpr int kTimeFrequencies = 32;
  static constexpr double kTimeFrequencyScale = 30.0;
  static constexpr int kClassEmbedDim = 64;
  static constexpr int kHiddenWidth = 128;

  MlpScoreNet(int input_dim, int num_classes, const SdeSpec& spec, std::uint64_t seed);

  int input_dim() const override { return input_dim_; }
  int num_classes() const override { return num_classes_; }
  const SdeSpec& sde() const { return spec_; }
  std::uint64_t init_seed() const { return seed_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double t, int y) const override;
  Eigen::VectorXd input_jvp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override;
  Eigen::VectorXd input_vjp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override;

  Eigen::Index param_count() const { return params_.size(); }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& theta);
  const Eigen::VectorXd& time_frequencies() const { return freqs_; }
  void set_time_frequencies(const Eigen::VectorXd& freqs);

  // Batched raw (unscaled) forward pass: columns of x_cols are samples.
  // Returns the d x B raw head output; evaluate() equals a raw column divided
  // by marginal_std(t).
  struct Tape {
    Eigen::MatrixXd input, z1, h1, z2, h2;
    std::vector<int> labels;
  };
  Eigen::MatrixXd raw_forward(const Eigen::MatrixXd& x_cols, const Eigen::VectorXd& ts,
                              const std::vector<int>& ys, Tape* tape = nullptr) const;

  // Reverse-mode parameter gradient of sum_b adjoint_b . raw_b, accumulated
  // into grad (same layout as params()). Exact; the frozen Fourier bank gets
  // no gradient.
  void raw_backward(const Tape& tape, const Eigen::MatrixXd& raw_adjoint,
                    Eigen::VectorXd& grad) const;

  // [sin(2 pi f_i t), cos(2 pi f_i t)] over the frozen bank.
  Eigen::VectorXd time_features(double t) const;

 private:
  int total_in() const { return input_dim_ + 2 * kTimeFrequencies + kClassEmbedDim; }

  // Column-major views into the flat parameter vector.
  Eigen::Map<const Eigen::MatrixXd> embed() const;
  Eigen::Map<const Eigen::MatrixXd> w1() const;
  Eigen::Map<const Eigen::VectorXd> b1() const;
  Eigen::Map<const Eigen::MatrixXd> w2() const;
  Eigen::Map<const Eigen::VectorXd> b2() const;
  Eigen::Map<const Eigen::MatrixXd> w3() const;
  Eigen::Map<const Eigen::VectorXd> b3() const;

  Eigen::VectorXd assemble_input(const Eigen::VectorXd& x, double t, int y) const;

  int input_dim_;
  int num_classes_;
  SdeSpec spec_;
  std::uint64_t seed_;
  Eigen::VectorXd freqs_;   // frozen Fourier bank
  Eigen::VectorXd params_;  // flat trainable parameters
};

// Checkpoint container: the exact byte format is
//   magic "SGCK" | u32 version = 1 | u64 header length | UTF-8 JSON header |
//   parameters as little-endian f64 in canonical order.
// The JSON header records architecture hyperparameters, the SdeSpec, the
// class count, the init seed, and the frozen Fourier frequencies.
void save_checkpoint(const MlpScoreNet& net, const std::string& path);
MlpScoreNet load_checkpoint(const std::string& path);

}  // namespace sgc
