#include "sgc/score_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sgc/rng.hpp"

namespace sgc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
inline double silu(double z) { return z * sigmoid(z); }
inline double silu_grad(double z) {
  const double s = sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

Eigen::MatrixXd silu_mat(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return silu(v); });
}
Eigen::MatrixXd silu_grad_mat(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return silu_grad(v); });
}

}  // namespace

void ScoreFunction::check_args(const Eigen::VectorXd& x, double t, int y,
                               const SdeSpec& spec) const {
  if (x.size() != input_dim())
    throw std::invalid_argument("score: x has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(input_dim()));
  if (y < 0 || y >= num_classes())
    throw std::invalid_argument("score: class label " + std::to_string(y) +
                                " outside [0, " + std::to_string(num_classes()) + ")");
  if (!(t >= spec.eps && t <= spec.t_end))
    throw std::invalid_argument("score: t=" + std::to_string(t) + " outside [eps, t_end]");
}

MlpScoreNet::MlpScoreNet(int input_dim, int num_classes, const SdeSpec& spec,
                         std::uint64_t seed)
    : input_dim_(input_dim), num_classes_(num_classes), spec_(spec), seed_(seed) {
  if (input_dim < 1) throw std::invalid_argument("MlpScoreNet: input_dim must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("MlpScoreNet: num_classes must be >= 1");
  spec_.validate();

  Rng rng(splitmix64(seed));
  freqs_.resize(kTimeFrequencies);
  for (int i = 0; i < kTimeFrequencies; ++i)
    freqs_[i] = kTimeFrequencyScale * standard_normal(rng);

  const int in = total_in();
  const int h = kHiddenWidth;
  const Eigen::Index n_params =
      Eigen::Index(kClassEmbedDim) * num_classes_ + Eigen::Index(h) * in + h +
      Eigen::Index(h) * h + h + Eigen::Index(input_dim_) * h + input_dim_;
  params_.setZero(n_params);

  double* p = params_.data();
  // Class embedding: standard normal entries.
  for (Eigen::Index i = 0; i < Eigen::Index(kClassEmbedDim) * num_classes_; ++i)
    p[i] = standard_normal(rng);
  p += Eigen::Index(kClassEmbedDim) * num_classes_;
  // Hidden layers: fan-in-scaled uniform for weights and biases.
  auto fill_uniform = [&rng](double* dst, Eigen::Index n, double bound) {
    for (Eigen::Index i = 0; i < n; ++i) dst[i] = bound * (2.0 * uniform01(rng) - 1.0);
  };
  fill_uniform(p, Eigen::Index(h) * in, 1.0 / std::sqrt(double(in)));
  p += Eigen::Index(h) * in;
  fill_uniform(p, h, 1.0 / std::sqrt(double(in)));
  p += h;
  fill_uniform(p, Eigen::Index(h) * h, 1.0 / std::sqrt(double(h)));
  p += Eigen::Index(h) * h;
  fill_uniform(p, h, 1.0 / std::sqrt(double(h)));
  // Output head stays zero so the initial score is identically 0.
}

Eigen::Map<const Eigen::MatrixXd> MlpScoreNet::embed() const {
  return {params_.data(), kClassEmbedDim, num_classes_};
}
Eigen::Map<const Eigen::MatrixXd> MlpScoreNet::w1() const {
  const double* p = params_.data() + Eigen::Index(kClassEmbedDim) * num_classes_;
  return {p, kHiddenWidth, total_in()};
}
Eigen::Map<const Eigen::VectorXd> MlpScoreNet::b1() const {
  const double* p = params_.data() + Eigen::Index(kClassEmbedDim) * num_classes_ +
                    Eigen::Index(kHiddenWidth) * total_in();
  return {p, kHiddenWidth};
}
Eigen::Map<const Eigen::MatrixXd> MlpScoreNet::w2() const {
  const double* p = b1().data() + kHiddenWidth;
  return {p, kHiddenWidth, kHiddenWidth};
}
Eigen::Map<const Eigen::VectorXd> MlpScoreNet::b2() const {
  const double* p = w2().data() + Eigen::Index(kHiddenWidth) * kHiddenWidth;
  return {p, kHiddenWidth};
}
Eigen::Map<const Eigen::MatrixXd> MlpScoreNet::w3() const {
  const double* p = b2().data() + kHiddenWidth;
  return {p, input_dim_, kHiddenWidth};
}
Eigen::Map<const Eigen::VectorXd> MlpScoreNet::b3() const {
  const double* p = w3().data() + Eigen::Index(input_dim_) * kHiddenWidth;
  return {p, input_dim_};
}

void MlpScoreNet::set_params(const Eigen::VectorXd& theta) {
  if (theta.size() != params_.size())
    throw std::invalid_argument("set_params: expected " + std::to_string(params_.size()) +
                                " parameters, got " + std::to_string(theta.size()));
  params_ = theta;
}

void MlpScoreNet::set_time_frequencies(const Eigen::VectorXd& freqs) {
  if (freqs.size() != kTimeFrequencies)
    throw std::invalid_argument("set_time_frequencies: expected " +
                                std::to_string(int(kTimeFrequencies)) + " frequencies");
  freqs_ = freqs;
}

Eigen::VectorXd MlpScoreNet::time_features(double t) const {
  Eigen::VectorXd f(2 * kTimeFrequencies);
  for (int i = 0; i < kTimeFrequencies; ++i) {
    const double a = kTwoPi * freqs_[i] * t;
    f[i] = std::sin(a);
    f[kTimeFrequencies + i] = std::cos(a);
  }
  return f;
}

Eigen::VectorXd MlpScoreNet::assemble_input(const Eigen::VectorXd& x, double t, int y) const {
  Eigen::VectorXd in(total_in());
  in.head(input_dim_) = x;
  in.segment(input_dim_, 2 * kTimeFrequencies) = time_features(t);
  in.tail(kClassEmbedDim) = embed().col(y);
  return in;
}

Eigen::VectorXd MlpScoreNet::evaluate(const Eigen::VectorXd& x, double t, int y) const {
  check_args(x, t, y, spec_);
  const Eigen::VectorXd in = assemble_input(x, t, y);
  const Eigen::VectorXd h1v = silu_mat(w1() * in + b1());
  const Eigen::VectorXd h2v = silu_mat(w2() * h1v + b2());
  return (w3() * h2v + b3()) / marginal_std(spec_, t);
}

Eigen::VectorXd MlpScoreNet::input_jvp(const Eigen::VectorXd& x, double t, int y,
                                       const Eigen::VectorXd& v) const {
  check_args(x, t, y, spec_);
  if (v.size() != input_dim_)
    throw std::invalid_argument("input_jvp: tangent dimension mismatch");
  const Eigen::VectorXd in = assemble_input(x, t, y);
  const Eigen::VectorXd z1v = w1() * in + b1();
  const Eigen::VectorXd z2v = w2() * silu_mat(z1v) + b2();
  // Tangent enters only through the x block; t and y are held fixed.
  const Eigen::VectorXd dz1 = w1().leftCols(input_dim_) * v;
  const Eigen::VectorXd dh1 = silu_grad_mat(z1v).cwiseProduct(dz1);
  const Eigen::VectorXd dz2 = w2() * dh1;
  const Eigen::VectorXd dh2 = silu_grad_mat(z2v).cwiseProduct(dz2);
  return (w3() * dh2) / marginal_std(spec_, t);
}

Eigen::VectorXd MlpScoreNet::input_vjp(const Eigen::VectorXd& x, double t, int y,
                                       const Eigen::VectorXd& v) const {
  check_args(x, t, y, spec_);
  if (v.size() != input_dim_)
    throw std::invalid_argument("input_vjp: adjoint dimension mismatch");
  const Eigen::VectorXd in = assemble_input(x, t, y);
  const Eigen::VectorXd z1v = w1() * in + b1();
  const Eigen::VectorXd z2v = w2() * silu_mat(z1v) + b2();
  const Eigen::VectorXd a_out = v / marginal_std(spec_, t);
  const Eigen::VectorXd a_z2 = silu_grad_mat(z2v).cwiseProduct(w3().transpose() * a_out);
  const Eigen::VectorXd a_z1 = silu_grad_mat(z1v).cwiseProduct(w2().transpose() * a_z2);
  return w1().leftCols(input_dim_).transpose() * a_z1;
}

Eigen::MatrixXd MlpScoreNet::raw_forward(const Eigen::MatrixXd& x_cols,
                                         const Eigen::VectorXd& ts,
                                         const std::vector<int>& ys, Tape* tape) const {
  const Eigen::Index b = x_cols.cols();
  if (x_cols.rows() != input_dim_ || ts.size() != b || Eigen::Index(ys.size()) != b)
    throw std::invalid_argument("raw_forward: batch shape mismatch");

  Eigen::MatrixXd in(total_in(), b);
  for (Eigen::Index i = 0; i < b; ++i) {
    in.col(i).head(input_dim_) = x_cols.col(i);
    in.col(i).segment(input_dim_, 2 * kTimeFrequencies) = time_features(ts[i]);
    in.col(i).tail(kClassEmbedDim) = embed().col(ys[i]);
  }
  Eigen::MatrixXd z1m = (w1() * in).colwise() + b1();
  Eigen::MatrixXd h1m = silu_mat(z1m);
  Eigen::MatrixXd z2m = (w2() * h1m).colwise() + b2();
  Eigen::MatrixXd h2m = silu_mat(z2m);
  Eigen::MatrixXd raw = (w3() * h2m).colwise() + b3();
  if (tape) {
    tape->input = std::move(in);
    tape->z1 = std::move(z1m);
    tape->h1 = std::move(h1m);
    tape->z2 = std::move(z2m);
    tape->h2 = std::move(h2m);
    tape->labels = ys;
  }
  return raw;
}

void MlpScoreNet::raw_backward(const Tape& tape, const Eigen::MatrixXd& raw_adjoint,
                               Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) grad.setZero(params_.size());
  const Eigen::Index b = raw_adjoint.cols();
  if (tape.h2.cols() != b) throw std::invalid_argument("raw_backward: tape/adjoint mismatch");

  const int h = kHiddenWidth;
  const int in = total_in();
  double* g = grad.data();
  Eigen::Map<Eigen::MatrixXd> g_embed(g, kClassEmbedDim, num_classes_);
  g += Eigen::Index(kClassEmbedDim) * num_classes_;
  Eigen::Map<Eigen::MatrixXd> g_w1(g, h, in);
  g += Eigen::Index(h) * in;
  Eigen::Map<Eigen::VectorXd> g_b1(g, h);
  g += h;
  Eigen::Map<Eigen::MatrixXd> g_w2(g, h, h);
  g += Eigen::Index(h) * h;
  Eigen::Map<Eigen::VectorXd> g_b2(g, h);
  g += h;
  Eigen::Map<Eigen::MatrixXd> g_w3(g, input_dim_, h);
  g += Eigen::Index(input_dim_) * h;
  Eigen::Map<Eigen::VectorXd> g_b3(g, input_dim_);

  g_w3.noalias() += raw_adjoint * tape.h2.transpose();
  g_b3.noalias() += raw_adjoint.rowwise().sum();
  const Eigen::MatrixXd a_z2 =
      silu_grad_mat(tape.z2).cwiseProduct(w3().transpose() * raw_adjoint);
  g_w2.noalias() += a_z2 * tape.h1.transpose();
  g_b2.noalias() += a_z2.rowwise().sum();
  const Eigen::MatrixXd a_z1 =
      silu_grad_mat(tape.z1).cwiseProduct(w2().transpose() * a_z2);
  g_w1.noalias() += a_z1 * tape.input.transpose();
  g_b1.noalias() += a_z1.rowwise().sum();
  const Eigen::MatrixXd a_in = w1().transpose() * a_z1;
  for (Eigen::Index i = 0; i < b; ++i)
    g_embed.col(tape.labels[i]) += a_in.col(i).tail(kClassEmbedDim);
}

}  // namespace sgc
