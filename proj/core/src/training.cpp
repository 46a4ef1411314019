#include "sgc/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sgc/io_error.hpp"

namespace sgc {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_eps > 0.0))
    throw std::invalid_argument("train: bad Adam constants");
  if (!(scheduler_gamma > 0.0 && scheduler_gamma < 1.0))
    throw std::invalid_argument("train: scheduler_gamma must lie in (0, 1)");
  if (scheduler_patience < 1 || early_stop_patience < 1)
    throw std::invalid_argument("train: patience values must be >= 1");
  if (max_epochs < 0) throw std::invalid_argument("train: max_epochs must be >= 0");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("train: val_fraction must lie in [0, 1)");
}

Perturbation perturb_at(const SdeSpec& spec, const Eigen::VectorXd& x0, double t,
                        const Eigen::VectorXd& z) {
  if (z.size() != x0.size())
    throw std::invalid_argument("perturb_at: z dimension mismatch");
  const Marginal m = marginal(spec, x0, t);
  Perturbation p;
  p.t = t;
  p.sigma = m.std;
  p.z = z;
  p.xt = m.mean + m.std * z;
  p.target = -z / m.std;
  return p;
}

Perturbation sample_perturbation(const SdeSpec& spec, const Eigen::VectorXd& x0,
                                 Rng& rng) {
  const double t = spec.eps + (spec.t_end - spec.eps) * uniform01(rng);
  return perturb_at(spec, x0, t, normal_vector(x0.size(), rng));
}

double dsm_loss(const ScoreFunction& net,
                const std::vector<std::pair<Eigen::VectorXd, int>>& batch,
                const SdeSpec& spec, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("dsm_loss: empty batch");
  double total = 0.0;
  for (const auto& [x0, y] : batch) {
    const Perturbation p = sample_perturbation(spec, x0, rng);
    total += 0.5 * p.sigma * p.sigma *
             (net.evaluate(p.xt, p.t, y) - p.target).squaredNorm();
  }
  return total / double(batch.size());
}

double dsm_loss_at(const ScoreFunction& net, const std::vector<Perturbation>& perts,
                   const std::vector<int>& ys, const SdeSpec& spec) {
  if (perts.empty()) throw std::invalid_argument("dsm_loss_at: empty batch");
  if (perts.size() != ys.size())
    throw std::invalid_argument("dsm_loss_at: label count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < perts.size(); ++i) {
    const Perturbation& p = perts[i];
    total += 0.5 * p.sigma * p.sigma *
             (net.evaluate(p.xt, p.t, ys[i]) - p.target).squaredNorm();
  }
  return total / double(perts.size());
}

AdamOptimizer::AdamOptimizer(Eigen::Index dim, double lr, double beta1, double beta2,
                             double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (dim < 1) throw std::invalid_argument("Adam: dimension must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("Adam: lr must be positive");
  m_.setZero(dim);
  v_.setZero(dim);
}

void AdamOptimizer::set_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("Adam: lr must be positive");
  lr_ = lr;
}

void AdamOptimizer::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam: dimension mismatch");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_.array() + (1.0 - beta2_) * grad.array().square();
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  theta.array() -=
      (lr_ / bc1) * m_.array() / ((v_.array() / bc2).sqrt() + eps_);
}

namespace {

struct FixedBatch {
  Eigen::MatrixXd xt;  // d x M columns
  Eigen::MatrixXd z;   // d x M noise draws
  Eigen::VectorXd ts;
  std::vector<int> ys;
};

// Raw-space DSM loss: with s = raw / std(t) and sigma = std(t), each summand
// sigma^2 ||s - target||^2 / 2 collapses to ||raw + z||^2 / 2.
double raw_loss(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& z) {
  return 0.5 * (raw + z).squaredNorm() / double(raw.cols());
}

}  // namespace

TrainResult train(const LabeledDataset& ds, const SdeSpec& spec,
                  const TrainConfig& cfg) {
  ds.validate();
  spec.validate();
  cfg.validate();

  const int d = int(ds.dim());
  const int n_classes = ds.num_classes;
  TrainReport report;

  auto [train_ds, val_ds] = split(ds, cfg.val_fraction, derive_seed(cfg.seed, "split"));
  if (train_ds.size() == 0)
    throw std::invalid_argument("train: empty training split");
  for (int c = 0; c < n_classes; ++c) {
    if (std::count(train_ds.labels.begin(), train_ds.labels.end(), c) == 0)
      report.warnings.push_back("class " + std::to_string(c) +
                                " absent from training split");
    if (val_ds.size() > 0 &&
        std::count(val_ds.labels.begin(), val_ds.labels.end(), c) == 0)
      report.warnings.push_back("class " + std::to_string(c) +
                                " absent from validation split");
  }
  if (val_ds.size() == 0)
    report.warnings.push_back(
        "empty validation split; scheduling on training loss");

  MlpScoreNet net(d, n_classes, spec, derive_seed(cfg.seed, "init"));
  report.best_epoch = 0;
  report.best_val_loss = std::numeric_limits<double>::quiet_NaN();
  if (cfg.max_epochs == 0) return {std::move(net), std::move(report)};

  // Validation pairs are noised once up front; a fixed set keeps the plateau
  // and early-stop signals monotone in model quality instead of probe noise.
  FixedBatch val;
  if (val_ds.size() > 0) {
    Rng val_rng(splitmix64(derive_seed(cfg.seed, "val")));
    const Eigen::Index m = val_ds.size();
    val.xt.resize(d, m);
    val.z.resize(d, m);
    val.ts.resize(m);
    val.ys.resize(std::size_t(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const Perturbation p =
          sample_perturbation(spec, val_ds.features.row(i).transpose(), val_rng);
      val.xt.col(i) = p.xt;
      val.z.col(i) = p.z;
      val.ts[i] = p.t;
      val.ys[std::size_t(i)] = val_ds.labels[std::size_t(i)];
    }
  }

  Rng shuffle_rng(splitmix64(derive_seed(cfg.seed, "shuffle")));
  Rng pert_rng(splitmix64(derive_seed(cfg.seed, "perturb")));
  AdamOptimizer adam(net.param_count(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2,
                     cfg.adam_eps);
  Eigen::VectorXd theta = net.params();
  Eigen::VectorXd grad(net.param_count());
  Eigen::VectorXd best_theta = theta;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0, plateau = 0;
  double lr = cfg.lr;

  const Eigen::Index n_train = train_ds.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  for (Eigen::Index i = 0; i < n_train; ++i) order[std::size_t(i)] = i;

  MlpScoreNet::Tape tape;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[std::size_t(shuffle_rng() % i)]);

    double epoch_sum = 0.0;
    for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
      Eigen::MatrixXd xt(d, b), z(d, b);
      Eigen::VectorXd ts(b);
      std::vector<int> ys(static_cast<std::size_t>(b));
      for (Eigen::Index k = 0; k < b; ++k) {
        const Eigen::Index row = order[std::size_t(start + k)];
        const Perturbation p =
            sample_perturbation(spec, train_ds.features.row(row).transpose(), pert_rng);
        xt.col(k) = p.xt;
        z.col(k) = p.z;
        ts[k] = p.t;
        ys[std::size_t(k)] = train_ds.labels[std::size_t(row)];
      }
      const Eigen::MatrixXd raw = net.raw_forward(xt, ts, ys, &tape);
      epoch_sum += 0.5 * (raw + z).squaredNorm();
      grad.setZero();
      net.raw_backward(tape, (raw + z) / double(b), grad);
      adam.step(theta, grad);
      net.set_params(theta);
    }
    const double train_loss = epoch_sum / double(n_train);

    double val_loss = train_loss;
    if (val_ds.size() > 0)
      val_loss = raw_loss(net.raw_forward(val.xt, val.ts, val.ys), val.z);
    report.epochs.push_back({epoch, train_loss, val_loss, lr});

    if (val_loss < best_val) {
      best_val = val_loss;
      best_theta = theta;
      report.best_epoch = epoch;
      since_best = 0;
      plateau = 0;
    } else {
      ++since_best;
      ++plateau;
    }
    if (since_best >= cfg.early_stop_patience) break;
    if (plateau >= cfg.scheduler_patience) {
      lr *= cfg.scheduler_gamma;
      adam.set_lr(lr);
      plateau = 0;
    }
  }

  net.set_params(best_theta);
  report.best_val_loss = best_val;
  return {std::move(net), std::move(report)};
}

void write_train_report_csv(const TrainReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  os << "epoch,train_loss,val_loss,lr\n";
  char buf[40];
  for (const EpochStats& e : report.epochs) {
    os << e.epoch;
    for (double v : {e.train_loss, e.val_loss, e.lr}) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

}  // namespace sgc
