#include "sgc/classifier.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sgc/io_error.hpp"

namespace sgc {

Eigen::VectorXd class_log_likelihoods(const SdeSpec& spec, const ScoreFunction& net,
                                      const Eigen::VectorXd& x0, int n,
                                      const LikelihoodConfig& cfg) {
  if (n < 2) throw std::invalid_argument("class_log_likelihoods: need n >= 2 classes");
  if (n > net.num_classes())
    throw std::invalid_argument("class_log_likelihoods: model has only " +
                                std::to_string(net.num_classes()) + " classes");
  Eigen::VectorXd log_likes(n);
  for (int y = 0; y < n; ++y) log_likes[y] = log_likelihood(spec, net, x0, y, cfg);
  return log_likes;
}

Eigen::VectorXd posterior(const Eigen::VectorXd& log_likes) {
  if (log_likes.size() < 1) throw std::invalid_argument("posterior: empty input");
  double max_ll = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < log_likes.size(); ++i) {
    if (std::isnan(log_likes[i]) ||
        log_likes[i] == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("posterior: log-likelihoods must be < +inf");
    max_ll = std::max(max_ll, log_likes[i]);
  }
  if (max_ll == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("posterior: all log-likelihoods are -inf");

  // scalar std::exp maps a -inf entry to exactly 0 (Eigen's packet exp does not)
  Eigen::VectorXd p(log_likes.size());
  for (Eigen::Index i = 0; i < log_likes.size(); ++i)
    p[i] = std::exp(log_likes[i] - max_ll);
  return p / p.sum();
}

ClassificationResult classify(const SdeSpec& spec, const ScoreFunction& net,
                              const Eigen::VectorXd& x0, int n,
                              const LikelihoodConfig& cfg) {
  ClassificationResult result;
  result.log_likes = class_log_likelihoods(spec, net, x0, n, cfg);
  result.posterior = posterior(result.log_likes);
  result.predicted = 0;
  for (int y = 1; y < n; ++y)
    if (result.posterior[y] > result.posterior[result.predicted]) result.predicted = y;
  return result;
}

std::vector<ClassificationResult> classify_dataset(const SdeSpec& spec,
                                                   const ScoreFunction& net,
                                                   const LabeledDataset& ds, int n,
                                                   const LikelihoodConfig& cfg) {
  ds.validate();
  if (ds.dim() != net.input_dim())
    throw std::invalid_argument("classify_dataset: dataset dimension " +
                                std::to_string(ds.dim()) + " != model dimension " +
                                std::to_string(net.input_dim()));
  std::vector<ClassificationResult> results;
  results.reserve(std::size_t(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    LikelihoodConfig per_input = cfg;
    per_input.seed = derive_seed(cfg.seed, "probes", std::uint64_t(i));
    ClassificationResult r =
        classify(spec, net, ds.features.row(i).transpose(), n, per_input);
    r.ground_truth = ds.labels[std::size_t(i)];
    results.push_back(std::move(r));
  }
  return results;
}

void write_predictions_csv(const std::vector<ClassificationResult>& results,
                           const std::string& path) {
  if (results.empty())
    throw std::invalid_argument("write_predictions_csv: no results");
  const Eigen::Index n = results.front().log_likes.size();

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  os << "index,ground_truth,predicted";
  for (Eigen::Index y = 0; y < n; ++y) os << ",log_like_" << y;
  for (Eigen::Index y = 0; y < n; ++y) os << ",posterior_" << y;
  os << '\n';

  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ClassificationResult& r = results[i];
    if (r.log_likes.size() != n)
      throw std::invalid_argument("write_predictions_csv: ragged class counts");
    os << i << ',';
    if (r.ground_truth) os << *r.ground_truth;
    os << ',' << r.predicted;
    for (Eigen::Index y = 0; y < n; ++y) put(r.log_likes[y]);
    for (Eigen::Index y = 0; y < n; ++y) put(r.posterior[y]);
    os << '\n';
  }
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

}  // namespace sgc
