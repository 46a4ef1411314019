#include "sgc/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "sgc/io_error.hpp"

namespace sgc {

BinaryConfusion confusion(const std::vector<int>& preds,
                          const std::vector<int>& truths, int positive) {
  if (preds.size() != truths.size())
    throw std::invalid_argument("confusion: " + std::to_string(preds.size()) +
                                " predictions vs " + std::to_string(truths.size()) +
                                " truths");
  if (positive != 0 && positive != 1)
    throw std::invalid_argument("confusion: positive class must be 0 or 1");
  for (std::size_t i = 0; i < preds.size(); ++i)
    if ((preds[i] != 0 && preds[i] != 1) || (truths[i] != 0 && truths[i] != 1))
      throw std::invalid_argument("confusion: labels must be binary (0/1)");

  BinaryConfusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool truth_pos = truths[i] == positive;
    const bool pred_pos = preds[i] == positive;
    if (truth_pos)
      (pred_pos ? c.tp : c.fn) += 1;
    else
      (pred_pos ? c.fp : c.tn) += 1;
  }
  return c;
}

std::optional<double> accuracy(const BinaryConfusion& c) {
  if (c.total() == 0) return std::nullopt;
  return double(c.tp + c.tn) / double(c.total());
}

std::optional<double> sensitivity(const BinaryConfusion& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return double(c.tp) / double(c.tp + c.fn);
}

std::optional<double> specificity(const BinaryConfusion& c) {
  if (c.tn + c.fp == 0) return std::nullopt;
  return double(c.tn) / double(c.tn + c.fp);
}

std::optional<double> roc_auc(const std::vector<double>& scores,
                              const std::vector<int>& truths) {
  if (scores.size() != truths.size())
    throw std::invalid_argument("roc_auc: " + std::to_string(scores.size()) +
                                " scores vs " + std::to_string(truths.size()) +
                                " truths");
  long n_pos = 0, n_neg = 0;
  for (int y : truths) {
    if (y != 0 && y != 1) throw std::invalid_argument("roc_auc: labels must be binary");
    (y == 1 ? n_pos : n_neg) += 1;
  }
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Average ranks over tied scores, then the Mann-Whitney statistic.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * double(i + j) + 1.0;  // ranks are 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (truths[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  return (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
         (double(n_pos) * double(n_neg));
}

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& truths,
                    const std::vector<double>& scores, int positive) {
  EvalReport report;
  report.confusion = confusion(preds, truths, positive);
  report.accuracy = accuracy(report.confusion);
  report.sensitivity = sensitivity(report.confusion);
  report.specificity = specificity(report.confusion);
  if (!scores.empty()) report.auc = roc_auc(scores, truths);
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  std::vector<std::string> undefined;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else {
      j[key] = nullptr;
      undefined.push_back(key);
    }
  };
  put("accuracy", report.accuracy);
  put("sensitivity", report.sensitivity);
  put("specificity", report.specificity);
  put("auc", report.auc);
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  j["undefined_metrics"] = undefined;
  return j.dump(2) + "\n";
}

void write_eval_report(const EvalReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  os << eval_report_json(report);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

}  // namespace sgc
