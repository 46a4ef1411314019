#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sgc {

struct BinaryConfusion {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
};

// Standard counts with a declared positive class. Labels must be binary
// (0/1); lengths must match.
BinaryConfusion confusion(const std::vector<int>& preds,
                          const std::vector<int>& truths, int positive = 1);

// Each returns nullopt when its denominator is zero (metric undefined), never
// a placeholder value.
std::optional<double> accuracy(const BinaryConfusion& c);
std::optional<double> sensitivity(const BinaryConfusion& c);
std::optional<double> specificity(const BinaryConfusion& c);

// Mann-Whitney AUC: probability a random positive outranks a random negative,
// ties at half credit (average ranks). nullopt when either class is absent.
std::optional<double> roc_auc(const std::vector<double>& scores,
                              const std::vector<int>& truths);

struct EvalReport {
  BinaryConfusion confusion;
  std::optional<double> accuracy, sensitivity, specificity, auc;
};

// Scores are positive-class posteriors; pass an empty vector to skip AUC.
EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& truths,
                    const std::vector<double>& scores, int positive = 1);

// JSON object {accuracy, sensitivity, specificity, auc, confusion:{tp,tn,fp,fn},
// undefined_metrics:[...]}; undefined metrics appear as null and are listed.
std::string eval_report_json(const EvalReport& report);
void write_eval_report(const EvalReport& report, const std::string& path);

}  // namespace sgc
