#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <sgc/rng.hpp>
#include <sgc/score_model.hpp>

namespace sgc_test {

// Path to the CLI binary, passed as --cli=<path>; empty when not provided.
extern std::string cli_path;

// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout, with stderr merged when requested
};

CommandResult run_command(const std::string& command, bool merge_stderr = true);
// Runs the CLI under test with the given argument string.
CommandResult run_cli(const std::string& args, bool merge_stderr = true);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Euler-Maruyama estimate of the 1-d kernel moments at t_target starting
// from x0: n_paths forward simulations with n_steps uniform steps.
struct EmStats {
  double mean = 0.0;
  double std = 0.0;
};
EmStats em_moments(const sgc::SdeSpec& spec, double x0, double t_target, int n_paths,
                   int n_steps, std::uint64_t seed);

// Brute-force Mann-Whitney AUC: all positive/negative pairs, ties at half
// credit. Independent of the rank-based production implementation.
std::optional<double> pairwise_auc(const std::vector<double>& scores,
                                   const std::vector<int>& truths);

// s(x, t, y) = A x, time- and class-independent; Jacobian is A exactly.
class LinearScore : public sgc::ScoreFunction {
 public:
  explicit LinearScore(Eigen::MatrixXd a, int num_classes = 2)
      : a_(std::move(a)), num_classes_(num_classes) {}

  int input_dim() const override { return int(a_.rows()); }
  int num_classes() const override { return num_classes_; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double, int) const override {
    return a_ * x;
  }
  Eigen::VectorXd input_jvp(const Eigen::VectorXd&, double, int,
                            const Eigen::VectorXd& v) const override {
    return a_ * v;
  }
  Eigen::VectorXd input_vjp(const Eigen::VectorXd&, double, int,
                            const Eigen::VectorXd& v) const override {
    return a_.transpose() * v;
  }

 private:
  Eigen::MatrixXd a_;
  int num_classes_;
};

// Fully scriptable score for failure-injection tests; all three callbacks
// take (x, t, y, v-or-unused).
class CallbackScore : public sgc::ScoreFunction {
 public:
  using EvalFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double, int)>;
  using JvpFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double, int,
                                              const Eigen::VectorXd&)>;

  CallbackScore(int dim, int num_classes, EvalFn eval, JvpFn jvp, JvpFn vjp)
      : dim_(dim), num_classes_(num_classes), eval_(std::move(eval)),
        jvp_(std::move(jvp)), vjp_(std::move(vjp)) {}

  int input_dim() const override { return dim_; }
  int num_classes() const override { return num_classes_; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double t, int y) const override {
    return eval_(x, t, y);
  }
  Eigen::VectorXd input_jvp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override {
    return jvp_(x, t, y, v);
  }
  Eigen::VectorXd input_vjp(const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) const override {
    return vjp_(x, t, y, v);
  }

 private:
  int dim_, num_classes_;
  EvalFn eval_;
  JvpFn jvp_, vjp_;
};

}  // namespace sgc_test
