#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sgc/classifier.hpp>
#include <sgc/data.hpp>
#include <sgc/io_error.hpp>
#include <sgc/likelihood.hpp>
#include <sgc/metrics.hpp>
#include <sgc/rng.hpp>
#include <sgc/training.hpp>

#include "run_config.hpp"

namespace {

using sgc::cli::RunConfig;

// Exit-code contract: 0 success, 1 runtime failure, 2 usage/config error.
int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sgc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

sgc::LabeledDataset load_dataset(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return sgc::read_csv_dataset(path);
  return sgc::read_tensor_file(path);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Model behind a subcommand: a trained checkpoint, or the analytic oracle
// when the config carries Gaussian parameters. The SdeSpec travels with the
// checkpoint; oracle runs take it from the config.
struct ResolvedModel {
  std::unique_ptr<sgc::ScoreFunction> net;
  sgc::SdeSpec spec;
};

ResolvedModel resolve_model(const RunConfig& cfg) {
  ResolvedModel m;
  if (cfg.oracle) {
    const auto& o = *cfg.oracle;
    m.net = std::make_unique<sgc::AnalyticGaussianScore>(
        std::vector<Eigen::VectorXd>{to_vector(o.mean0), to_vector(o.mean1)},
        std::vector<Eigen::VectorXd>{to_vector(o.cov), to_vector(o.cov)}, cfg.sde);
    m.spec = cfg.sde;
    return m;
  }
  if (cfg.checkpoint.empty())
    throw std::invalid_argument("no model: provide --checkpoint or oracle parameters");
  auto net = std::make_unique<sgc::MlpScoreNet>(sgc::load_checkpoint(cfg.checkpoint));
  m.spec = net->sde();
  m.net = std::move(net);
  return m;
}

struct FlagOverrides {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::string data, checkpoint, out, family, divergence, probe_dist;
  std::uint64_t seed = 0;
  int classes = 2, max_epochs = 0, batch_size = 0, n_probes = 0, n_repeats = 0;
  double lr = 0, val_fraction = 0, rtol = 0, atol = 0;
  bool oracle = false;
  std::vector<double> mean0, mean1, cov;

  void add_common(CLI::App* sub) {
    cmd = sub;
    sub->add_option("--config", config_path, "JSON run config; flags override it")
        ->check(CLI::ExistingFile);
    sub->add_option("--data", data, "dataset path (.sgct tensor or .csv)");
    sub->add_option("--out", out, "primary output path");
    sub->add_option("--seed", seed, "global seed; substreams derive from it");
  }
  void add_model_inputs(CLI::App* sub) {
    sub->add_option("--checkpoint", checkpoint, "trained model checkpoint");
    sub->add_flag("--oracle", oracle, "use the analytic two-Gaussian score");
    sub->add_option("--mean0", mean0, "oracle class-0 mean (comma separated)")
        ->delimiter(',');
    sub->add_option("--mean1", mean1, "oracle class-1 mean (comma separated)")
        ->delimiter(',');
    sub->add_option("--cov", cov, "oracle shared diagonal covariance")
        ->delimiter(',');
  }
  void add_likelihood(CLI::App* sub) {
    sub->add_option("--divergence", divergence, "hutchinson or exact")
        ->check(CLI::IsMember({"hutchinson", "exact"}));
    sub->add_option("--probe-dist", probe_dist, "rademacher or gaussian")
        ->check(CLI::IsMember({"rademacher", "gaussian"}));
    sub->add_option("--probes", n_probes, "Hutchinson probes per estimate")
        ->check(CLI::Range(1, 1 << 20));
    sub->add_option("--repeats", n_repeats, "independent estimates to average")
        ->check(CLI::Range(1, 1 << 20));
    sub->add_option("--rtol", rtol, "ODE relative tolerance");
    sub->add_option("--atol", atol, "ODE absolute tolerance");
  }

  bool has(const std::string& flag) const { return cmd->count(flag) > 0; }

  RunConfig resolve() const {
    RunConfig cfg;
    if (has("--config")) cfg = sgc::cli::load_run_config(config_path);
    if (has("--data")) cfg.data = data;
    if (has("--out")) cfg.output = out;
    if (has("--seed")) cfg.seed = seed;
    if (cmd->get_option_no_throw("--checkpoint") && has("--checkpoint"))
      cfg.checkpoint = checkpoint;
    if (cmd->get_option_no_throw("--classes") && has("--classes"))
      cfg.classes = classes;
    if (cmd->get_option_no_throw("--max-epochs") && has("--max-epochs"))
      cfg.train.max_epochs = max_epochs;
    if (cmd->get_option_no_throw("--batch-size") && has("--batch-size"))
      cfg.train.batch_size = batch_size;
    if (cmd->get_option_no_throw("--lr") && has("--lr")) cfg.train.lr = lr;
    if (cmd->get_option_no_throw("--val-fraction") && has("--val-fraction"))
      cfg.train.val_fraction = val_fraction;
    if (cmd->get_option_no_throw("--family") && has("--family"))
      cfg.sde.family = sgc::family_from_name(family);
    if (cmd->get_option_no_throw("--divergence") && has("--divergence"))
      cfg.likelihood.divergence = sgc::divergence_from_name(divergence);
    if (cmd->get_option_no_throw("--probe-dist") && has("--probe-dist"))
      cfg.likelihood.probe_dist = sgc::probe_from_name(probe_dist);
    if (cmd->get_option_no_throw("--probes") && has("--probes"))
      cfg.likelihood.n_probes = n_probes;
    if (cmd->get_option_no_throw("--repeats") && has("--repeats"))
      cfg.likelihood.n_repeats = n_repeats;
    if (cmd->get_option_no_throw("--rtol") && has("--rtol")) cfg.likelihood.rtol = rtol;
    if (cmd->get_option_no_throw("--atol") && has("--atol")) cfg.likelihood.atol = atol;
    if (oracle || !mean0.empty() || !mean1.empty() || !cov.empty()) {
      sgc::cli::OracleParams params = cfg.oracle.value_or(sgc::cli::OracleParams{});
      if (!mean0.empty()) params.mean0 = mean0;
      if (!mean1.empty()) params.mean1 = mean1;
      if (!cov.empty()) params.cov = cov;
      cfg.oracle = params;
    }
    cfg.likelihood.seed = cfg.seed;
    return cfg;
  }
};

void require(const std::string& value, const char* what) {
  if (value.empty())
    throw std::invalid_argument(std::string("missing ") + what +
                                " (flag or config field)");
}

int cmd_gen_toy(const std::string& kind, int n, double noise, std::uint64_t seed,
                const std::string& out, const std::vector<double>& mean0,
                const std::vector<double>& mean1, const std::vector<double>& cov) {
  return run_guarded([&] {
    sgc::LabeledDataset ds;
    if (kind == "two-gaussians")
      ds = sgc::gen_two_gaussians(n, to_vector(mean0), to_vector(mean1),
                                  to_vector(cov), seed);
    else
      ds = sgc::gen_two_moons(n, noise, seed);
    sgc::write_tensor_file(ds, out);

    nlohmann::json echo;
    echo["kind"] = kind;
    echo["n_per_class"] = n;
    echo["seed"] = seed;
    echo["out"] = out;
    if (kind == "two-gaussians") {
      echo["mean0"] = mean0;
      echo["mean1"] = mean1;
      echo["cov"] = cov;
    } else {
      echo["noise_std"] = noise;
    }
    std::ofstream os(out + ".config.json", std::ios::trunc);
    os << echo.dump(2) << '\n';

    std::vector<long> counts(std::size_t(ds.num_classes), 0);
    for (int y : ds.labels) ++counts[std::size_t(y)];
    nlohmann::json summary;
    summary["n"] = ds.size();
    summary["d"] = ds.dim();
    summary["class_counts"] = counts;
    summary["path"] = out;
    std::cout << summary.dump() << '\n';
  });
}

int cmd_train(const FlagOverrides& flags) {
  return run_guarded([&] {
    RunConfig cfg = flags.resolve();
    require(cfg.data, "dataset path");
    if (cfg.output.empty()) cfg.output = cfg.checkpoint;
    require(cfg.output, "output checkpoint path");
    cfg.checkpoint = cfg.output;

    const sgc::LabeledDataset ds = load_dataset(cfg.data);
    sgc::TrainConfig train_cfg = cfg.train;
    train_cfg.seed = sgc::derive_seed(cfg.seed, "train");
    sgc::TrainResult result = sgc::train(ds, cfg.sde, train_cfg);

    sgc::save_checkpoint(result.net, cfg.output);
    sgc::write_train_report_csv(result.report, cfg.output + ".report.csv");
    sgc::cli::echo_config(cfg, cfg.output);
    for (const std::string& w : result.report.warnings)
      std::cerr << "warning: " << w << '\n';

    nlohmann::json summary;
    summary["checkpoint"] = cfg.output;
    summary["epochs_run"] = result.report.epochs.size();
    summary["best_epoch"] = result.report.best_epoch;
    summary["best_val_loss"] = result.report.best_val_loss;
    std::cout << summary.dump() << '\n';
  });
}

int cmd_classify(const FlagOverrides& flags) {
  return run_guarded([&] {
    RunConfig cfg = flags.resolve();
    require(cfg.data, "dataset path");
    require(cfg.output, "output path");
    if (cfg.classes < 2)
      throw std::invalid_argument("classify: need at least 2 classes");

    const sgc::LabeledDataset ds = load_dataset(cfg.data);
    const ResolvedModel model = resolve_model(cfg);
    const auto results =
        sgc::classify_dataset(model.spec, *model.net, ds, cfg.classes, cfg.likelihood);
    sgc::write_predictions_csv(results, cfg.output);
    sgc::cli::echo_config(cfg, cfg.output);

    long correct = 0;
    for (const auto& r : results)
      if (r.ground_truth && *r.ground_truth == r.predicted) ++correct;
    nlohmann::json summary;
    summary["n"] = results.size();
    summary["accuracy"] = double(correct) / double(results.size());
    summary["output"] = cfg.output;
    std::cout << summary.dump() << '\n';
  });
}

int cmd_loglik(const FlagOverrides& flags) {
  return run_guarded([&] {
    RunConfig cfg = flags.resolve();
    require(cfg.data, "dataset path");
    require(cfg.output, "output path");
    if (cfg.classes < 2)
      throw std::invalid_argument("loglik: need at least 2 classes");

    const sgc::LabeledDataset ds = load_dataset(cfg.data);
    const ResolvedModel model = resolve_model(cfg);

    std::ofstream os(cfg.output, std::ios::trunc);
    if (!os)
      throw sgc::IoError(sgc::IoError::Kind::kOpen,
                         cfg.output + ": cannot open for writing");
    os << "index,ground_truth";
    for (int y = 0; y < cfg.classes; ++y) os << ",log_like_" << y;
    os << '\n';
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
      sgc::LikelihoodConfig per_input = cfg.likelihood;
      per_input.seed = sgc::derive_seed(cfg.likelihood.seed, "probes",
                                        std::uint64_t(i));
      const Eigen::VectorXd ll = sgc::class_log_likelihoods(
          model.spec, *model.net, ds.features.row(i).transpose(), cfg.classes,
          per_input);
      os << i << ',' << ds.labels[std::size_t(i)];
      for (Eigen::Index y = 0; y < ll.size(); ++y) os << ',' << format_double(ll[y]);
      os << '\n';
    }
    os.close();
    sgc::cli::echo_config(cfg, cfg.output);

    nlohmann::json summary;
    summary["n"] = ds.size();
    summary["classes"] = cfg.classes;
    summary["output"] = cfg.output;
    std::cout << summary.dump() << '\n';
  });
}

// Predictions CSV as written by classify: index, ground_truth, predicted,
// log_like_*, posterior_*.
struct Predictions {
  std::vector<int> preds, truths;
  std::vector<double> positive_posterior;
  int n_classes = 0;
};

Predictions read_predictions(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw sgc::IoError(sgc::IoError::Kind::kOpen, path + ": cannot open");
  std::string line;
  if (!std::getline(is, line))
    throw sgc::IoError(sgc::IoError::Kind::kTruncated, path + ": empty file");

  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  if (header.size() < 5 || header[0] != "index" || header[1] != "ground_truth" ||
      header[2] != "predicted")
    throw sgc::IoError(sgc::IoError::Kind::kParse,
                       path + ": not a predictions CSV");
  Predictions p;
  p.n_classes = int((header.size() - 3) / 2);
  if (header.size() != std::size_t(3 + 2 * p.n_classes))
    throw sgc::IoError(sgc::IoError::Kind::kParse, path + ": malformed header");

  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (cells.size() != header.size())
      throw sgc::IoError(sgc::IoError::Kind::kParse,
                         path + ":" + std::to_string(line_no) + ": wrong field count");
    if (cells[1].empty())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": no ground truth; cannot evaluate");
    p.truths.push_back(std::stoi(cells[1]));
    p.preds.push_back(std::stoi(cells[2]));
    p.positive_posterior.push_back(std::stod(cells[std::size_t(3 + p.n_classes + 1)]));
  }
  if (p.preds.empty())
    throw sgc::IoError(sgc::IoError::Kind::kTruncated, path + ": no data rows");
  return p;
}

int cmd_eval(const std::string& predictions_path, const std::string& out) {
  return run_guarded([&] {
    const Predictions p = read_predictions(predictions_path);
    if (p.n_classes != 2)
      throw std::invalid_argument("eval: metrics are defined for binary tasks, file has " +
                                  std::to_string(p.n_classes) + " classes");
    const sgc::EvalReport report =
        sgc::evaluate(p.preds, p.truths, p.positive_posterior);
    sgc::write_eval_report(report, out);

    nlohmann::json echo;
    echo["predictions"] = predictions_path;
    echo["output"] = out;
    std::ofstream os(out + ".config.json", std::ios::trunc);
    os << echo.dump(2) << '\n';

    std::cout << sgc::eval_report_json(report);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score-based generative classification toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // gen-toy
  auto* gen = app.add_subcommand("gen-toy", "Generate a toy dataset tensor file");
  std::string gen_kind;
  int gen_n = 1000;
  double gen_noise = 0.1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::vector<double> gen_mean0{-2.0, 0.0}, gen_mean1{2.0, 0.0}, gen_cov{1.0, 1.0};
  gen->add_option("kind", gen_kind, "two-gaussians or two-moons")
      ->required()
      ->check(CLI::IsMember({"two-gaussians", "two-moons"}));
  gen->add_option("--n", gen_n, "samples per class")->check(CLI::Range(1, 1 << 26));
  gen->add_option("--noise", gen_noise, "two-moons noise std");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output tensor file")->required();
  gen->add_option("--mean0", gen_mean0, "class-0 mean")->delimiter(',');
  gen->add_option("--mean1", gen_mean1, "class-1 mean")->delimiter(',');
  gen->add_option("--cov", gen_cov, "shared diagonal covariance")->delimiter(',');
  gen->callback([&] {
    exit_code = cmd_gen_toy(gen_kind, gen_n, gen_noise, gen_seed, gen_out, gen_mean0,
                            gen_mean1, gen_cov);
  });

  // train
  auto* tr = app.add_subcommand("train", "Train a score network and write a checkpoint");
  FlagOverrides tr_flags;
  tr_flags.add_common(tr);
  tr->add_option("--family", tr_flags.family, "SDE family: ve, vp, or subvp")
      ->check(CLI::IsMember({"ve", "vp", "subvp"}));
  tr->add_option("--max-epochs", tr_flags.max_epochs)->check(CLI::Range(0, 1 << 20));
  tr->add_option("--batch-size", tr_flags.batch_size)->check(CLI::Range(1, 1 << 20));
  tr->add_option("--lr", tr_flags.lr);
  tr->add_option("--val-fraction", tr_flags.val_fraction);
  tr->add_option("--checkpoint", tr_flags.checkpoint, "alias for --out");
  tr->callback([&] { exit_code = cmd_train(tr_flags); });

  // classify
  auto* cl = app.add_subcommand("classify", "Classify a dataset with a score model");
  FlagOverrides cl_flags;
  cl_flags.add_common(cl);
  cl_flags.add_model_inputs(cl);
  cl_flags.add_likelihood(cl);
  cl->add_option("--classes", cl_flags.classes, "number of classes scored")
      ->check(CLI::Range(2, 1 << 20));
  cl->callback([&] { exit_code = cmd_classify(cl_flags); });

  // loglik
  auto* ll = app.add_subcommand(
      "loglik", "Dump per-sample per-class conditional log-likelihoods");
  FlagOverrides ll_flags;
  ll_flags.add_common(ll);
  ll_flags.add_model_inputs(ll);
  ll_flags.add_likelihood(ll);
  ll->add_option("--classes", ll_flags.classes, "number of classes scored")
      ->check(CLI::Range(2, 1 << 20));
  ll->callback([&] { exit_code = cmd_loglik(ll_flags); });

  // eval
  auto* ev = app.add_subcommand("eval", "Compute metrics from a predictions CSV");
  std::string ev_predictions, ev_out;
  ev->add_option("--predictions", ev_predictions, "classify output CSV")->required();
  ev->add_option("--out", ev_out, "metrics JSON path")->required();
  ev->callback([&] { exit_code = cmd_eval(ev_predictions, ev_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return exit_code;
}
