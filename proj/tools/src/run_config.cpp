#include "run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include <sgc/io_error.hpp>

namespace sgc::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw std::invalid_argument(scope + ": unknown config key '" + key + "'");
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

void apply_config_json(RunConfig& cfg, const std::string& json_text,
                       const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!root.is_object())
    throw std::invalid_argument(origin + ": config must be a JSON object");

  try {
    reject_unknown(root, origin,
                   {"seed", "data", "checkpoint", "output", "classes", "sde",
                    "train", "likelihood", "oracle"});
    maybe(root, "seed", cfg.seed);
    maybe(root, "data", cfg.data);
    maybe(root, "checkpoint", cfg.checkpoint);
    maybe(root, "output", cfg.output);
    maybe(root, "classes", cfg.classes);

    if (root.contains("sde")) {
      const json& sde = root.at("sde");
      reject_unknown(sde, origin + ": sde",
                     {"family", "beta_min", "beta_max", "sigma_min", "sigma_max",
                      "t_end", "eps"});
      if (sde.contains("family"))
        cfg.sde.family = family_from_name(sde.at("family").get<std::string>());
      maybe(sde, "beta_min", cfg.sde.beta_min);
      maybe(sde, "beta_max", cfg.sde.beta_max);
      maybe(sde, "sigma_min", cfg.sde.sigma_min);
      maybe(sde, "sigma_max", cfg.sde.sigma_max);
      maybe(sde, "t_end", cfg.sde.t_end);
      maybe(sde, "eps", cfg.sde.eps);
    }
    if (root.contains("train")) {
      const json& tr = root.at("train");
      reject_unknown(tr, origin + ": train",
                     {"batch_size", "lr", "adam_beta1", "adam_beta2", "adam_eps",
                      "scheduler_gamma", "scheduler_patience", "early_stop_patience",
                      "max_epochs", "val_fraction"});
      maybe(tr, "batch_size", cfg.train.batch_size);
      maybe(tr, "lr", cfg.train.lr);
      maybe(tr, "adam_beta1", cfg.train.adam_beta1);
      maybe(tr, "adam_beta2", cfg.train.adam_beta2);
      maybe(tr, "adam_eps", cfg.train.adam_eps);
      maybe(tr, "scheduler_gamma", cfg.train.scheduler_gamma);
      maybe(tr, "scheduler_patience", cfg.train.scheduler_patience);
      maybe(tr, "early_stop_patience", cfg.train.early_stop_patience);
      maybe(tr, "max_epochs", cfg.train.max_epochs);
      maybe(tr, "val_fraction", cfg.train.val_fraction);
    }
    if (root.contains("likelihood")) {
      const json& lk = root.at("likelihood");
      reject_unknown(lk, origin + ": likelihood",
                     {"rtol", "atol", "divergence", "probe_dist", "n_probes",
                      "n_repeats"});
      maybe(lk, "rtol", cfg.likelihood.rtol);
      maybe(lk, "atol", cfg.likelihood.atol);
      if (lk.contains("divergence"))
        cfg.likelihood.divergence =
            divergence_from_name(lk.at("divergence").get<std::string>());
      if (lk.contains("probe_dist"))
        cfg.likelihood.probe_dist =
            probe_from_name(lk.at("probe_dist").get<std::string>());
      maybe(lk, "n_probes", cfg.likelihood.n_probes);
      maybe(lk, "n_repeats", cfg.likelihood.n_repeats);
    }
    if (root.contains("oracle")) {
      const json& orc = root.at("oracle");
      reject_unknown(orc, origin + ": oracle", {"mean0", "mean1", "cov"});
      OracleParams params = cfg.oracle.value_or(OracleParams{});
      maybe(orc, "mean0", params.mean0);
      maybe(orc, "mean1", params.mean1);
      maybe(orc, "cov", params.cov);
      cfg.oracle = params;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument(path + ": cannot open config file");
  std::ostringstream buf;
  buf << is.rdbuf();
  RunConfig cfg;
  apply_config_json(cfg, buf.str(), path);
  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["data"] = cfg.data;
  root["checkpoint"] = cfg.checkpoint;
  root["output"] = cfg.output;
  root["classes"] = cfg.classes;
  root["sde"] = {
      {"family", family_name(cfg.sde.family)}, {"beta_min", cfg.sde.beta_min},
      {"beta_max", cfg.sde.beta_max},          {"sigma_min", cfg.sde.sigma_min},
      {"sigma_max", cfg.sde.sigma_max},        {"t_end", cfg.sde.t_end},
      {"eps", cfg.sde.eps},
  };
  root["train"] = {
      {"batch_size", cfg.train.batch_size},
      {"lr", cfg.train.lr},
      {"adam_beta1", cfg.train.adam_beta1},
      {"adam_beta2", cfg.train.adam_beta2},
      {"adam_eps", cfg.train.adam_eps},
      {"scheduler_gamma", cfg.train.scheduler_gamma},
      {"scheduler_patience", cfg.train.scheduler_patience},
      {"early_stop_patience", cfg.train.early_stop_patience},
      {"max_epochs", cfg.train.max_epochs},
      {"val_fraction", cfg.train.val_fraction},
  };
  root["likelihood"] = {
      {"rtol", cfg.likelihood.rtol},
      {"atol", cfg.likelihood.atol},
      {"divergence", divergence_name(cfg.likelihood.divergence)},
      {"probe_dist", probe_name(cfg.likelihood.probe_dist)},
      {"n_probes", cfg.likelihood.n_probes},
      {"n_repeats", cfg.likelihood.n_repeats},
  };
  if (cfg.oracle)
    root["oracle"] = {{"mean0", cfg.oracle->mean0},
                      {"mean1", cfg.oracle->mean1},
                      {"cov", cfg.oracle->cov}};
  return root.dump(2) + "\n";
}

void echo_config(const RunConfig& cfg, const std::string& output_path) {
  const std::string path = output_path + ".config.json";
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  os << run_config_json(cfg);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

}  // namespace sgc::cli
