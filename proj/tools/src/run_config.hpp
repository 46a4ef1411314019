#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <sgc/likelihood.hpp>
#include <sgc/sde.hpp>
#include <sgc/training.hpp>

namespace sgc::cli {

// Analytic two-class Gaussian score stand-in for a trained checkpoint.
struct OracleParams {
  std::vector<double> mean0{-2.0, 0.0};
  std::vector<double> mean1{2.0, 0.0};
  std::vector<double> cov{1.0, 1.0};
};

// Union of everything a run can configure. Loaded from a JSON file, then
// overridden by flags; one global seed fans out to named substreams so each
// component stays independently reproducible.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string data;        // dataset path (required where used)
  std::string checkpoint;  // model path (train output, classify/loglik input)
  std::string output;      // primary output path (required where used)
  int classes = 2;
  SdeSpec sde;
  TrainConfig train;
  LikelihoodConfig likelihood;
  std::optional<OracleParams> oracle;
};

// Parses JSON with unknown-key rejection at every level. Throws
// std::invalid_argument with the offending key path.
RunConfig load_run_config(const std::string& path);
void apply_config_json(RunConfig& cfg, const std::string& json_text,
                       const std::string& origin);

// Fully resolved config (defaults filled) as deterministic JSON.
std::string run_config_json(const RunConfig& cfg);

// Writes run_config_json next to the primary output: <output>.config.json.
void echo_config(const RunConfig& cfg, const std::string& output_path);

}  // namespace sgc::cli
