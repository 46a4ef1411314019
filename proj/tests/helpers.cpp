#include "helpers.hpp"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <sgc/sde.hpp>

namespace sgc_test {

std::string cli_path;

TempDir::TempDir() {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path();
  path_ = base / ("sgc_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CommandResult run_command(const std::string& command, bool merge_stderr) {
  const std::string full = merge_stderr ? command + " 2>&1" : command;
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + full);
  CommandResult result;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

CommandResult run_cli(const std::string& args, bool merge_stderr) {
  if (cli_path.empty())
    throw std::runtime_error("CLI path not set; pass --cli=<path>");
  return run_command(cli_path + " " + args, merge_stderr);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << contents;
}

EmStats em_moments(const sgc::SdeSpec& spec, double x0, double t_target, int n_paths,
                   int n_steps, std::uint64_t seed) {
  sgc::Rng rng(sgc::splitmix64(seed));
  const double dt = t_target / n_steps;
  const double sqrt_dt = std::sqrt(dt);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);

  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    double x = x0;
    for (int s = 0; s < n_steps; ++s) {
      const double t = s * dt;
      const double f =
          spec.family == sgc::SdeFamily::kVE ? 0.0 : -0.5 * sgc::beta(spec, t) * x;
      x += f * dt + sgc::diffusion(spec, t) * sqrt_dt * sgc::standard_normal(rng);
    }
    sum += x;
    sum_sq += x * x;
  }
  EmStats stats;
  stats.mean = sum / n_paths;
  stats.std = std::sqrt(sum_sq / n_paths - stats.mean * stats.mean);
  return stats;
}

std::optional<double> pairwise_auc(const std::vector<double>& scores,
                                   const std::vector<int>& truths) {
  double credit = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truths[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truths[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        credit += 1.0;
      else if (scores[i] == scores[j])
        credit += 0.5;
    }
  }
  if (pairs == 0) return std::nullopt;
  return credit / double(pairs);
}

}  // namespace sgc_test
