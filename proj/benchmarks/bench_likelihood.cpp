#include <benchmark/benchmark.h>

#include <sgc/data.hpp>
#include <sgc/likelihood.hpp>
#include <sgc/score_model.hpp>

namespace {

sgc::SdeSpec family_spec(sgc::SdeFamily family) {
  sgc::SdeSpec spec;
  spec.family = family;
  return spec;
}

sgc::AnalyticGaussianScore standard_oracle(int d, const sgc::SdeSpec& spec) {
  return {{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)},
          {Eigen::VectorXd::Ones(d), Eigen::VectorXd::Ones(d)},
          spec};
}

void BM_LoglikOracleExact(benchmark::State& state) {
  const int d = int(state.range(0));
  const sgc::SdeSpec spec = family_spec(sgc::SdeFamily::kVP);
  const sgc::AnalyticGaussianScore oracle = standard_oracle(d, spec);
  sgc::LikelihoodConfig cfg;
  cfg.divergence = sgc::DivergenceMode::kExact;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(d, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(sgc::log_likelihood(spec, oracle, x0, 0, cfg));
}
BENCHMARK(BM_LoglikOracleExact)->Arg(2)->Arg(8);

void BM_LoglikMlpExact(benchmark::State& state) {
  const sgc::SdeSpec spec = family_spec(sgc::SdeFamily::kVP);
  sgc::MlpScoreNet net(2, 2, spec, 1);
  sgc::LikelihoodConfig cfg;
  cfg.divergence = sgc::DivergenceMode::kExact;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(sgc::log_likelihood(spec, net, x0, 0, cfg));
}
BENCHMARK(BM_LoglikMlpExact);

void BM_LoglikMlpHutchinson(benchmark::State& state) {
  const sgc::SdeSpec spec = family_spec(sgc::SdeFamily::kVP);
  sgc::MlpScoreNet net(2, 2, spec, 1);
  sgc::LikelihoodConfig cfg;
  cfg.n_probes = int(state.range(0));
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(sgc::log_likelihood(spec, net, x0, 0, cfg));
}
BENCHMARK(BM_LoglikMlpHutchinson)->Arg(1)->Arg(4);

void BM_DivergenceExact(benchmark::State& state) {
  const int d = int(state.range(0));
  const sgc::SdeSpec spec = family_spec(sgc::SdeFamily::kVP);
  sgc::MlpScoreNet net(d, 2, spec, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(sgc::divergence_exact(spec, net, x, 0.5, 0));
}
BENCHMARK(BM_DivergenceExact)->Arg(2)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
