#include <benchmark/benchmark.h>

#include <sgc/score_model.hpp>
#include <sgc/training.hpp>

namespace {

sgc::SdeSpec vp_spec() {
  sgc::SdeSpec spec;
  spec.family = sgc::SdeFamily::kVP;
  return spec;
}

void BM_ScoreEvaluate(benchmark::State& state) {
  const int d = int(state.range(0));
  sgc::MlpScoreNet net(d, 2, vp_spec(), 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.evaluate(x, 0.5, 0));
}
BENCHMARK(BM_ScoreEvaluate)->Arg(2)->Arg(8)->Arg(32);

void BM_ScoreInputJvp(benchmark::State& state) {
  const int d = int(state.range(0));
  sgc::MlpScoreNet net(d, 2, vp_spec(), 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.3);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  for (auto _ : state) benchmark::DoNotOptimize(net.input_jvp(x, 0.5, 0, v));
}
BENCHMARK(BM_ScoreInputJvp)->Arg(2)->Arg(8)->Arg(32);

void BM_RawForwardBatch(benchmark::State& state) {
  const int b = int(state.range(0));
  sgc::MlpScoreNet net(2, 2, vp_spec(), 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, b);
  const Eigen::VectorXd ts = Eigen::VectorXd::Constant(b, 0.5);
  const std::vector<int> ys(std::size_t(b), 0);
  for (auto _ : state) benchmark::DoNotOptimize(net.raw_forward(x, ts, ys));
}
BENCHMARK(BM_RawForwardBatch)->Arg(32)->Arg(128)->Arg(512);

void BM_TrainStep(benchmark::State& state) {
  const int b = int(state.range(0));
  const sgc::SdeSpec spec = vp_spec();
  sgc::MlpScoreNet net(2, 2, spec, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, b);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Random(2, b);
  const Eigen::VectorXd ts = Eigen::VectorXd::Constant(b, 0.5);
  const std::vector<int> ys(std::size_t(b), 0);
  sgc::AdamOptimizer adam(net.param_count(), 1e-4);
  Eigen::VectorXd theta = net.params();
  Eigen::VectorXd grad(net.param_count());
  sgc::MlpScoreNet::Tape tape;
  for (auto _ : state) {
    const Eigen::MatrixXd raw = net.raw_forward(x, ts, ys, &tape);
    grad.setZero();
    net.raw_backward(tape, (raw + z) / double(b), grad);
    adam.step(theta, grad);
    net.set_params(theta);
  }
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128);

}  // namespace
