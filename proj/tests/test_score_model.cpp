#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "sgc/io_error.hpp"
#include "sgc/rng.hpp"
#include "sgc/score_model.hpp"

using namespace sgc;

namespace {

constexpr int kD = 2;
constexpr int kClasses = 2;

MlpScoreNet make_net(std::uint64_t seed = 7) {
  SdeSpec spec;
  return MlpScoreNet(kD, kClasses, spec, seed);
}

// Random but reproducible parameter vector; the zero last layer at init makes
// derivative tests degenerate, so overwrite everything.
void randomize(MlpScoreNet& net, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd p(net.param_count());
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = 0.3 * standard_normal(rng);
  net.set_params(p);
}

}  // namespace

TEST_CASE("parameter count matches the architecture") {
  auto net = make_net();
  const int total_in = kD + 2 * 32 + 64;
  Eigen::Index expect = 64 * kClasses + 128 * total_in + 128 + 128 * 128 + 128 +
                        kD * 128 + kD;
  CHECK(net.param_count() == expect);
  CHECK(net.input_dim() == kD);
  CHECK(net.num_classes() == kClasses);
}

TEST_CASE("initialization is seed-deterministic with a zero last layer") {
  auto a = make_net(42);
  auto b = make_net(42);
  auto c = make_net(43);
  CHECK(a.params() == b.params());
  CHECK(a.params() != c.params());

  Eigen::VectorXd x(kD);
  x << 0.7, -1.2;
  CHECK(a.evaluate(x, 0.5, 1).norm() == 0.0);

  // hidden layers must not be zero-initialized
  CHECK(a.params().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("time features are unit-norm sin/cos pairs") {
  auto net = make_net();
  Eigen::VectorXd f = net.time_features(0.37);
  REQUIRE(f.size() == 64);
  for (int i = 0; i < 32; ++i) {
    CHECK(f(i) * f(i) + f(32 + i) * f(32 + i) == doctest::Approx(1.0).epsilon(1e-12));
  }
  Eigen::VectorXd freqs = net.time_frequencies();
  REQUIRE(freqs.size() == 32);
  CHECK(f(3) == doctest::Approx(std::sin(2.0 * M_PI * freqs(3) * 0.37)).epsilon(1e-12));
  CHECK(f(32 + 3) == doctest::Approx(std::cos(2.0 * M_PI * freqs(3) * 0.37)).epsilon(1e-12));
}

TEST_CASE("parameter vector round-trips and rejects bad sizes") {
  auto net = make_net();
  randomize(net, 5);
  Eigen::VectorXd p = net.params();
  auto other = make_net(99);
  other.set_params(p);
  CHECK(other.params() == p);

  CHECK_THROWS_AS(other.set_params(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(other.set_time_frequencies(Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("argument validation") {
  auto net = make_net();
  Eigen::VectorXd x(kD);
  x << 0.0, 0.0;
  Eigen::VectorXd bad(kD + 1);
  bad.setZero();
  CHECK_THROWS_AS((void)net.evaluate(bad, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)net.evaluate(x, 0.5, -1), std::invalid_argument);
  CHECK_THROWS_AS((void)net.evaluate(x, 0.5, kClasses), std::invalid_argument);
  CHECK_THROWS_AS((void)net.evaluate(x, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)net.evaluate(x, 1.5, 0), std::invalid_argument);
  CHECK_NOTHROW((void)net.evaluate(x, 1e-5, 0));
  CHECK_NOTHROW((void)net.evaluate(x, 1.0, 0));
}

TEST_CASE("class conditioning changes the output") {
  auto net = make_net();
  randomize(net, 8);
  Eigen::VectorXd x(kD);
  x << 0.4, -0.9;
  CHECK((net.evaluate(x, 0.3, 0) - net.evaluate(x, 0.3, 1)).norm() > 1e-8);
}

TEST_CASE("evaluate equals the raw head divided by the marginal std") {
  auto net = make_net();
  randomize(net, 9);
  Eigen::VectorXd x(kD);
  x << 1.1, 0.2;
  double t = 0.62;

  Eigen::MatrixXd xs(kD, 1);
  xs.col(0) = x;
  Eigen::VectorXd ts(1);
  ts << t;
  Eigen::MatrixXd raw = net.raw_forward(xs, ts, {1}, nullptr);
  Eigen::VectorXd s = net.evaluate(x, t, 1);
  CHECK((s * marginal_std(net.sde(), t) - raw.col(0)).norm() < 1e-12);
}

TEST_CASE("input JVP matches finite differences") {
  auto net = make_net();
  randomize(net, 10);
  Rng rng(123);
  Eigen::VectorXd x = normal_vector(kD, rng);
  double t = 0.41;
  const double h = 1e-6;

  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v = normal_vector(kD, rng);
    Eigen::VectorXd jvp = net.input_jvp(x, t, 0, v);
    Eigen::VectorXd fd =
        (net.evaluate(x + h * v, t, 0) - net.evaluate(x - h * v, t, 0)) / (2.0 * h);
    CHECK((jvp - fd).norm() < 1e-5 * (1.0 + fd.norm()));
  }
}

TEST_CASE("input VJP is the transpose of the JVP") {
  auto net = make_net();
  randomize(net, 11);
  Rng rng(321);
  Eigen::VectorXd x = normal_vector(kD, rng);
  double t = 0.73;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v = normal_vector(kD, rng);
    Eigen::VectorXd a = normal_vector(kD, rng);
    double lhs = a.dot(net.input_jvp(x, t, 1, v));
    double rhs = net.input_vjp(x, t, 1, a).dot(v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("parameter gradients match finite differences") {
  auto net = make_net();
  randomize(net, 12);
  Rng rng(77);

  const int batch = 3;
  Eigen::MatrixXd xs(kD, batch);
  Eigen::VectorXd ts(batch);
  std::vector<int> ys;
  for (int k = 0; k < batch; ++k) {
    xs.col(k) = normal_vector(kD, rng);
    ts[k] = 0.1 + 0.25 * k;
    ys.push_back(k % kClasses);
  }
  Eigen::MatrixXd adj(kD, batch);
  for (int k = 0; k < batch; ++k) adj.col(k) = normal_vector(kD, rng);

  MlpScoreNet::Tape tape;
  net.raw_forward(xs, ts, ys, &tape);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.param_count());
  net.raw_backward(tape, adj, grad);

  auto loss_at = [&](const Eigen::VectorXd& p) {
    auto probe = make_net();
    probe.set_params(p);
    probe.set_time_frequencies(net.time_frequencies());
    Eigen::MatrixXd raw = probe.raw_forward(xs, ts, ys, nullptr);
    return (adj.array() * raw.array()).sum();
  };

  Eigen::VectorXd p0 = net.params();
  const double h = 1e-6;
  std::mt19937_64 pick(5);

  // probe a handful of coordinates inside every parameter block
  const int total_in = kD + 2 * 32 + 64;
  std::vector<Eigen::Index> offsets = {0,
                                       64 * kClasses,
                                       64 * kClasses + 128 * total_in,
                                       64 * kClasses + 128 * total_in + 128,
                                       64 * kClasses + 128 * total_in + 128 + 128 * 128,
                                       64 * kClasses + 128 * total_in + 128 + 128 * 128 + 128,
                                       64 * kClasses + 128 * total_in + 128 + 128 * 128 + 128 + kD * 128};
  offsets.push_back(net.param_count());

  for (std::size_t b = 0; b + 1 < offsets.size(); ++b) {
    for (int rep = 0; rep < 4; ++rep) {
      Eigen::Index i = offsets[b] + static_cast<Eigen::Index>(
          pick() % static_cast<std::uint64_t>(offsets[b + 1] - offsets[b]));
      Eigen::VectorXd pp = p0, pm = p0;
      pp(i) += h;
      pm(i) -= h;
      double fd = (loss_at(pp) - loss_at(pm)) / (2.0 * h);
      CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("checkpoint round-trips exactly") {
  auto net = make_net(31);
  randomize(net, 32);
  sgc_test::TempDir dir;
  std::string path = dir.file("model.sgck");
  save_checkpoint(net, path);

  auto loaded = load_checkpoint(path);
  CHECK(loaded.params() == net.params());
  CHECK(loaded.time_frequencies() == net.time_frequencies());
  CHECK(loaded.input_dim() == net.input_dim());
  CHECK(loaded.num_classes() == net.num_classes());
  CHECK(loaded.sde().family == net.sde().family);
  CHECK(loaded.sde().beta_max == net.sde().beta_max);

  Eigen::VectorXd x(kD);
  x << -0.3, 0.8;
  CHECK((loaded.evaluate(x, 0.5, 1) - net.evaluate(x, 0.5, 1)).norm() == 0.0);
}

TEST_CASE("checkpoint loader reports distinct failure kinds") {
  auto net = make_net();
  sgc_test::TempDir dir;
  std::string path = dir.file("model.sgck");
  save_checkpoint(net, path);

  SUBCASE("missing file") {
    try {
      (void)load_checkpoint(dir.file("nope.sgck"));
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.kind() == IoError::Kind::kOpen);
    }
  }

  SUBCASE("bad magic") {
    auto bytes = sgc_test::read_file(path);
    bytes[0] = 'X';
    sgc_test::write_file(path, bytes);
    try {
      (void)load_checkpoint(path);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.kind() == IoError::Kind::kBadMagic);
      CHECK(std::string(e.what()).find("checkpoint") != std::string::npos);
    }
  }

  SUBCASE("unsupported version") {
    auto bytes = sgc_test::read_file(path);
    bytes[4] = 9;
    sgc_test::write_file(path, bytes);
    try {
      (void)load_checkpoint(path);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.kind() == IoError::Kind::kBadVersion);
    }
  }

  SUBCASE("truncated payload") {
    auto bytes = sgc_test::read_file(path);
    bytes.resize(bytes.size() - 64);
    sgc_test::write_file(path, bytes);
    try {
      (void)load_checkpoint(path);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.kind() == IoError::Kind::kTruncated);
    }
  }
}
