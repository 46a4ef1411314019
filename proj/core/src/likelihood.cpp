#include "sgc/likelihood.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sgc {

std::string divergence_name(DivergenceMode mode) {
  return mode == DivergenceMode::kHutchinson ? "hutchinson" : "exact";
}

DivergenceMode divergence_from_name(const std::string& name) {
  if (name == "hutchinson") return DivergenceMode::kHutchinson;
  if (name == "exact") return DivergenceMode::kExact;
  throw std::invalid_argument("unknown divergence mode '" + name +
                              "' (expected hutchinson or exact)");
}

std::string probe_name(ProbeDist dist) {
  return dist == ProbeDist::kRademacher ? "rademacher" : "gaussian";
}

ProbeDist probe_from_name(const std::string& name) {
  if (name == "rademacher") return ProbeDist::kRademacher;
  if (name == "gaussian") return ProbeDist::kGaussian;
  throw std::invalid_argument("unknown probe distribution '" + name +
                              "' (expected rademacher or gaussian)");
}

void LikelihoodConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("likelihood: tolerances must be positive");
  if (n_probes < 1) throw std::invalid_argument("likelihood: n_probes must be >= 1");
  if (n_repeats < 1) throw std::invalid_argument("likelihood: n_repeats must be >= 1");
}

Eigen::VectorXd f_tilde(const SdeSpec& spec, const ScoreFunction& net,
                        const Eigen::VectorXd& x, double t, int y) {
  const double g = diffusion(spec, t);
  return drift(spec, x, t) - (0.5 * g * g) * net.evaluate(x, t, y);
}

Eigen::VectorXd f_tilde_jvp(const SdeSpec& spec, const ScoreFunction& net,
                            const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v) {
  const double g = diffusion(spec, t);
  Eigen::VectorXd jv = -(0.5 * g * g) * net.input_jvp(x, t, y, v);
  if (spec.family != SdeFamily::kVE) jv -= (0.5 * beta(spec, t)) * v;
  return jv;
}

double divergence_exact(const SdeSpec& spec, const ScoreFunction& net,
                        const Eigen::VectorXd& x, double t, int y) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  double div = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    e[i] = 1.0;
    div += f_tilde_jvp(spec, net, x, t, y, e)[i];
    e[i] = 0.0;
  }
  return div;
}

double divergence_hutchinson(const SdeSpec& spec, const ScoreFunction& net,
                             const Eigen::VectorXd& x, double t, int y,
                             const Eigen::MatrixXd& probes) {
  if (probes.rows() != x.size() || probes.cols() < 1)
    throw std::invalid_argument("divergence: probe matrix must be d x n_probes");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < probes.cols(); ++k)
    acc += probes.col(k).dot(f_tilde_jvp(spec, net, x, t, y, probes.col(k)));
  return acc / double(probes.cols());
}

namespace {

Eigen::MatrixXd draw_probes(Eigen::Index d, int n, ProbeDist dist, Rng& rng) {
  Eigen::MatrixXd probes(d, n);
  for (int k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < d; ++i)
      probes(i, k) = dist == ProbeDist::kRademacher ? rademacher(rng)
                                                    : standard_normal(rng);
  return probes;
}

std::string describe_input(const Eigen::VectorXd& x0, int y) {
  std::ostringstream os;
  os << "x0=[";
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (i) os << ", ";
    os << x0[i];
  }
  os << "], y=" << y;
  return os.str();
}

}  // namespace

double divergence(const SdeSpec& spec, const ScoreFunction& net,
                  const Eigen::VectorXd& x, double t, int y,
                  const LikelihoodConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.divergence == DivergenceMode::kExact)
    return divergence_exact(spec, net, x, t, y);
  return divergence_hutchinson(spec, net, x, t, y,
                               draw_probes(x.size(), cfg.n_probes, cfg.probe_dist, rng));
}

double log_likelihood(const SdeSpec& spec, const ScoreFunction& net,
                      const Eigen::VectorXd& x0, int y, const LikelihoodConfig& cfg) {
  cfg.validate();
  spec.validate();
  const Eigen::Index d = net.input_dim();
  if (x0.size() != d)
    throw std::invalid_argument("log_likelihood: x0 has dimension " +
                                std::to_string(x0.size()) + ", model expects " +
                                std::to_string(d));
  if (y < 0 || y >= net.num_classes())
    throw std::invalid_argument("log_likelihood: class " + std::to_string(y) +
                                " outside [0, " + std::to_string(net.num_classes()) +
                                ")");
  if (!x0.allFinite())
    throw std::invalid_argument("log_likelihood: non-finite input (" +
                                describe_input(x0, y) + ")");

  OdeControl control;
  control.rtol = cfg.rtol;
  control.atol = cfg.atol;

  double total = 0.0;
  for (int rep = 0; rep < cfg.n_repeats; ++rep) {
    Eigen::MatrixXd probes;
    if (cfg.divergence == DivergenceMode::kHutchinson) {
      Rng rng(splitmix64(derive_seed(cfg.seed, "probes", std::uint64_t(rep))));
      probes = draw_probes(d, cfg.n_probes, cfg.probe_dist, rng);
    }

    auto rhs = [&](double t, const Eigen::VectorXd& state) {
      const Eigen::VectorXd x = state.head(d);
      Eigen::VectorXd out(d + 1);
      out.head(d) = f_tilde(spec, net, x, t, y);
      out[d] = cfg.divergence == DivergenceMode::kExact
                   ? divergence_exact(spec, net, x, t, y)
                   : divergence_hutchinson(spec, net, x, t, y, probes);
      return out;
    };

    Eigen::VectorXd state(d + 1);
    state.head(d) = x0;
    state[d] = 0.0;
    OdeResult sol;
    try {
      sol = integrate_dp54(rhs, state, spec.eps, spec.t_end, control);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string(e.what()) + " (" + describe_input(x0, y) +
                             ")");
    }
    total += prior_logp(spec, sol.y.head(d)) + sol.y[d];
  }
  return total / double(cfg.n_repeats);
}

double bits_per_dim(double logp, int d, double offset) {
  if (d < 1) throw std::invalid_argument("bits_per_dim: d must be >= 1");
  return -logp / (double(d) * std::log(2.0)) + offset;
}

}  // namespace sgc
