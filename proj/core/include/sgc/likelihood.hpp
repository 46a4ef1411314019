#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "sgc/ode.hpp"
#include "sgc/rng.hpp"
#include "sgc/score_model.hpp"

namespace sgc {

enum class DivergenceMode { kHutchinson, kExact };
enum class ProbeDist { kRademacher, kGaussian };

std::string divergence_name(DivergenceMode mode);
DivergenceMode divergence_from_name(const std::string& name);
std::string probe_name(ProbeDist dist);
ProbeDist probe_from_name(const std::string& name);

struct LikelihoodConfig {
  double rtol = 1e-5;
  double atol = 1e-5;
  DivergenceMode divergence = DivergenceMode::kHutchinson;
  ProbeDist probe_dist = ProbeDist::kRademacher;
  int n_probes = 1;
  int n_repeats = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Drift of the probability-flow ODE: f(x, t) - g(t)^2 s(x, t, y) / 2. The
// diffusion matrix is state-independent for all three families, so no extra
// divergence correction appears.
Eigen::VectorXd f_tilde(const SdeSpec& spec, const ScoreFunction& net,
                        const Eigen::VectorXd& x, double t, int y);

// Directional derivative of f_tilde in x. The drift Jacobian is 0 (VE) or
// -beta(t)/2 * I (VP, SubVP), so only the score needs a JVP.
Eigen::VectorXd f_tilde_jvp(const SdeSpec& spec, const ScoreFunction& net,
                            const Eigen::VectorXd& x, double t, int y,
                            const Eigen::VectorXd& v);

// Divergence of f_tilde at (x, t): exactly via d coordinate JVPs, or the
// Skilling-Hutchinson estimate mean_k v_k^T J v_k over the probe columns.
double divergence_exact(const SdeSpec& spec, const ScoreFunction& net,
                        const Eigen::VectorXd& x, double t, int y);
double divergence_hutchinson(const SdeSpec& spec, const ScoreFunction& net,
                             const Eigen::VectorXd& x, double t, int y,
                             const Eigen::MatrixXd& probes);

// One-shot estimate per LikelihoodConfig; Hutchinson probes are drawn from
// rng, Exact mode ignores it.
double divergence(const SdeSpec& spec, const ScoreFunction& net,
                  const Eigen::VectorXd& x, double t, int y,
                  const LikelihoodConfig& cfg, Rng& rng);

// log p(x0 | y) by integrating [x; delta_logp] from eps to t_end:
//   dx/dt = f_tilde,  d(delta_logp)/dt = div f_tilde,
// then prior_logp(x(t_end)) + delta_logp. Probe vectors are drawn once per
// repeat and held fixed along the trajectory; repeats average independent
// estimates. Deterministic in cfg.seed; probes do not depend on y, so
// per-class calls with one config share them.
double log_likelihood(const SdeSpec& spec, const ScoreFunction& net,
                      const Eigen::VectorXd& x0, int y, const LikelihoodConfig& cfg);

// -logp / (d ln 2) + offset; offset absorbs any dequantization/rescaling
// constant the caller owes from preprocessing.
double bits_per_dim(double logp, int d, double offset = 0.0);

}  // namespace sgc
