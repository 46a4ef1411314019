#pragma once

#include <string_view>

#include <Eigen/Core>

namespace sgc {

enum class SdeFamily { kVE, kVP, kSubVP };

const char* family_name(SdeFamily family);
SdeFamily family_from_name(std::string_view name);  // throws std::invalid_argument

// Forward-noising process dx = f(x,t) dt + g(t) dw on t in [0, t_end], with a
// closed-form Gaussian perturbation kernel q(x(t) | x(0)). All three families
// have state-independent isotropic diffusion, so the matrix diffusion
// coefficient is g(t) * I and its divergence term vanishes.
struct SdeSpec {
  SdeFamily family = SdeFamily::kVP;
  double beta_min = 0.1;    // VP / sub-VP noise rate at t = 0
  double beta_max = 20.0;   // VP / sub-VP noise rate at t = 1
  double sigma_min = 0.01;  // VE kernel std at t = 0
  double sigma_max = 50.0;  // VE kernel std at t = 1
  double t_end = 1.0;       // fixed horizon
  double eps = 1e-5;        // model time lives in [eps, t_end]

  void validate() const;  // throws std::invalid_argument on a bad spec
};

// Gaussian kernel q(x(t) | x(0)): mean vector plus isotropic scalar std.
struct Marginal {
  Eigen::VectorXd mean;
  double std = 0.0;
};

// beta(t) = beta_min + t * (beta_max - beta_min). Defined for VP and sub-VP;
// rejects VE and t outside [0, t_end].
double beta(const SdeSpec& spec, double t);

// B(t) = integral of beta over [0, t] = beta_min*t + t^2*(beta_max-beta_min)/2.
double int_beta(const SdeSpec& spec, double t);

// VE kernel std: sigma_min * (sigma_max / sigma_min)^t.
double ve_sigma(const SdeSpec& spec, double t);

// f(x, t): zero for VE, -beta(t)/2 * x for VP and sub-VP.
Eigen::VectorXd drift(const SdeSpec& spec, const Eigen::VectorXd& x, double t);

// g(t). VE: sigma(t) * sqrt(2 ln(sigma_max/sigma_min)); VP: sqrt(beta(t));
// sub-VP: sqrt(beta(t) * (1 - exp(-2 B(t)))).
double diffusion(const SdeSpec& spec, double t);

// Kernel mean scale alpha(t): mean(t) = alpha(t) * x0. 1 for VE,
// exp(-B(t)/2) for VP and sub-VP. Valid on [0, t_end].
double mean_scale(const SdeSpec& spec, double t);

// Kernel std at time t. VE: sigma(t); VP: sqrt(1 - exp(-B(t)));
// sub-VP: 1 - exp(-B(t)). Valid on [0, t_end].
double marginal_std(const SdeSpec& spec, double t);

// Full kernel q(x(t) | x0). Rejects t < eps, where the kernel degenerates.
Marginal marginal(const SdeSpec& spec, const Eigen::VectorXd& x0, double t);

// Log-density of the terminal prior: N(0, sigma_max^2 I) for VE,
// N(0, I) for VP and sub-VP.
double prior_logp(const SdeSpec& spec, const Eigen::VectorXd& xT);

}  // namespace sgc
