#include "sgc/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_time(const SdeSpec& spec, double t, const char* op) {
  if (!(t >= 0.0 && t <= spec.t_end)) {
    throw std::invalid_argument(std::string(op) + ": t=" + std::to_string(t) +
                                " outside [0, " + std::to_string(spec.t_end) + "]");
  }
}

}  // namespace

const char* family_name(SdeFamily family) {
  switch (family) {
    case SdeFamily::kVE: return "ve";
    case SdeFamily::kVP: return "vp";
    case SdeFamily::kSubVP: return "subvp";
  }
  return "?";
}

SdeFamily family_from_name(std::string_view name) {
  if (name == "ve") return SdeFamily::kVE;
  if (name == "vp") return SdeFamily::kVP;
  if (name == "subvp" || name == "sub-vp") return SdeFamily::kSubVP;
  throw std::invalid_argument("unknown SDE family: " + std::string(name));
}

void SdeSpec::validate() const {
  if (!(0.0 < beta_min && beta_min < beta_max))
    throw std::invalid_argument("SdeSpec: need 0 < beta_min < beta_max");
  if (!(0.0 < sigma_min && sigma_min < sigma_max))
    throw std::invalid_argument("SdeSpec: need 0 < sigma_min < sigma_max");
  if (!(0.0 < eps && eps < t_end))
    throw std::invalid_argument("SdeSpec: need 0 < eps < t_end");
}

double beta(const SdeSpec& spec, double t) {
  if (spec.family == SdeFamily::kVE)
    throw std::invalid_argument("beta: undefined for the VE family");
  check_time(spec, t, "beta");
  return spec.beta_min + t * (spec.beta_max - spec.beta_min);
}

double int_beta(const SdeSpec& spec, double t) {
  check_time(spec, t, "int_beta");
  return spec.beta_min * t + 0.5 * t * t * (spec.beta_max - spec.beta_min);
}

double ve_sigma(const SdeSpec& spec, double t) {
  check_time(spec, t, "ve_sigma");
  return spec.sigma_min * std::pow(spec.sigma_max / spec.sigma_min, t);
}

Eigen::VectorXd drift(const SdeSpec& spec, const Eigen::VectorXd& x, double t) {
  check_time(spec, t, "drift");
  if (spec.family == SdeFamily::kVE) return Eigen::VectorXd::Zero(x.size());
  return (-0.5 * beta(spec, t)) * x;
}

double diffusion(const SdeSpec& spec, double t) {
  check_time(spec, t, "diffusion");
  switch (spec.family) {
    case SdeFamily::kVE:
      return ve_sigma(spec, t) * std::sqrt(2.0 * std::log(spec.sigma_max / spec.sigma_min));
    case SdeFamily::kVP:
      return std::sqrt(beta(spec, t));
    case SdeFamily::kSubVP:
      return std::sqrt(beta(spec, t) * (-std::expm1(-2.0 * int_beta(spec, t))));
  }
  return 0.0;
}

double mean_scale(const SdeSpec& spec, double t) {
  check_time(spec, t, "mean_scale");
  if (spec.family == SdeFamily::kVE) return 1.0;
  return std::exp(-0.5 * int_beta(spec, t));
}

double marginal_std(const SdeSpec& spec, double t) {
  check_time(spec, t, "marginal_std");
  switch (spec.family) {
    case SdeFamily::kVE:
      return ve_sigma(spec, t);
    case SdeFamily::kVP:
      return std::sqrt(-std::expm1(-int_beta(spec, t)));
    case SdeFamily::kSubVP:
      return -std::expm1(-int_beta(spec, t));
  }
  return 0.0;
}

Marginal marginal(const SdeSpec& spec, const Eigen::VectorXd& x0, double t) {
  if (!(t >= spec.eps && t <= spec.t_end)) {
    throw std::invalid_argument("marginal: t=" + std::to_string(t) +
                                " outside [eps, t_end]; the kernel degenerates below eps");
  }
  return Marginal{mean_scale(spec, t) * x0, marginal_std(spec, t)};
}

double prior_logp(const SdeSpec& spec, const Eigen::VectorXd& xT) {
  const double d = static_cast<double>(xT.size());
  if (spec.family == SdeFamily::kVE) {
    const double var = spec.sigma_max * spec.sigma_max;
    return -0.5 * d * (kLog2Pi + std::log(var)) - 0.5 * xT.squaredNorm() / var;
  }
  return -0.5 * d * kLog2Pi - 0.5 * xT.squaredNorm();
}

}  // namespace sgc
