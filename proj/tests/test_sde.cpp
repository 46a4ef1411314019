#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "sgc/sde.hpp"

using namespace sgc;

namespace {

SdeSpec spec_for(SdeFamily f) {
  SdeSpec s;
  s.family = f;
  return s;
}

}  // namespace

TEST_CASE("family names round-trip") {
  CHECK(family_name(SdeFamily::kVE) == "ve");
  CHECK(family_name(SdeFamily::kVP) == "vp");
  CHECK(family_name(SdeFamily::kSubVP) == "subvp");
  CHECK(family_from_name("ve") == SdeFamily::kVE);
  CHECK(family_from_name("vp") == SdeFamily::kVP);
  CHECK(family_from_name("subvp") == SdeFamily::kSubVP);
  CHECK(family_from_name("sub-vp") == SdeFamily::kSubVP);
  CHECK_THROWS_AS((void)family_from_name("vesde"), std::invalid_argument);
}

TEST_CASE("spec validation rejects bad parameters") {
  SdeSpec s;
  CHECK_NOTHROW(s.validate());

  SdeSpec bad = s;
  bad.beta_min = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.beta_max = bad.beta_min;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.family = SdeFamily::kVE;
  bad.sigma_min = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.family = SdeFamily::kVE;
  bad.sigma_max = bad.sigma_min;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.eps = bad.t_end;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("beta is linear in t") {
  auto s = spec_for(SdeFamily::kVP);
  CHECK(beta(s, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(beta(s, 1.0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(beta(s, 0.5) == doctest::Approx(10.05).epsilon(1e-12));

  auto ve = spec_for(SdeFamily::kVE);
  CHECK_THROWS_AS((void)beta(ve, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)beta(s, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)beta(s, 1.5), std::invalid_argument);
}

TEST_CASE("int_beta matches the closed-form integral") {
  auto s = spec_for(SdeFamily::kVP);
  CHECK(int_beta(s, 0.0) == 0.0);
  CHECK(int_beta(s, 1.0) == doctest::Approx(10.05).epsilon(1e-12));
  CHECK(int_beta(s, 0.5) == doctest::Approx(2.5375).epsilon(1e-12));

  // trapezoid refinement agrees with the antiderivative
  double acc = 0.0;
  int n = 200000;
  double t = 0.7;
  for (int i = 0; i < n; ++i) {
    double a = t * i / n, b = t * (i + 1) / n;
    acc += 0.5 * (beta(s, a) + beta(s, b)) * (b - a);
  }
  CHECK(acc == doctest::Approx(int_beta(s, t)).epsilon(1e-10));
}

TEST_CASE("VE sigma is geometric in t") {
  auto s = spec_for(SdeFamily::kVE);
  CHECK(ve_sigma(s, 0.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(ve_sigma(s, 1.0) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(ve_sigma(s, 0.5) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
}

TEST_CASE("drift fixtures") {
  Eigen::VectorXd x(2);
  x << 1.0, -2.0;

  auto ve = spec_for(SdeFamily::kVE);
  CHECK(drift(ve, x, 0.3).norm() == 0.0);

  auto vp = spec_for(SdeFamily::kVP);
  Eigen::VectorXd d0 = drift(vp, x, 0.0);
  CHECK(d0(0) == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(d0(1) == doctest::Approx(0.10).epsilon(1e-12));

  auto sub = spec_for(SdeFamily::kSubVP);
  CHECK((drift(sub, x, 0.5) - drift(vp, x, 0.5)).norm() == 0.0);
}

TEST_CASE("diffusion fixtures") {
  auto vp = spec_for(SdeFamily::kVP);
  CHECK(diffusion(vp, 1.0) == doctest::Approx(4.47213595499958).epsilon(1e-12));
  CHECK(diffusion(vp, 0.0) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));

  auto ve = spec_for(SdeFamily::kVE);
  CHECK(diffusion(ve, 1.0) == doctest::Approx(206.363674024963).epsilon(1e-10));

  auto sub = spec_for(SdeFamily::kSubVP);
  CHECK(diffusion(sub, 0.0) == 0.0);
  CHECK(diffusion(sub, 0.5) == doctest::Approx(3.1602494492178512).epsilon(1e-12));
  // once exp(-2B) has decayed, sub-VP diffusion approaches the VP one
  CHECK(diffusion(sub, 1.0) == doctest::Approx(4.472135950829292).epsilon(1e-12));
}

TEST_CASE("marginal statistics fixtures") {
  auto vp = spec_for(SdeFamily::kVP);
  CHECK(mean_scale(vp, 1.0) == doctest::Approx(0.006571586494929619).epsilon(1e-12));
  CHECK(mean_scale(vp, 0.5) == doctest::Approx(0.2811828807967524).epsilon(1e-12));
  CHECK(marginal_std(vp, 1.0) == doctest::Approx(0.9999784068923386).epsilon(1e-12));
  CHECK(marginal_std(vp, 0.5) == doctest::Approx(0.9596542020680363).epsilon(1e-12));
  CHECK(marginal_std(vp, 1e-5) == doctest::Approx(0.0010004971259111187).epsilon(1e-10));

  auto sub = spec_for(SdeFamily::kSubVP);
  CHECK(mean_scale(sub, 0.5) == doctest::Approx(0.2811828807967524).epsilon(1e-12));
  CHECK(marginal_std(sub, 1.0) == doctest::Approx(0.9999568142509396).epsilon(1e-12));
  CHECK(marginal_std(sub, 0.5) == doctest::Approx(0.9209361875468394).epsilon(1e-12));

  auto ve = spec_for(SdeFamily::kVE);
  CHECK(mean_scale(ve, 0.7) == 1.0);
  CHECK(marginal_std(ve, 0.5) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
}

TEST_CASE("VP variance identity and sub-VP relation hold across t") {
  auto vp = spec_for(SdeFamily::kVP);
  auto sub = spec_for(SdeFamily::kSubVP);
  for (double t : {1e-5, 0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 1.0}) {
    double a = mean_scale(vp, t);
    double s = marginal_std(vp, t);
    CHECK(a * a + s * s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(marginal_std(sub, t) == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("marginal combines mean scale and std") {
  auto vp = spec_for(SdeFamily::kVP);
  Eigen::VectorXd x0(3);
  x0 << 1.0, -0.5, 2.0;
  Marginal m = marginal(vp, x0, 0.5);
  CHECK((m.mean - mean_scale(vp, 0.5) * x0).norm() < 1e-15);
  CHECK(m.std == marginal_std(vp, 0.5));
  CHECK_THROWS_AS((void)marginal(vp, x0, 1e-6), std::invalid_argument);
}

TEST_CASE("prior log density fixtures") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd one(2);
  one << 1.0, 0.0;

  auto vp = spec_for(SdeFamily::kVP);
  CHECK(prior_logp(vp, zero) == doctest::Approx(-1.8378770664093453).epsilon(1e-14));
  CHECK(prior_logp(vp, one) == doctest::Approx(-2.3378770664093453).epsilon(1e-14));

  auto sub = spec_for(SdeFamily::kSubVP);
  CHECK(prior_logp(sub, zero) == prior_logp(vp, zero));

  auto ve = spec_for(SdeFamily::kVE);
  CHECK(prior_logp(ve, zero) == doctest::Approx(-9.661923077265637).epsilon(1e-14));
  CHECK(prior_logp(ve, one) == doctest::Approx(-9.662123077265637).epsilon(1e-14));
}

// Simulate the forward SDE with Euler-Maruyama and compare the empirical
// moments at an interior time against the closed-form perturbation kernel.
TEST_CASE("perturbation kernels match simulated forward dynamics") {
  const double x0 = 2.0;
  const double t = 0.5;
  const int paths = 20000;
  const int steps = 500;

  SUBCASE("vp") {
    auto s = spec_for(SdeFamily::kVP);
    auto em = sgc_test::em_moments(s, x0, t, paths, steps, 11);
    CHECK(em.mean == doctest::Approx(mean_scale(s, t) * x0).epsilon(0.03));
    CHECK(em.std == doctest::Approx(marginal_std(s, t)).epsilon(0.03));
  }
  SUBCASE("subvp") {
    auto s = spec_for(SdeFamily::kSubVP);
    auto em = sgc_test::em_moments(s, x0, t, paths, steps, 12);
    CHECK(em.mean == doctest::Approx(mean_scale(s, t) * x0).epsilon(0.03));
    CHECK(em.std == doctest::Approx(marginal_std(s, t)).epsilon(0.03));
  }
  SUBCASE("ve") {
    auto s = spec_for(SdeFamily::kVE);
    auto em = sgc_test::em_moments(s, x0, t, paths, steps, 13);
    CHECK(em.mean == doctest::Approx(x0).epsilon(0.03));
    CHECK(em.std == doctest::Approx(marginal_std(s, t)).epsilon(0.03));
  }
}
