#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sgc {

struct OdeControl {
  double rtol = 1e-5;
  double atol = 1e-5;
  double h_init = 1e-3;
  long max_steps = 100000;
};

// Step-size underflow, non-finite state, or step budget exhaustion.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeResult {
  Eigen::VectorXd y;
  long accepted_steps = 0;
  long rhs_evals = 0;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Dormand-Prince 5(4) embedded pair with FSAL and standard proportional step
// control. Integrates y' = f(t, y) from t0 to t1 (t1 > t0) and returns y(t1).
// The error norm is the RMS of err / (atol + rtol * max(|y|, |y_new|)); steps
// are accepted when it is <= 1 and the next step scales by
// clamp(0.9 * norm^(-1/5), 0.2, 5).
OdeResult integrate_dp54(const OdeRhs& f, const Eigen::VectorXd& y0, double t0,
                         double t1, const OdeControl& control);

}  // namespace sgc
