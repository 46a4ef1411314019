#include "sgc/ode.hpp"

#include <algorithm>
#include <cmath>

namespace sgc {

namespace {

// Dormand-Prince coefficients. b5 is row 7 of a (the 5th-order solution is
// the last stage input), e = b5 - b4 gives the embedded error directly.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult integrate_dp54(const OdeRhs& f, const Eigen::VectorXd& y0, double t0,
                         double t1, const OdeControl& control) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_dp54: need t1 > t0");
  if (!(control.rtol > 0.0) || !(control.atol > 0.0) || !(control.h_init > 0.0) ||
      control.max_steps < 1)
    throw std::invalid_argument("integrate_dp54: bad control parameters");

  const Eigen::Index d = y0.size();
  Eigen::VectorXd y = y0;
  double t = t0;
  double h = std::min(control.h_init, t1 - t0);

  OdeResult result;
  Eigen::VectorXd k1 = f(t, y);
  ++result.rhs_evals;
  Eigen::VectorXd k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), y_new(d), err(d);

  const double h_floor = 1e-14 * std::max(1.0, std::abs(t1));
  long attempts = 0;
  while (t < t1) {
    if (++attempts > control.max_steps)
      throw IntegrationError("integrate_dp54: exceeded " +
                             std::to_string(control.max_steps) + " steps");
    h = std::min(h, t1 - t);
    if (h < h_floor)
      throw IntegrationError("integrate_dp54: step size underflow at t=" +
                             std::to_string(t));

    k2 = f(t + c2 * h, y + h * (a21 * k1));
    k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(t + h, y_new);
    result.rhs_evals += 6;

    if (!y_new.allFinite() || !k7.allFinite())
      throw IntegrationError("integrate_dp54: non-finite state at t=" +
                             std::to_string(t));

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm_sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double scale =
          control.atol + control.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = err[i] / scale;
      norm_sq += r * r;
    }
    const double norm = std::sqrt(norm_sq / double(d));

    if (norm <= 1.0) {
      t += h;
      y.swap(y_new);
      k1.swap(k7);  // FSAL
      ++result.accepted_steps;
      const double grow = norm == 0.0 ? 5.0 : 0.9 * std::pow(norm, -0.2);
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 1.0);
    }
  }
  result.y = std::move(y);
  return result;
}

}  // namespace sgc
