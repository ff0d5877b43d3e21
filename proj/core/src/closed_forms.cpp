#include "gilbert/closed_forms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gilbert {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm,
                       double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double eps) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, eps, 48);
}

// W0(lambda g)/g, extended by its limit lambda at g = 0.
double intensity_from_g(double lambda, double g) {
  if (g < 1e-9) return lambda * (1.0 - lambda * g);
  return lambert_w0(lambda * g) / g;
}

}  // namespace

double mean_edges_approx(double lambda, const Window& window) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("mean_edges_approx: lambda must be positive");
  }
  const double d = static_cast<double>(window.dim());
  const double kappa = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return 0.5 * window.volume() * lambda * lambda * kappa;
}

double prob_no_missing_edges(double lambda, double w) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(
        "prob_no_missing_edges: lambda must be positive");
  }
  if (!(w >= 1.0)) {
    throw std::invalid_argument("prob_no_missing_edges: requires w >= 1");
  }
  const double t = lambda * (w - 1.0);
  return std::exp(-t) * (1.0 + t);
}

double prob_at_most_one_missing_edge(double lambda, double w) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(
        "prob_at_most_one_missing_edge: lambda must be positive");
  }
  if (!(w >= 2.0)) {
    throw std::invalid_argument(
        "prob_at_most_one_missing_edge: requires w >= 2");
  }
  const double u = lambda * (w - 1.0);
  const double one_missing =
      std::exp(-lambda * w) *
      (0.5 * u * u + (std::expm1(lambda) - lambda) * (u - 1.0) +
       0.5 * lambda * lambda);
  return prob_no_missing_edges(lambda, w) + one_missing;
}

double lens_area(double r) {
  if (!(r >= 0.0 && r <= 2.0)) {
    throw std::invalid_argument("lens_area: r must be in [0, 2]");
  }
  return 2.0 * std::acos(0.5 * r) - r * std::sqrt(1.0 - 0.25 * r * r);
}

double lambert_w0(double x) {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("lambert_w0: x must be >= 0");
  }
  if (x == 0.0) return 0.0;
  // log1p(x) >= W0(x) on x >= 0 and y e^y is convex there, so Newton descends
  // monotonically; the damping guard is for safety only.
  double y = std::log1p(x);
  for (int iter = 0; iter < 100; ++iter) {
    const double ey = std::exp(y);
    const double residual = y * ey - x;
    double step = residual / (ey * (1.0 + y));
    while (y - step <= -1.0) step *= 0.5;
    y -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(y))) break;
  }
  return y;
}

double saddle_point_intensity(double lambda, double beta) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(
        "saddle_point_intensity: lambda must be positive");
  }
  const double g = (1.0 - beta) * kPi;
  if (!(g > 0.0)) {
    throw std::invalid_argument(
        "saddle_point_intensity: requires beta < 1 so that G = (1 - beta) pi "
        "is positive");
  }
  return lambert_w0(lambda * g) / g;
}

double pair_correlation_ps(double r, const StraussCalibration& calib) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("pair_correlation_ps: r must be in [0, 1]");
  }
  const double om = 1.0 - calib.beta;
  return calib.beta * std::exp(om * om * lens_area(r) * calib.lambda_ps);
}

double calibration_ratio(double lambda, double beta) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("calibration_ratio: lambda must be positive");
  }
  if (!(beta >= 0.0)) {
    throw std::invalid_argument("calibration_ratio: beta must be >= 0");
  }
  // Classical inhibition strength s = e^{-beta} in (0, 1]; s = 1 is the
  // untilted process.
  const double s = std::exp(-beta);
  const double lps = intensity_from_g(lambda, (1.0 - s) * kPi);
  const double om = 1.0 - s;
  const double integral = integrate(
      [&](double r) {
        return r * std::exp(om * om * lens_area(r) * lps);
      },
      0.0, 1.0, 1e-11);
  return lps * lps * s * integral / (0.5 * lambda * lambda);
}

StraussCalibration calibrate_gamma(double lambda, double a, double mu) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("calibrate_gamma: lambda must be positive");
  }
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("calibrate_gamma: a must be in (0, 1)");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("calibrate_gamma: mu must be positive");
  }
  // The edge-level equation sets the tilted second-order edge intensity equal
  // to (1 - a) times its untilted value. Both sides carry the same window
  // factor, so the ratio form below is window-free and the root depends only
  // on (lambda, a); mu enters the returned target level.
  const double target = 1.0 - a;
  double lo = 1e-12;
  double hi = 1.0 - 1e-9;
  const double ratio_lo = calibration_ratio(lambda, lo);
  const double ratio_hi = calibration_ratio(lambda, hi);
  if (!(ratio_lo - target > 0.0 && ratio_hi - target < 0.0)) {
    std::ostringstream msg;
    msg << "calibrate_gamma: no root bracketed in (0, 1): ratio(" << lo
        << ") = " << ratio_lo << ", ratio(" << hi << ") = " << ratio_hi
        << ", target = " << target;
    throw std::runtime_error(msg.str());
  }
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (calibration_ratio(lambda, mid) - target >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (1.0 + lo)) break;
  }
  const double gamma = std::exp(0.5 * (lo + hi));
  const double beta = std::log(gamma);
  StraussCalibration calib;
  calib.gamma = gamma;
  calib.beta = beta;
  calib.lambda_ps = saddle_point_intensity(lambda, beta);
  calib.target_edges = (1.0 - a) * mu;
  return calib;
}

}  // namespace gilbert
