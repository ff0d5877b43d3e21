#pragma once

#include "gilbert/window.hpp"

namespace gilbert {

// Parameters of the Strauss-type change of measure used by the importance
// samplers. beta is stored as log(gamma) exactly (same double), and lambda_ps
// satisfies lambda_ps * G * exp(lambda_ps * G) = lambda * G with
// G = (1 - beta) * pi.
struct StraussCalibration {
  double gamma = 1.0;
  double beta = 0.0;
  double lambda_ps = 0.0;
  double target_edges = 0.0;
};

// Mean edge count of the unit-distance graph under the boundary-free
// approximation 0.5 * |W| * lambda^2 * kappa_d, with kappa_d the unit-ball
// volume in the window's dimension. Overestimates the true mean because edge
// effects are ignored.
double mean_edges_approx(double lambda, const Window& window);

// Exact probability that the graph on a Poisson process over [0, w] is
// complete (no missing edge), w >= 1.
double prob_no_missing_edges(double lambda, double w);

// Exact probability of at most one missing edge over [0, w], w >= 2.
double prob_at_most_one_missing_edge(double lambda, double w);

// Intersection area of two unit disks whose centers are distance r apart,
// r in [0, 2]: 2 acos(r/2) - r sqrt(1 - r^2/4).
double lens_area(double r);

// Principal branch W0 for x >= 0, by damped Newton from log1p(x); the residual
// W e^W - x stays below 1e-12 relative.
double lambert_w0(double x);

// Saddle-point intensity: the positive solution of y G e^{y G} = lambda G,
// G = (1 - beta) * pi. Requires G > 0.
double saddle_point_intensity(double lambda, double beta);

// Saddle-point pair correlation beta * exp((1 - beta)^2 * lens_area(r) *
// lambda_ps) for r in [0, 1], evaluated as printed (the bare beta prefactor
// included).
double pair_correlation_ps(double r, const StraussCalibration& calib);

// Ratio of the tilted edge-intensity integral to its untilted (beta = 0)
// value; decreases from 1 as beta grows. calibrate_gamma solves
// calibration_ratio(lambda, beta) = 1 - a for beta.
double calibration_ratio(double lambda, double beta);

// Solves the edge-level equation for the thinning strength: finds beta in
// (0, 1) with calibration_ratio(lambda, beta) = 1 - a by bisection, then
// returns gamma = e^beta together with the saddle-point intensity and the
// target edge level (1 - a) * mu. Two-dimensional setting.
StraussCalibration calibrate_gamma(double lambda, double a, double mu);

}  // namespace gilbert
