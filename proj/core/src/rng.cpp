#include "gilbert/rng.hpp"

namespace gilbert {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}

long long RngStream::poisson(double mean) noexcept {
  if (mean < 10.0) {
    // Multiplicative inversion; exact, expected cost mean + 1 uniforms.
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = next_double();
    while (prod > limit) {
      ++k;
      prod *= next_double();
    }
    return k;
  }

  // PTRD (transformed rejection with decomposition), valid for mean >= 10.
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u;
    double v = next_double();
    if (v <= 0.86 * v_r) {
      u = v / v_r - 0.43;
      return static_cast<long long>(
          std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + mean + 0.445));
    }
    if (v >= v_r) {
      u = next_double() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0.0 ? -0.5 : 0.5) - u;
      v = next_double() * v_r;
    }
    const double us = 0.5 - std::abs(u);
    if (us < 0.013 && v > us) continue;
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.445);
    v = v * inv_alpha / (a / (us * us) + b);
    if (k >= 10.0) {
      if (std::log(v * smu) <=
          (k + 0.5) * std::log(mean / k) - mean - kLogSqrt2Pi + k -
              (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k) {
        return static_cast<long long>(k);
      }
    } else if (k >= 0.0) {
      if (std::log(v) <= k * std::log(mean) - mean - std::lgamma(k + 1.0)) {
        return static_cast<long long>(k);
      }
    }
  }
}

}  // namespace gilbert
