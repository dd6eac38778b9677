#include "hest/normal.hpp"

#include <cmath>

#include "hest/errors.hpp"

namespace hest {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw HestError(ErrorKind::config_invalid, "normal_quantile requires p in (0,1)");
    }
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;  // tail probability, q <= 0.5

    // rational tail approximation (Abramowitz & Stegun 26.2.23 coefficients)
    const double t = std::sqrt(-2.0 * std::log(q));
    double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                       (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
    x = -x;  // lower-tail quantile for probability q

    // Newton refinement against the erfc-based CDF; the tail form of the CDF
    // is evaluated without cancellation for x < 0, so iterate in that regime.
    for (int it = 0; it < 4; ++it) {
        const double err = normal_cdf(x) - q;
        const double d = normal_pdf(x);
        if (d <= 0.0) break;
        const double step = err / d;
        x -= step;
        if (std::fabs(step) < 1e-14 * (1.0 + std::fabs(x))) break;
    }
    return upper ? -x : x;
}

}  // namespace hest
