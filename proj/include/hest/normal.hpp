#pragma once

namespace hest {

// standard normal density
double normal_pdf(double x);

// standard normal CDF, absolute error below 1e-9 on |x| <= 8 (erfc based)
double normal_cdf(double x);

// inverse of normal_cdf on (0,1); rational initial guess refined by Newton
// steps, so normal_quantile(normal_cdf(x)) recovers x to 1e-7 for |x| <= 8
double normal_quantile(double p);

}  // namespace hest
