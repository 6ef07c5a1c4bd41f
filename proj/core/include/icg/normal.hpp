#pragma once

namespace icg {

// Standard normal CDF. Absolute error below 1e-15; throws on non-finite input.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse of normal_cdf on (0, 1). Rational approximation refined by one
// Halley step against the erfc-based CDF.
double normal_quantile(double p);

}  // namespace icg
