#ifndef CAUSALTS_MATHUTIL_HPP
#define CAUSALTS_MATHUTIL_HPP

namespace causalts {

// Standard normal CDF.
double normal_cdf(double x);

// Regularized incomplete beta function I_x(a, b), x in [0, 1].
double incomplete_beta(double a, double b, double x);

// Upper-tail p-value of an F(d1, d2) statistic. Returns a value in [0, 1].
double f_test_pvalue(double f, double d1, double d2);

}  // namespace causalts

#endif
