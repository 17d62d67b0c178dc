#include "causalts/mathutil.hpp"

#include <cmath>
#include <limits>

namespace causalts {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-14;
    constexpr double fpmin = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    // Use the symmetry relation to keep the continued fraction convergent.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_test_pvalue(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    double x = d2 / (d2 + d1 * f);
    double p = incomplete_beta(d2 / 2.0, d1 / 2.0, x);
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

}  // namespace causalts
