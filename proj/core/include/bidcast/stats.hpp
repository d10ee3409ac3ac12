#pragma once

#include <span>
#include <vector>

namespace bidcast::stats {

double mean(std::span<const double> xs);

// sample variance (n-1 denominator); 0 for n < 2
double sample_variance(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);

// Quantile by linear interpolation between closest ranks: h = (n-1)p.
// `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double p);

// Pearson correlation; throws ZeroVariance when either side is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with (possibly fractional) dof.
double student_t_two_sided_p(double t, double dof);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_two_sided = 1.0;
};

// Welch's unequal-variance t-test.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Kolmogorov limit distribution tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Two-sample KS statistic D = sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Asymptotic two-sample p-value: Q(D * sqrt(n*m/(n+m))).
double ks_asymptotic_p(std::span<const double> a, std::span<const double> b);

struct PearsonTest {
    double r = 0.0;
    double p_two_sided = 1.0;
};

// Correlation with two-sided p from t = r sqrt((n-2)/(1-r^2)), n-2 dof.
PearsonTest pearson_test(std::span<const double> xs, std::span<const double> ys);

} // namespace bidcast::stats
