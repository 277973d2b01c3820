#pragma once

#include <span>

namespace emostock::stats {

double mean(std::span<const double> xs);

// Population standard deviation (divide by n), two-pass.
double population_stddev(std::span<const double> xs);

// Sample variance (divide by n-1).
double sample_variance(std::span<const double> xs);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t with (possibly non-integer) dof degrees of freedom.
double student_t_cdf(double t, double dof);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-tailed
};

// Welch's two-sample t-test, two-tailed p via Welch-Satterthwaite dof.
// Both samples must have >= 2 elements. Zero variance in both samples gives
// p = 1 for equal means and p = 0 otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace emostock::stats
