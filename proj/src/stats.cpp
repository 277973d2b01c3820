#include "emostock/stats.hpp"

#include <cmath>
#include <limits>

#include "emostock/errors.hpp"

namespace emostock::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw data_error(ErrorCode::empty, "mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_stddev(std::span<const double> xs) {
  if (xs.size() < 2)
    throw data_error(ErrorCode::too_short,
                     "population stddev needs at least 2 values");
  double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2)
    throw data_error(ErrorCode::too_short,
                     "sample variance needs at least 2 values");
  double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (std::isnan(t) || dof <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  double x = dof / (dof + t * t);
  double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw data_error(ErrorCode::too_few_runs,
                     "Welch t-test needs at least 2 values per sample");
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double ma = mean(a);
  double mb = mean(b);
  double va = sample_variance(a);
  double vb = sample_variance(b);
  double sa = va / na;
  double sb = vb / nb;

  WelchResult r;
  if (sa + sb == 0.0) {
    // no spread at all: identical means are indistinguishable, distinct
    // means are trivially separated
    r.t = 0.0;
    r.dof = na + nb - 2.0;
    r.p = (ma == mb) ? 1.0 : 0.0;
    if (ma != mb) r.t = std::numeric_limits<double>::infinity();
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.dof = (sa + sb) * (sa + sb) /
          (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  // two-tailed p = I_x(dof/2, 1/2) at x = dof/(dof + t^2); computing the tail
  // through the beta directly keeps extreme t from rounding p to zero
  r.p = regularized_incomplete_beta(r.dof / 2.0, 0.5,
                                    r.dof / (r.dof + r.t * r.t));
  if (r.p < 0.0) r.p = 0.0;
  if (r.p > 1.0) r.p = 1.0;
  return r;
}

}  // namespace emostock::stats
