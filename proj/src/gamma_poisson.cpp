#include "plume/gamma_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace plume {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_params(double eta, double theta, double c, long n) {
  if (!(eta > 0.0) || !(theta > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("eta, theta, c must be positive");
  }
  if (n < 0) throw std::invalid_argument("count must be nonnegative");
}

// Trapezoid rule in log space on [max(0, mu-10*sigma), mu+10*sigma] where
// (mu, sigma) are the prior mean and standard deviation. `half` scales the
// Poisson exponent: 1 for I, 1/2 for J.
double log_quad(double eta, double theta, double c, long n, int points, double half) {
  if (points < 2) throw std::invalid_argument("quadrature needs at least 2 points");
  const double mu = eta * theta;
  const double sigma = std::sqrt(eta) * theta;
  const double lo = std::max(0.0, mu - 10.0 * sigma);
  const double hi = mu + 10.0 * sigma;
  const double h = (hi - lo) / (points - 1);

  std::vector<double> logf(points, kNegInf);
  double peak = kNegInf;
  for (int i = 0; i < points; ++i) {
    const double a = lo + h * i;
    const double v = half * log_poisson_pmf(n, c * a) + log_gamma_pdf(a, eta, theta);
    logf[i] = v;
    peak = std::max(peak, v);
  }
  if (!std::isfinite(peak)) return kNegInf;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    if (std::isfinite(logf[i])) sum += w * std::exp(logf[i] - peak);
  }
  return peak + std::log(sum) + std::log(h);
}

}  // namespace

GammaParams update_gamma(GammaParams prior, long n, double c) {
  check_params(prior.eta, prior.theta, c, n);
  return {prior.eta + static_cast<double>(n), prior.theta / (1.0 + c * prior.theta)};
}

double log_gamma_pdf(double a, double eta, double theta) {
  if (a <= 0.0) return kNegInf;
  return (eta - 1.0) * std::log(a) - a / theta - std::lgamma(eta) - eta * std::log(theta);
}

double log_poisson_pmf(long n, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("poisson mean must be nonnegative");
  if (lambda == 0.0) return n == 0 ? 0.0 : kNegInf;
  return static_cast<double>(n) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(n) + 1.0);
}

double log_count_likelihood_I(double eta, double theta, double c, long n) {
  check_params(eta, theta, c, n);
  const double nd = static_cast<double>(n);
  return nd * std::log(c) + std::lgamma(nd + eta) - std::lgamma(nd + 1.0) - std::lgamma(eta) -
         eta * std::log(theta) - (nd + eta) * std::log(c + 1.0 / theta);
}

double log_count_likelihood_ratio(double eta, double theta, double c, long n, double a) {
  check_params(eta, theta, c, n);
  if (!(a > 0.0)) throw std::invalid_argument("evaluation point must be positive");
  const GammaParams post = update_gamma({eta, theta}, n, c);
  return log_poisson_pmf(n, c * a) + log_gamma_pdf(a, eta, theta) -
         log_gamma_pdf(a, post.eta, post.theta);
}

double log_count_likelihood_quad(double eta, double theta, double c, long n, int points) {
  check_params(eta, theta, c, n);
  return log_quad(eta, theta, c, n, points, 1.0);
}

double log_bhatt_J(double eta, double theta, double c, long n) {
  check_params(eta, theta, c, n);
  const double nd = static_cast<double>(n);
  return 0.5 * nd * std::log(c) - 0.5 * std::lgamma(nd + 1.0) + std::lgamma(eta + 0.5 * nd) -
         std::lgamma(eta) - eta * std::log(theta) - (eta + 0.5 * nd) * std::log(0.5 * c + 1.0 / theta);
}

double log_bhatt_J_quad(double eta, double theta, double c, long n, int points) {
  check_params(eta, theta, c, n);
  return log_quad(eta, theta, c, n, points, 0.5);
}

}  // namespace plume
