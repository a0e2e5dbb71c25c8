#pragma once

namespace plume {

// Sufficient statistics of the Gamma posterior over the release rate.
struct GammaParams {
  double eta = 0.0;
  double theta = 0.0;
};

// Conjugate update for a Poisson count n with mean c * rate.
GammaParams update_gamma(GammaParams prior, long n, double c);

double log_gamma_pdf(double a, double eta, double theta);
double log_poisson_pmf(long n, double lambda);

// log of I = integral of Poisson(n; c*A) * Gamma(A; eta, theta) dA.
// Closed (negative-binomial) form; the production route.
double log_count_likelihood_I(double eta, double theta, double c, long n);
// Same value via the prior/posterior density ratio evaluated at an arbitrary
// point a > 0; exact for every a, used to cross-check the closed form.
double log_count_likelihood_ratio(double eta, double theta, double c, long n, double a);
// Same value by log-space trapezoid quadrature over the prior mass window.
double log_count_likelihood_quad(double eta, double theta, double c, long n, int points);

// log of J = integral of sqrt(Poisson(n; c*A)) * Gamma(A; eta, theta) dA.
double log_bhatt_J(double eta, double theta, double c, long n);
double log_bhatt_J_quad(double eta, double theta, double c, long n, int points = 256);

}  // namespace plume
