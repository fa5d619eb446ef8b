#include "peerloc/mixture_model.hpp"

#include <cmath>
#include <stdexcept>

namespace peerloc {

namespace {

void check_distance(double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("distance must be finite and >= 0");
  }
}

}  // namespace

void MixtureParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1]");
  }
  if (!(sigma_los > 0.0) || !std::isfinite(sigma_los)) {
    throw std::invalid_argument("sigma_los must be positive and finite");
  }
  if (!(sigma_nlos > 0.0) || !std::isfinite(sigma_nlos)) {
    throw std::invalid_argument("sigma_nlos must be positive and finite");
  }
  if (!(sigma_ins > 0.0) || !std::isfinite(sigma_ins)) {
    throw std::invalid_argument("sigma_ins must be positive and finite");
  }
}

double log_los_likelihood(double theta, double d, const MixtureParams& params) {
  check_distance(d);
  return ObservationModel(params).log_los(theta, d);
}

double los_likelihood(double theta, double d, const MixtureParams& params) {
  return std::exp(log_los_likelihood(theta, d, params));
}

// The NLOS density is the exponentially modified Gaussian: with rate
// lambda = 1/sigma_nlos,
//   f(theta) = lambda * exp(lambda*(d-theta) + lambda^2 sigma^2 / 2)
//            * Phi((theta - d - lambda*sigma^2) / sigma),
// evaluated in log space; log_ndtr keeps the far tails finite.
double log_nlos_likelihood(double theta, double d, const MixtureParams& params) {
  check_distance(d);
  return ObservationModel(params).log_nlos(theta, d);
}

double nlos_likelihood(double theta, double d, const MixtureParams& params) {
  return std::exp(log_nlos_likelihood(theta, d, params));
}

double log_observation_likelihood(double theta, double d, LosIndicator z,
                                  const MixtureParams& params) {
  return z == LosIndicator::kLos ? log_los_likelihood(theta, d, params)
                                 : log_nlos_likelihood(theta, d, params);
}

double observation_likelihood(double theta, double d, LosIndicator z,
                              const MixtureParams& params) {
  return std::exp(log_observation_likelihood(theta, d, z, params));
}

ObservationModel::ObservationModel(const MixtureParams& params)
    : params_(params) {
  params.validate();
  inv_sigma_ = 1.0 / params.sigma_los;
  log_gauss_norm_ = -std::log(params.sigma_los) - kLogSqrt2Pi;
  lambda_ = 1.0 / params.sigma_nlos;
  log_lambda_ = std::log(lambda_);
  lambda_sigma2_ = lambda_ * params.sigma_los * params.sigma_los;
  half_l2s2_ = 0.5 * lambda_ * lambda_sigma2_;
}

LosTransition transition_from_alpha(double alpha, double p01) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1]");
  }
  if (!(p01 >= 0.0) || !(p01 <= 1.0)) {
    throw std::invalid_argument("p01 must be in [0, 1]");
  }
  if (alpha == 1.0) {
    return {p01, 1.0};  // LOS absorbing; p01 is irrelevant once entered
  }
  // Detailed balance of the stationary distribution (1-alpha, alpha):
  //   alpha * (1 - p11) = (1 - alpha) * p01.
  const double p11 = 1.0 - (1.0 - alpha) * p01 / alpha;
  if (p11 < 0.0) {
    throw std::invalid_argument(
        "p01 too large for requested alpha: solved p11 is negative");
  }
  return {p01, p11};
}

std::pair<double, double> stationary_distribution(const LosTransition& t) {
  if (!(t.p01 >= 0.0) || !(t.p01 <= 1.0) || !(t.p11 >= 0.0) || !(t.p11 <= 1.0)) {
    throw std::invalid_argument("transition probabilities must be in [0, 1]");
  }
  const double p10 = 1.0 - t.p11;
  if (t.p01 == 0.0 && p10 == 0.0) {
    throw std::domain_error(
        "stationary distribution undefined: both states absorbing");
  }
  const double pi_los = t.p01 / (t.p01 + p10);
  return {1.0 - pi_los, pi_los};
}

}  // namespace peerloc
