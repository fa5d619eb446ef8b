#ifndef PEERLOC_MIXTURE_MODEL_HPP
#define PEERLOC_MIXTURE_MODEL_HPP

#include <utility>

#include "peerloc/math_util.hpp"

namespace peerloc {

/// Noise parameters of the LOS/NLOS range observation model.
///
/// A LOS reading is the true distance plus N(0, sigma_los^2) noise. An NLOS
/// reading additionally carries a positive multipath excess delay drawn from
/// an exponential distribution with mean sigma_nlos, so its density is the
/// exponentially modified Gaussian. sigma_ins is the per-axis standard
/// deviation of the inertial displacement noise used by the motion model.
struct MixtureParams {
  double alpha = 0.3;       ///< long-run fraction of LOS readings, 0 < alpha <= 1
  double sigma_los = 0.05;  ///< std of LOS Gaussian noise [m]
  double sigma_nlos = 5.0;  ///< mean of NLOS exponential excess delay [m]
  double sigma_ins = 0.1;   ///< std of per-step INS displacement noise per axis [m]

  /// Throws std::invalid_argument when any field is outside its domain.
  void validate() const;

  friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

/// One-step transition probabilities of the two-state LOS/NLOS chain.
/// State 1 is LOS, state 0 is NLOS; the chain is "sticky" for the
/// parameter ranges used here (the indicator changes slowly over time).
struct LosTransition {
  double p01 = 0.0;  ///< P(z_t = 1 | z_{t-1} = 0)
  double p11 = 0.0;  ///< P(z_t = 1 | z_{t-1} = 1)

  friend bool operator==(const LosTransition&, const LosTransition&) = default;
};

/// LOS indicator: 1 = line of sight, 0 = non line of sight.
enum class LosIndicator : int { kNlos = 0, kLos = 1 };

/// Density of a LOS range reading theta given true distance d.
double los_likelihood(double theta, double d, const MixtureParams& params);
double log_los_likelihood(double theta, double d, const MixtureParams& params);

/// Density of an NLOS range reading theta given true distance d
/// (exponential excess delay convolved with the Gaussian noise).
double nlos_likelihood(double theta, double d, const MixtureParams& params);
double log_nlos_likelihood(double theta, double d, const MixtureParams& params);

/// Dispatch on the LOS indicator.
double observation_likelihood(double theta, double d, LosIndicator z,
                              const MixtureParams& params);
double log_observation_likelihood(double theta, double d, LosIndicator z,
                                  const MixtureParams& params);

/// Precomputed constants for repeated likelihood evaluation against fixed
/// params; validates once at construction and skips per-call checks.
class ObservationModel {
 public:
  explicit ObservationModel(const MixtureParams& params);

  double log_los(double theta, double d) const {
    const double r = (theta - d) * inv_sigma_;
    return log_gauss_norm_ - 0.5 * r * r;
  }
  double log_nlos(double theta, double d) const {
    const double x = theta - d;
    return log_lambda_ - lambda_ * x + half_l2s2_ +
           log_ndtr((x - lambda_sigma2_) * inv_sigma_);
  }
  double log_observation(double theta, double d, LosIndicator z) const {
    return z == LosIndicator::kLos ? log_los(theta, d) : log_nlos(theta, d);
  }
  const MixtureParams& params() const { return params_; }

 private:
  MixtureParams params_;
  double inv_sigma_;
  double log_gauss_norm_;
  double lambda_;
  double log_lambda_;
  double lambda_sigma2_;  ///< lambda * sigma_los^2
  double half_l2s2_;      ///< lambda^2 sigma_los^2 / 2
};

/// Build the transition whose stationary LOS probability equals alpha, given
/// the NLOS->LOS entry probability p01. Requires
/// 0 <= p01 <= min(1, alpha/(1-alpha)); alpha = 1 yields the absorbing
/// all-LOS chain regardless of p01.
LosTransition transition_from_alpha(double alpha, double p01);

/// Stationary distribution (pi_nlos, pi_los) of the two-state chain. Throws
/// std::domain_error when both states are absorbing (p01 = 0 and p11 = 1).
std::pair<double, double> stationary_distribution(const LosTransition& t);

}  // namespace peerloc

#endif  // PEERLOC_MIXTURE_MODEL_HPP
