#pragma once

#include <cstddef>
#include <vector>

namespace icg {

// Payoff primitives. c is the safe-action payoff, lambda0 the initial share
// of risky play, (a, b) optional scales on the state and on lagged play.
struct GameConfig {
  double c;
  double lambda0;
  double a = 1.0;
  double b = 1.0;

  GameConfig(double c_, double lambda0_, double a_ = 1.0, double b_ = 1.0);

  // Risk-dominance boundary in theta: c/a - b/(2a).
  double risk_dominance_threshold() const { return c / a - 0.5 * b / a; }
};

// Per-period signal variances together with the induced posterior variances.
// Posterior uncertainty is tracked as cumulative precision eta_t^{-2} so that
// summing precisions never cancels. Indices are 0-based: entry k is period
// t = k + 1.
class PosteriorSchedule {
 public:
  static PosteriorSchedule from_variances(std::vector<double> sigma2);
  // `precision` holds cumulative posterior precisions eta_t^{-2}, which must
  // be positive and non-decreasing. Signal variances are recovered from the
  // increments.
  static PosteriorSchedule from_precisions(std::vector<double> precision);

  std::size_t size() const { return precision_.size(); }

  // Period variance sigma_t^2 (may be +inf for an uninformative period).
  double sigma2(std::size_t t) const { return sigma2_[t - 1]; }
  // Cumulative posterior precision eta_t^{-2}.
  double precision(std::size_t t) const { return precision_[t - 1]; }
  // Posterior variance eta_t^2.
  double eta2(std::size_t t) const { return 1.0 / precision_[t - 1]; }
  // Step scale A_t = sqrt(eta_t^2 + eta_{t-1}^2), defined for t >= 2.
  double step_scale(std::size_t t) const;

  const std::vector<double>& precisions() const { return precision_; }
  const std::vector<double>& variances() const { return sigma2_; }

 private:
  PosteriorSchedule() = default;
  std::vector<double> sigma2_;
  std::vector<double> precision_;
};

// Equilibrium belief thresholds mu*_t with the companion normalized steps
// gamma_t = (mu*_t - mu*_{t-1}) / A_t and per-step solver residuals.
struct ThresholdPath {
  std::vector<double> mu_star;
  std::vector<double> gamma;
  std::vector<double> residual;

  std::size_t size() const { return mu_star.size(); }
};

// Aggregate play lambda_t(theta) per period.
struct PlayPath {
  double theta = 0.0;
  std::vector<double> lambda;

  std::size_t size() const { return lambda.size(); }
};

// Solves mu + Phi((mu - mu_prev) / A) = c for the unique mu in (c-1, c).
// The solve runs in the normalized variable gamma = (mu - mu_prev) / A, where
// the equation A*gamma + Phi(gamma) = c - mu_prev is well conditioned for
// every A > 0; residuals are reported on that form and stay below 1e-12.
double threshold_step(double mu_prev, double A, double c);

// Solves A*gamma + Phi(gamma) = Phi(gamma_prev). The solution shares the sign
// of gamma_prev and is no larger in magnitude.
double gamma_step(double gamma_prev, double A);

// Iterates threshold_step from mu*_1 = c - lambda0 over periods 1..T.
ThresholdPath threshold_path(const GameConfig& config,
                             const PosteriorSchedule& schedule, std::size_t T);

// lambda_t = Phi((theta - mu*_t) / eta_t).
PlayPath aggregate_play(double theta, const ThresholdPath& path,
                        const PosteriorSchedule& schedule);

// Complete-information best-response iteration lambda_t = 1{theta +
// lambda_{t-1} >= c} (weak inequality at ties).
PlayPath simulate_complete_info(double theta, double lambda0, double c,
                                std::size_t T);

// RD(theta) = 1{a*theta >= c - b/2}.
int risk_dominant(double theta, const GameConfig& config);

}  // namespace icg
