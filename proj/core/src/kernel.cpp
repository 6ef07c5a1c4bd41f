#include "icg/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "icg/normal.hpp"

namespace icg {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr double kWidthTol = 1e-15;

// Root of g(x) = A*x + Phi(x) - target on a bracket [lo, hi] with
// g(lo) <= 0 <= g(hi). Bisection safeguarded by Newton; g is strictly
// increasing so the bracket never degenerates.
double solve_step_equation(double A, double target, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    double g = A * x + normal_cdf(x) - target;
    if (std::abs(g) <= kResidualTol) return x;
    if (g > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double width = hi - lo;
    if (width <= kWidthTol ||
        width <= 4.0 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(lo), std::abs(hi))) {
      return x;
    }
    double slope = A + normal_pdf(x);
    double next = x - g / slope;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  return x;
}

}  // namespace

GameConfig::GameConfig(double c_, double lambda0_, double a_, double b_)
    : c(c_), lambda0(lambda0_), a(a_), b(b_) {
  if (!std::isfinite(c)) {
    throw std::invalid_argument("GameConfig: c must be finite");
  }
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) {
    throw std::invalid_argument("GameConfig: lambda0 must lie strictly in (0, 1)");
  }
  if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0)) {
    throw std::invalid_argument("GameConfig: payoff scales must lie in (0, 1]");
  }
}

PosteriorSchedule PosteriorSchedule::from_variances(std::vector<double> sigma2) {
  PosteriorSchedule s;
  s.precision_.reserve(sigma2.size());
  double prec = 0.0;
  for (std::size_t k = 0; k < sigma2.size(); ++k) {
    double v = sigma2[k];
    if (std::isnan(v) || v <= 0.0) {
      throw std::invalid_argument("PosteriorSchedule: sigma2[" +
                                  std::to_string(k + 1) +
                                  "] must lie in (0, +inf]");
    }
    prec += std::isinf(v) ? 0.0 : 1.0 / v;
    if (k == 0 && prec <= 0.0) {
      throw std::invalid_argument(
          "PosteriorSchedule: the first period must be informative");
    }
    s.precision_.push_back(prec);
  }
  s.sigma2_ = std::move(sigma2);
  return s;
}

PosteriorSchedule PosteriorSchedule::from_precisions(std::vector<double> precision) {
  PosteriorSchedule s;
  s.sigma2_.reserve(precision.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    double p = precision[k];
    if (std::isnan(p) || p <= 0.0 || std::isinf(p)) {
      throw std::invalid_argument("PosteriorSchedule: precision[" +
                                  std::to_string(k + 1) +
                                  "] must be positive and finite");
    }
    double inc = p - prev;
    if (inc < 0.0) {
      throw std::invalid_argument(
          "PosteriorSchedule: precision decreases at t = " +
          std::to_string(k + 1));
    }
    s.sigma2_.push_back(inc > 0.0 ? 1.0 / inc
                                  : std::numeric_limits<double>::infinity());
    prev = p;
  }
  s.precision_ = std::move(precision);
  return s;
}

double PosteriorSchedule::step_scale(std::size_t t) const {
  if (t < 2 || t > size()) {
    throw std::out_of_range("PosteriorSchedule::step_scale: t out of range");
  }
  return std::sqrt(eta2(t) + eta2(t - 1));
}

double threshold_step(double mu_prev, double A, double c) {
  if (!(A > 0.0) || !std::isfinite(A)) {
    throw std::domain_error("threshold_step: A must be positive and finite");
  }
  double target = c - mu_prev;
  if (!(target > 0.0 && target < 1.0)) {
    throw std::domain_error("threshold_step: mu_prev must lie in (c-1, c)");
  }
  if (target == 0.5) return mu_prev;
  // The root in gamma shares the sign of target - 1/2 and is bracketed by 0
  // and Phi^{-1}(target).
  double edge = normal_quantile(target);
  double lo = std::min(0.0, edge);
  double hi = std::max(0.0, edge);
  double gamma = solve_step_equation(A, target, lo, hi);
  return mu_prev + A * gamma;
}

double gamma_step(double gamma_prev, double A) {
  if (!(A > 0.0) || !std::isfinite(A)) {
    throw std::domain_error("gamma_step: A must be positive and finite");
  }
  if (gamma_prev == 0.0) return 0.0;
  // Reflect to the positive branch; the defining equation is odd in gamma.
  if (gamma_prev < 0.0) return -gamma_step(-gamma_prev, A);
  // When the true decrement A*gamma/(A + phi) falls below half an ulp the
  // root rounds to gamma_prev; returning it exactly keeps frozen paths fixed.
  double decrement = A * gamma_prev / (A + normal_pdf(gamma_prev));
  if (decrement < 0.25 * std::numeric_limits<double>::epsilon() * gamma_prev) {
    return gamma_prev;
  }
  double target = normal_cdf(gamma_prev);
  return solve_step_equation(A, target, 0.0, gamma_prev);
}

ThresholdPath threshold_path(const GameConfig& config,
                             const PosteriorSchedule& schedule, std::size_t T) {
  if (schedule.size() < T) {
    throw std::length_error("threshold_path: schedule shorter than horizon");
  }
  ThresholdPath path;
  if (T == 0) return path;
  path.mu_star.reserve(T);
  path.gamma.reserve(T);
  path.residual.reserve(T);

  // The recursion runs in gamma, where it stays well conditioned even when
  // the mu increments fall below an ulp of mu; mu is recovered as c - Phi(g).
  double gamma = normal_quantile(config.lambda0);
  path.mu_star.push_back(config.c - config.lambda0);
  path.gamma.push_back(gamma);
  path.residual.push_back(0.0);

  for (std::size_t t = 2; t <= T; ++t) {
    double A = schedule.step_scale(t);
    double target = normal_cdf(gamma);
    double next = gamma_step(gamma, A);
    path.mu_star.push_back(config.c - normal_cdf(next));
    path.gamma.push_back(next);
    path.residual.push_back(std::abs(A * next + normal_cdf(next) - target));
    gamma = next;
  }
  return path;
}

PlayPath aggregate_play(double theta, const ThresholdPath& path,
                        const PosteriorSchedule& schedule) {
  if (schedule.size() < path.size()) {
    throw std::length_error("aggregate_play: schedule shorter than path");
  }
  PlayPath play;
  play.theta = theta;
  play.lambda.reserve(path.size());
  for (std::size_t t = 1; t <= path.size(); ++t) {
    double eta = std::sqrt(schedule.eta2(t));
    double z = (theta - path.mu_star[t - 1]) / eta;
    play.lambda.push_back(std::isfinite(z) ? normal_cdf(z)
                                           : (z > 0.0 ? 1.0 : 0.0));
  }
  return play;
}

PlayPath simulate_complete_info(double theta, double lambda0, double c,
                                std::size_t T) {
  PlayPath play;
  play.theta = theta;
  play.lambda.reserve(T);
  double lambda = lambda0;
  for (std::size_t t = 0; t < T; ++t) {
    lambda = (theta + lambda >= c) ? 1.0 : 0.0;
    play.lambda.push_back(lambda);
  }
  return play;
}

int risk_dominant(double theta, const GameConfig& config) {
  return (config.a * theta >= config.c - 0.5 * config.b) ? 1 : 0;
}

}  // namespace icg
