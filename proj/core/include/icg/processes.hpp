#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "icg/kernel.hpp"

namespace icg {

// Canonical learning processes. Precision-specified variants give the
// cumulative posterior precision eta_t^{-2} directly; the per-period signal
// variances are recovered from its increments.
struct IidSignals {
  double sigma;  // sigma_t = sigma for all t
};
struct OneShotSignal {
  double sigma;  // informative only at t = 1
};
struct SocialDoubling {
  double sigma;  // sigma_1 = sigma, sigma_t = eta_{t-1}: precisions double
};
struct PowerPrecision {
  double coeff;     // eta_t^{-2} = coeff * t^exponent
  double exponent;  // >= 0
};
struct GeometricPrecision {
  double coeff;  // eta_t^{-2} = coeff * ratio^t
  double ratio;  // > 1
};
struct ExplicitVariances {
  std::vector<double> sigma2;  // entries in (0, +inf]
};

using LearningSpec = std::variant<IidSignals, OneShotSignal, SocialDoubling,
                                  PowerPrecision, GeometricPrecision,
                                  ExplicitVariances>;

// State-signal variances plus past-play-signal variances tau_t^2 (t >= 2).
struct PastPlaySpec {
  std::vector<double> sigma2;
  std::vector<double> tau2;  // tau2[k] applies at period k + 2
};

// Realizes a spec over periods 1..T. Throws std::invalid_argument when a
// precision-specified variant decreases, naming the offending period.
PosteriorSchedule materialize(const LearningSpec& spec, std::size_t T);

enum class GrowthClass { SubQuadratic, SuperQuadratic, Indeterminate };

struct GrowthReport {
  GrowthClass verdict;
  double exponent;        // fitted log-log slope (tail window)
  bool super_polynomial;  // slope keeps rising across half-windows
};

// Least-squares slope of log eta_t^{-2} against log t over [first, last]
// (1-based, inclusive). Geometric growth is flagged super-polynomial and
// reported SuperQuadratic.
GrowthReport classify_growth(const PosteriorSchedule& schedule,
                             std::size_t first, std::size_t last, double delta);

// Lower precision-growth constant from the fast-learning sufficiency bound:
// any schedule with eta_t^{-2} >= C * t^q keeps the limit threshold away from
// risk dominance. Requires q > 2.
double sufficient_precision_constant(double q, double lambda0);

// Collapses state + past-play signals into an equivalent state-signal-only
// process via eta_t^{-2} = eta_{t-1}^{-2} (1 + tau_t^{-2}) + sigma_t^{-2}.
ExplicitVariances reduce_past_play_signals(const PastPlaySpec& spec,
                                           std::size_t T);

// Refines the time grid to n sub-periods per unit interval; precision accrues
// in n equal increments and matches the unrefined schedule exactly at integer
// times. Entry k of the result is sub-period time (k + 1) / n.
PosteriorSchedule refine_time_grid(const LearningSpec& spec, std::size_t n,
                                   std::size_t T);

// Index (1-based, into the refined schedule) of integer time s.
inline std::size_t refined_index(std::size_t s, std::size_t n) { return s * n; }

// Normalizes (a, b) payoff scales to (1, 1): c -> c/b and all signal
// variances scale by (a/b)^2. Simulating the normalized system at
// theta_tilde = (a/b) * theta reproduces the original play paths.
std::pair<GameConfig, LearningSpec> rescale_payoffs(const GameConfig& config,
                                                    const LearningSpec& spec);

inline double rescale_theta(double theta, const GameConfig& config) {
  return config.a / config.b * theta;
}

}  // namespace icg
