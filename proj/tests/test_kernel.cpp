#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "icg/kernel.hpp"
#include "icg/normal.hpp"
#include "icg/processes.hpp"

using namespace icg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent oracle: plain bisection on mu + Phi((mu - mu_prev)/A) = c over
// the raw mu bracket (c-1, c). No Newton, no normalization; slow but simple.
double threshold_step_oracle(double mu_prev, double A, double c) {
  double lo = c - 1.0, hi = c;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double g = mid + normal_cdf((mid - mu_prev) / A) - c;
    (g > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Independent gamma recursion: solve A*g + Phi(g) = Phi(g_prev) by bisection
// on [0, g_prev] (positive branch).
double gamma_step_oracle(double gamma_prev, double A) {
  double target = normal_cdf(gamma_prev);
  double lo = 0.0, hi = gamma_prev;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double g = A * mid + normal_cdf(mid) - target;
    (g > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<PosteriorSchedule> corpus(std::size_t T) {
  std::vector<PosteriorSchedule> out;
  out.push_back(materialize(IidSignals{1.0}, T));
  out.push_back(materialize(IidSignals{0.1}, T));
  out.push_back(materialize(OneShotSignal{0.5}, T));
  out.push_back(materialize(SocialDoubling{0.05}, T));
  out.push_back(materialize(PowerPrecision{1.0, 0.5}, T));
  out.push_back(materialize(PowerPrecision{1.0, 1.5}, T));
  out.push_back(materialize(GeometricPrecision{1.0, 2.0}, std::min<std::size_t>(T, 60)));
  return out;
}

}  // namespace

TEST_CASE("steady state is a fixed point across step scales") {
  for (double c : {1.0, 0.3, 2.5}) {
    for (double A : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
      CHECK(threshold_step(c - 0.5, A, c) == doctest::Approx(c - 0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("threshold_step matches an independent mu-space bisection") {
  for (double mu_prev : {0.25, 0.4, 0.5, 0.75, 0.05, 0.95}) {
    for (double A : {0.05, 0.3, 1.0, 7.0}) {
      double got = threshold_step(mu_prev, A, 1.0);
      double want = threshold_step_oracle(mu_prev, A, 1.0);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("threshold_step limits in A") {
  // Huge A: the implicit equation forces Phi(gamma) -> 1/2, so one step
  // lands essentially at the steady state c - 1/2.
  CHECK(threshold_step(0.25, 1e6, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
  // Tiny A: mu moves by about A * Phi^{-1}(c - mu_prev).
  double expect = 0.25 + 1e-9 * normal_quantile(0.75);
  CHECK(threshold_step(0.25, 1e-9, 1.0) == doctest::Approx(expect).epsilon(1e-9));
  CHECK_THROWS_AS(threshold_step(0.25, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(threshold_step(0.25, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(threshold_step(1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(threshold_step(0.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("gamma_step sign, contraction and oracle agreement") {
  for (double x : {0.05, 0.3, 0.6745, 1.5, 3.0}) {
    for (double A : {0.01, 0.1, 1.0, 10.0}) {
      double g = gamma_step(x, A);
      CHECK(g > 0.0);
      CHECK(g <= x);
      CHECK(g == doctest::Approx(gamma_step_oracle(x, A)).epsilon(1e-10));
      CHECK(gamma_step(-x, A) == doctest::Approx(-g).epsilon(1e-12));
    }
  }
  CHECK(gamma_step(0.0, 1.0) == 0.0);
}

TEST_CASE("F_A monotone: decreasing in A, increasing in x") {
  for (double x : {0.2, 0.6745, 2.0}) {
    double prev = gamma_step(x, 1e-4);
    for (double A : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}) {
      double cur = gamma_step(x, A);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  for (double A : {0.05, 1.0, 20.0}) {
    double prev = gamma_step(0.1, A);
    for (double x : {0.3, 0.8, 1.5, 2.5}) {
      double cur = gamma_step(x, A);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("paths: monotone approach, shrinking steps, residuals, cross-identity") {
  const std::size_t T = 200;
  for (double lambda0 : {0.2, 0.75}) {
    GameConfig config(1.0, lambda0);
    for (const auto& schedule : corpus(T)) {
      std::size_t horizon = schedule.size();
      ThresholdPath path = threshold_path(config, schedule, horizon);
      double bound = config.c - 0.5;
      for (std::size_t t = 2; t <= horizon; ++t) {
        double step = path.mu_star[t - 1] - path.mu_star[t - 2];
        if (lambda0 > 0.5) {
          CHECK(step >= 0.0);
          CHECK(path.mu_star[t - 1] <= bound + 1e-12);
        } else {
          CHECK(step <= 0.0);
          CHECK(path.mu_star[t - 1] >= bound - 1e-12);
        }
        CHECK(path.residual[t - 1] <= 1e-12);
        double A = schedule.step_scale(t);
        CHECK(std::abs(step - A * path.gamma[t - 1]) <= 1e-10);
        if (t >= 3) {
          double prev_step = path.mu_star[t - 2] - path.mu_star[t - 3];
          CHECK(std::abs(step) <= std::abs(prev_step) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("reflection: paths for lambda0 and 1 - lambda0 mirror about c - 1/2") {
  const std::size_t T = 120;
  for (const auto& schedule : corpus(T)) {
    std::size_t horizon = schedule.size();
    ThresholdPath up = threshold_path(GameConfig(1.0, 0.75), schedule, horizon);
    ThresholdPath dn = threshold_path(GameConfig(1.0, 0.25), schedule, horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
      CHECK(std::abs(dn.mu_star[k] - (1.0 - up.mu_star[k])) <= 1e-10);
    }
  }
}

TEST_CASE("threshold_path cross-checks the standalone gamma recursion") {
  PosteriorSchedule schedule = materialize(IidSignals{1.0}, 150);
  GameConfig config(1.0, 0.75);
  ThresholdPath path = threshold_path(config, schedule, 150);
  double g = normal_quantile(0.75);
  for (std::size_t t = 2; t <= 150; ++t) {
    g = gamma_step(g, schedule.step_scale(t));
    CHECK(std::abs(path.gamma[t - 1] - g) <= 1e-10);
  }
}

TEST_CASE("aggregate_play values and the slow-learning run to the safe action") {
  PosteriorSchedule schedule = materialize(IidSignals{1.0}, 10000);
  GameConfig config(1.0, 0.75);
  ThresholdPath path = threshold_path(config, schedule, 10000);
  // theta equal to a threshold gives exactly Phi(0).
  PlayPath at_cutoff = aggregate_play(path.mu_star[4], path, schedule);
  CHECK(at_cutoff.lambda[4] == doctest::Approx(0.5).epsilon(1e-14));
  PlayPath play = aggregate_play(0.4, path, schedule);
  for (double v : play.lambda) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(play.lambda.back() < 0.01);
}

TEST_CASE("complete information dynamics and tie convention") {
  PlayPath up = simulate_complete_info(0.4, 0.75, 1.0, 12);
  for (double v : up.lambda) CHECK(v == 1.0);
  PlayPath down = simulate_complete_info(0.4, 0.5, 1.0, 12);
  for (double v : down.lambda) CHECK(v == 0.0);
  PlayPath tie = simulate_complete_info(0.25, 0.75, 1.0, 12);
  for (double v : tie.lambda) CHECK(v == 1.0);
}

TEST_CASE("risk dominance indicator, including payoff scales") {
  GameConfig unit(1.0, 0.5);
  CHECK(risk_dominant(0.4, unit) == 0);
  CHECK(risk_dominant(0.6, unit) == 1);
  CHECK(risk_dominant(0.5, unit) == 1);  // weak inequality at the boundary
  GameConfig scaled(1.0, 0.5, 0.5, 0.5);
  CHECK(scaled.risk_dominance_threshold() == doctest::Approx(1.5));
  CHECK(risk_dominant(0.9, scaled) == 0);
  CHECK(risk_dominant(1.6, scaled) == 1);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(GameConfig(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GameConfig(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GameConfig(1.0, 0.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PosteriorSchedule::from_variances({1.0, -2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PosteriorSchedule::from_variances({0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PosteriorSchedule::from_variances({kInf, 1.0}),
                  std::invalid_argument);  // first period uninformative
  CHECK_THROWS_AS(PosteriorSchedule::from_precisions({2.0, 1.0}),
                  std::invalid_argument);
  PosteriorSchedule ok = PosteriorSchedule::from_variances({1.0, kInf, 0.5});
  CHECK(ok.precision(2) == 1.0);
  CHECK(ok.eta2(3) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ok.step_scale(1), std::out_of_range);
  CHECK_THROWS_AS(ok.step_scale(4), std::out_of_range);
  GameConfig config(1.0, 0.75);
  CHECK_THROWS_AS(threshold_path(config, ok, 4), std::length_error);
}
