#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "icg/kernel.hpp"
#include "icg/processes.hpp"

namespace icg {

struct LimitReport {
  double mu_inf = 0.0;
  double gamma_inf = 0.0;
  bool converged = false;
  bool frozen = false;  // converged by vanishing steps away from gamma = 0
  std::size_t periods_used = 0;
  double last_step = 0.0;  // |gamma_T - gamma_{T-1}|
};

// Iterates the gamma recursion until |gamma| < tol (the risk-dominance
// attractor), or the step scales fall below machine-meaningful size while
// gamma stalls away from zero (frozen limit), or T_max.
LimitReport limit_threshold(const GameConfig& config, const LearningSpec& spec,
                            double tol, std::size_t T_max);

// 1{theta >= mu_inf}. Refuses unconverged reports.
int limit_play(double theta, const LimitReport& report);

// T(sigma) for iid noise: the last period whose threshold is still on the
// initial-play side of theta. Requires theta strictly between c - lambda0 and
// c - 1/2.
std::size_t crossing_time(const GameConfig& config, double sigma, double theta);

enum class Transition { Sudden, Gradual, Mixed };

struct TransitionReport {
  std::size_t T_cross = 0;
  // Largest per-period change from period 2 on. The period-1 to period-2
  // change reflects the initial shock working through the first posterior and
  // is reported separately as first_step.
  double max_step = 0.0;
  double first_step = 0.0;
  Transition regime = Transition::Mixed;
  double epsilon = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double beta_bar = 0.0;
  double analytic_step_bound = 0.0;  // NaN unless an iid sigma was supplied
};

// Classifies a play path: Sudden when play sits near NRD(theta) before
// alpha*T_cross and near RD(theta) from beta*T_cross on, Gradual when every
// step is below epsilon, Mixed otherwise. Pass the iid sigma to report the
// analytic per-step bound, 0 to skip it.
TransitionReport detect_transition(const PlayPath& play, double theta,
                                   const GameConfig& config, double epsilon,
                                   double alpha, double beta,
                                   double iid_sigma = 0.0);

enum class CsClause { InitialPlay, LearningSpeed, EarlySwap };

// One comparative-statics check. The compared pair depends on the clause:
//   InitialPlay: lambda0_a at least as extreme as lambda0_b is not required;
//     the harness orders them itself by |lambda0 - 1/2|.
//   LearningSpeed: the alternative scales every signal variance by var_scale
//     (> 1 slows learning down).
//   EarlySwap: the alternative swaps periods s_early and s_late; the base must
//     carry the more precise signal at s_early.
struct CsInstance {
  CsClause clause = CsClause::InitialPlay;
  GameConfig config{1.0, 0.5};
  LearningSpec spec;
  double lambda0_a = 0.0;
  double lambda0_b = 0.0;
  double var_scale = 1.0;
  std::size_t s_early = 0;
  std::size_t s_late = 0;
};

struct CsViolation {
  std::size_t index;
  double gap_expected_smaller;
  double gap_expected_larger;
};

// Runs every instance at horizon T and reports ordering violations beyond
// `slack` on the distance |mu*_T - (c - 1/2)|. Expected empty.
std::vector<CsViolation> comparative_statics_harness(
    const std::vector<CsInstance>& instances, std::size_t T, double slack);

// Replaces the first prefix periods of a sub-quadratic spec with arbitrary
// variances and checks the limit still lands at c - 1/2 within tol.
bool prefix_irrelevance_check(const GameConfig& config, const LearningSpec& spec,
                              const std::vector<double>& prefix_sigma2,
                              double tol, std::size_t T_max);

struct PhaseCell {
  double lambda0;
  double theta;
  int limit_action;
  double mu_inf;
};

struct PhaseDiagram {
  std::vector<PhaseCell> cells;
  // Boundary curve theta_hat(lambda0) = mu*_inf, one point per lambda0.
  std::vector<std::pair<double, double>> boundary;
};

PhaseDiagram phase_diagram(const LearningSpec& spec, double c,
                           const std::vector<double>& lambda0_grid,
                           const std::vector<double>& theta_grid,
                           std::size_t T_max);

struct IdsdsCutoffs {
  std::vector<double> upper;  // b^k(c), k = 0, 1, ...
  std::vector<double> lower;  // b^k(c - 1)
  bool converged = false;
};

// Contemporaneous-incentive benchmark: iterates the best-response cutoff
// b(x) solving mu + Phi((mu - x) / (sqrt(2) eta)) = c from both dominance
// ends until the sandwich closes below 1e-10 or k_max.
IdsdsCutoffs idsds_contemporaneous_cutoffs(double eta, double c,
                                           std::size_t k_max);

// Streams the gamma recursion to horizon T without materializing the
// schedule (analytic variants only; Explicit requires T within its length).
// Once steps are below 1e-6 a guarded Newton update replaces the full solve;
// it meets the same 1e-12 residual contract. Returns (gamma_{T-lag}, gamma_T).
std::pair<double, double> gamma_tail_probe(const GameConfig& config,
                                           const LearningSpec& spec,
                                           std::size_t T, std::size_t lag);

}  // namespace icg
