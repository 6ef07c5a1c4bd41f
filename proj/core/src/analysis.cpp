#include "icg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "icg/normal.hpp"

namespace icg {

namespace {

constexpr double kFrozenScale = 1e-13;
constexpr std::size_t kFrozenRun = 50;

LimitReport limit_on_schedule(const GameConfig& config,
                              const PosteriorSchedule& schedule, double tol,
                              std::size_t T_max) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("limit_threshold: tol must be positive");
  }
  LimitReport report;
  double g = normal_quantile(config.lambda0);
  report.periods_used = 1;
  report.converged = std::abs(g) < tol;

  std::size_t frozen_run = 0;
  std::size_t last = std::min(T_max, schedule.size());
  for (std::size_t t = 2; t <= last && !report.converged; ++t) {
    double A = schedule.step_scale(t);
    double prev = g;
    g = gamma_step(g, A);
    report.periods_used = t;
    report.last_step = std::abs(g - prev);
    if (std::abs(g) < tol) {
      report.converged = true;
      break;
    }
    // Frozen limit: steps are below machine-meaningful size while gamma
    // stalls well away from zero.
    if (A < kFrozenScale * std::max(1.0, std::abs(g)) &&
        report.last_step < tol * 1e-3 && std::abs(g) > 10.0 * tol) {
      if (++frozen_run >= kFrozenRun) {
        report.converged = true;
        report.frozen = true;
        break;
      }
    } else {
      frozen_run = 0;
    }
  }
  report.gamma_inf = g;
  report.mu_inf = config.c - normal_cdf(g);
  return report;
}

double gap_at_horizon(double c, double lambda0, const PosteriorSchedule& schedule,
                      std::size_t T) {
  GameConfig config(c, lambda0);
  ThresholdPath path = threshold_path(config, schedule, T);
  return std::abs(path.mu_star.back() - (c - 0.5));
}

LearningSpec scale_variances(const LearningSpec& spec, double factor) {
  double sd = std::sqrt(factor);
  LearningSpec out = spec;
  if (auto* i = std::get_if<IidSignals>(&out)) {
    i->sigma *= sd;
  } else if (auto* o = std::get_if<OneShotSignal>(&out)) {
    o->sigma *= sd;
  } else if (auto* s = std::get_if<SocialDoubling>(&out)) {
    s->sigma *= sd;
  } else if (auto* p = std::get_if<PowerPrecision>(&out)) {
    p->coeff /= factor;
  } else if (auto* g = std::get_if<GeometricPrecision>(&out)) {
    g->coeff /= factor;
  } else if (auto* e = std::get_if<ExplicitVariances>(&out)) {
    for (double& v : e->sigma2) v *= factor;
  }
  return out;
}

// Best-response cutoff b(x): the mu in [c-1, c] solving
// mu + Phi((mu - x) / A) = c. The slope in mu is at least 1, so a Newton
// step safeguarded by bisection converges quickly.
double response_cutoff(double x, double A, double c) {
  double lo = c - 1.0;
  double hi = c;
  double mu = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    double z = (mu - x) / A;
    double g = mu + normal_cdf(z) - c;
    if (std::abs(g) <= 1e-14) return mu;
    if (g > 0.0) {
      hi = mu;
    } else {
      lo = mu;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(mu))) {
      return mu;
    }
    double next = mu - g / (1.0 + normal_pdf(z) / A);
    mu = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return mu;
}

}  // namespace

LimitReport limit_threshold(const GameConfig& config, const LearningSpec& spec,
                            double tol, std::size_t T_max) {
  if (T_max == 0) {
    throw std::invalid_argument("limit_threshold: T_max must be positive");
  }
  return limit_on_schedule(config, materialize(spec, T_max), tol, T_max);
}

int limit_play(double theta, const LimitReport& report) {
  if (!report.converged) {
    throw std::runtime_error(
        "limit_play: limit threshold did not converge; rerun with a larger "
        "horizon or looser tolerance");
  }
  return theta >= report.mu_inf ? 1 : 0;
}

std::size_t crossing_time(const GameConfig& config, double sigma, double theta) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("crossing_time: sigma must be positive and finite");
  }
  double lo = std::min(config.c - config.lambda0, config.c - 0.5);
  double hi = std::max(config.c - config.lambda0, config.c - 0.5);
  if (!(theta > lo && theta < hi)) {
    throw std::domain_error(
        "crossing_time: theta must lie strictly between c - lambda0 and "
        "c - 1/2");
  }
  // Direction of threshold motion: toward c - 1/2 from c - lambda0.
  double dir = config.lambda0 > 0.5 ? 1.0 : -1.0;
  double mu = config.c - config.lambda0;
  for (std::size_t t = 1; t <= 10000000; ++t) {
    double s = static_cast<double>(t + 1);
    double A = sigma * std::sqrt(1.0 / s + 1.0 / (s - 1.0));
    double next = threshold_step(mu, A, config.c);
    if (dir * (next - theta) > 0.0) return t;
    mu = next;
  }
  throw std::runtime_error("crossing_time: no crossing within 1e7 periods");
}

TransitionReport detect_transition(const PlayPath& play, double theta,
                                   const GameConfig& config, double epsilon,
                                   double alpha, double beta,
                                   double iid_sigma) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::domain_error("detect_transition: epsilon must lie in (0, 1/2)");
  }
  double beta_bar = 1.0 + 0.5 * std::abs(config.c - 0.5 - theta);
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 1.0 && beta < beta_bar)) {
    throw std::domain_error(
        "detect_transition: need 0 < alpha < 1 < beta < beta_bar");
  }
  if (play.size() < 2) {
    throw std::invalid_argument("detect_transition: path too short");
  }

  int rd = risk_dominant(theta, config);
  double rd_level = static_cast<double>(rd);
  double nrd_level = 1.0 - rd_level;

  TransitionReport report;
  report.epsilon = epsilon;
  report.alpha = alpha;
  report.beta = beta;
  report.beta_bar = beta_bar;
  report.analytic_step_bound =
      iid_sigma > 0.0
          ? ((std::sqrt(2.0) - 1.0) * (std::abs(theta) + config.c) +
             std::sqrt(2.0)) /
                (std::sqrt(2.0 * 3.14159265358979323846) * iid_sigma)
          : std::numeric_limits<double>::quiet_NaN();

  // Last period still on the non-risk-dominant side; theta >= mu*_t exactly
  // when lambda_t >= 1/2.
  std::size_t T = play.size();
  std::size_t cross = T;
  for (std::size_t t = 1; t <= T; ++t) {
    bool risky_side = play.lambda[t - 1] >= 0.5;
    if (risky_side == (rd == 1)) {
      cross = t - 1;
      break;
    }
  }
  report.T_cross = cross;

  report.first_step = std::abs(play.lambda[1] - play.lambda[0]);
  for (std::size_t t = 2; t + 1 <= T; ++t) {
    report.max_step = std::max(
        report.max_step, std::abs(play.lambda[t] - play.lambda[t - 1]));
  }

  bool sudden = cross >= 1;
  std::size_t early_end = static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(cross)));
  std::size_t late_begin = static_cast<std::size_t>(
      std::ceil(beta * static_cast<double>(cross)));
  if (late_begin > T) sudden = false;
  for (std::size_t t = 1; sudden && t <= early_end; ++t) {
    sudden = std::abs(play.lambda[t - 1] - nrd_level) < epsilon;
  }
  for (std::size_t t = std::max<std::size_t>(late_begin, 1); sudden && t <= T;
       ++t) {
    sudden = std::abs(play.lambda[t - 1] - rd_level) < epsilon;
  }

  if (sudden) {
    report.regime = Transition::Sudden;
  } else if (report.max_step < epsilon) {
    report.regime = Transition::Gradual;
  } else {
    report.regime = Transition::Mixed;
  }
  return report;
}

std::vector<CsViolation> comparative_statics_harness(
    const std::vector<CsInstance>& instances, std::size_t T, double slack) {
  if (T < 2) {
    throw std::invalid_argument("comparative_statics_harness: T must be >= 2");
  }
  std::vector<CsViolation> violations;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const CsInstance& inst = instances[k];
    double smaller = 0.0;
    double larger = 0.0;
    switch (inst.clause) {
      case CsClause::InitialPlay: {
        double la = inst.lambda0_a;
        double lb = inst.lambda0_b;
        if (!(la > 0.0 && la < 1.0 && lb > 0.0 && lb < 1.0)) {
          throw std::invalid_argument(
              "comparative_statics_harness: lambda0 pair out of range");
        }
        if (std::abs(la - 0.5) > std::abs(lb - 0.5)) std::swap(la, lb);
        PosteriorSchedule schedule = materialize(inst.spec, T);
        smaller = gap_at_horizon(inst.config.c, la, schedule, T);
        larger = gap_at_horizon(inst.config.c, lb, schedule, T);
        break;
      }
      case CsClause::LearningSpeed: {
        if (!(inst.var_scale >= 1.0)) {
          throw std::invalid_argument(
              "comparative_statics_harness: var_scale must be >= 1");
        }
        PosteriorSchedule fast = materialize(inst.spec, T);
        PosteriorSchedule slow =
            materialize(scale_variances(inst.spec, inst.var_scale), T);
        smaller = gap_at_horizon(inst.config.c, inst.config.lambda0, slow, T);
        larger = gap_at_horizon(inst.config.c, inst.config.lambda0, fast, T);
        break;
      }
      case CsClause::EarlySwap: {
        if (inst.s_early < 1 || inst.s_early >= inst.s_late ||
            inst.s_late > T) {
          throw std::invalid_argument(
              "comparative_statics_harness: swap positions out of range");
        }
        std::vector<double> vars = materialize(inst.spec, T).variances();
        if (!(vars[inst.s_early - 1] <= vars[inst.s_late - 1])) {
          throw std::invalid_argument(
              "comparative_statics_harness: base must carry the precise "
              "signal early");
        }
        PosteriorSchedule front = PosteriorSchedule::from_variances(vars);
        std::swap(vars[inst.s_early - 1], vars[inst.s_late - 1]);
        PosteriorSchedule swapped = PosteriorSchedule::from_variances(vars);
        smaller =
            gap_at_horizon(inst.config.c, inst.config.lambda0, swapped, T);
        larger = gap_at_horizon(inst.config.c, inst.config.lambda0, front, T);
        break;
      }
    }
    if (smaller > larger + slack) {
      violations.push_back({k, smaller, larger});
    }
  }
  return violations;
}

bool prefix_irrelevance_check(const GameConfig& config, const LearningSpec& spec,
                              const std::vector<double>& prefix_sigma2,
                              double tol, std::size_t T_max) {
  if (prefix_sigma2.size() > T_max) {
    throw std::invalid_argument(
        "prefix_irrelevance_check: prefix longer than horizon");
  }
  std::vector<double> vars = materialize(spec, T_max).variances();
  std::copy(prefix_sigma2.begin(), prefix_sigma2.end(), vars.begin());
  // Leading uninformative periods only delay identical dynamics.
  std::size_t skip = 0;
  while (skip < vars.size() && std::isinf(vars[skip])) ++skip;
  if (skip == vars.size()) return false;
  vars.erase(vars.begin(), vars.begin() + static_cast<std::ptrdiff_t>(skip));
  PosteriorSchedule schedule = PosteriorSchedule::from_variances(vars);
  LimitReport report =
      limit_on_schedule(config, schedule, 0.5 * tol, schedule.size());
  return report.converged &&
         std::abs(report.mu_inf - (config.c - 0.5)) <= tol;
}

PhaseDiagram phase_diagram(const LearningSpec& spec, double c,
                           const std::vector<double>& lambda0_grid,
                           const std::vector<double>& theta_grid,
                           std::size_t T_max) {
  if (lambda0_grid.empty() || theta_grid.empty()) {
    throw std::invalid_argument("phase_diagram: grids must be non-empty");
  }
  PhaseDiagram out;
  out.cells.reserve(lambda0_grid.size() * theta_grid.size());
  out.boundary.reserve(lambda0_grid.size());
  for (double lambda0 : lambda0_grid) {
    GameConfig config(c, lambda0);
    LimitReport report = limit_threshold(config, spec, 1e-6, T_max);
    out.boundary.emplace_back(lambda0, report.mu_inf);
    for (double theta : theta_grid) {
      out.cells.push_back(
          {lambda0, theta, theta >= report.mu_inf ? 1 : 0, report.mu_inf});
    }
  }
  return out;
}

IdsdsCutoffs idsds_contemporaneous_cutoffs(double eta, double c,
                                           std::size_t k_max) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument(
        "idsds_contemporaneous_cutoffs: eta must be positive and finite");
  }
  double A = std::sqrt(2.0) * eta;
  IdsdsCutoffs out;
  out.upper.push_back(c);
  out.lower.push_back(c - 1.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.upper.push_back(response_cutoff(out.upper.back(), A, c));
    out.lower.push_back(response_cutoff(out.lower.back(), A, c));
    if (out.upper.back() - out.lower.back() < 1e-10) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::pair<double, double> gamma_tail_probe(const GameConfig& config,
                                           const LearningSpec& spec,
                                           std::size_t T, std::size_t lag) {
  if (T < 2 || lag >= T) {
    throw std::invalid_argument("gamma_tail_probe: need lag < T, T >= 2");
  }
  // Materialized head: validates the spec and keeps early periods
  // bit-identical with schedule-based runs. The tail is generated
  // analytically so T is not bounded by memory.
  std::size_t head = std::min<std::size_t>(T, 4096);
  PosteriorSchedule schedule = materialize(spec, head);

  double gamma1 = normal_quantile(config.lambda0);
  double sign = gamma1 < 0.0 ? -1.0 : 1.0;
  double g = std::abs(gamma1);
  double at_lag = g;
  if (g == 0.0) return {0.0, 0.0};

  enum class Kind { Iid, OneShot, Doubling, Power, Geometric, Explicit };
  Kind kind = Kind::Explicit;
  double s2 = 0.0, coeff = 0.0, expo = 0.0, ratio = 0.0;
  if (const auto* i = std::get_if<IidSignals>(&spec)) {
    kind = Kind::Iid;
    s2 = i->sigma * i->sigma;
  } else if (const auto* o = std::get_if<OneShotSignal>(&spec)) {
    kind = Kind::OneShot;
    s2 = o->sigma * o->sigma;
  } else if (std::get_if<SocialDoubling>(&spec)) {
    kind = Kind::Doubling;
  } else if (const auto* p = std::get_if<PowerPrecision>(&spec)) {
    kind = Kind::Power;
    coeff = p->coeff;
    expo = p->exponent;
  } else if (const auto* ge = std::get_if<GeometricPrecision>(&spec)) {
    kind = Kind::Geometric;
    coeff = ge->coeff;
    ratio = ge->ratio;
  } else if (T > schedule.size()) {
    throw std::length_error("gamma_tail_probe: explicit spec shorter than T");
  }
  int ipow = static_cast<int>(expo);
  bool integral_p = expo == static_cast<double>(ipow) && ipow <= 16;
  double prec = schedule.precision(head);  // doubling / geometric state
  double prev_eta2 = schedule.eta2(1);
  constexpr double kMaxPrec = std::numeric_limits<double>::max();
  constexpr double kFastPath = 1e-6;

  double pdf_cache = normal_pdf(g);
  double pdf_at = g;
  for (std::size_t t = 2; t <= T; ++t) {
    double A;
    if (t <= head) {
      A = schedule.step_scale(t);
      prev_eta2 = schedule.eta2(t);
    } else {
      double eta2;
      switch (kind) {
        case Kind::Iid:
          eta2 = s2 / static_cast<double>(t);
          break;
        case Kind::OneShot:
          eta2 = s2;
          break;
        case Kind::Doubling:
          prec = std::min(2.0 * prec, kMaxPrec);
          eta2 = 1.0 / prec;
          break;
        case Kind::Power: {
          double td = static_cast<double>(t);
          double tp;
          if (integral_p) {
            tp = 1.0;
            for (int k = 0; k < ipow; ++k) tp *= td;
          } else {
            tp = std::pow(td, expo);
          }
          eta2 = 1.0 / std::min(coeff * tp, kMaxPrec);
          break;
        }
        case Kind::Geometric:
          prec = std::min(prec * ratio, kMaxPrec);
          eta2 = 1.0 / prec;
          break;
        default:
          eta2 = prev_eta2;  // unreachable
      }
      A = std::sqrt(eta2 + prev_eta2);
      prev_eta2 = eta2;
    }

    if (std::abs(g - pdf_at) > 1e-9) {
      pdf_cache = normal_pdf(g);
      pdf_at = g;
    }
    double delta = A * g / (A + pdf_cache);
    if (delta < kFastPath) {
      if (delta < 0.25 * std::numeric_limits<double>::epsilon() * g) {
        // Frozen for good: A is non-increasing, so no later step moves gamma.
        if (t <= T - lag) at_lag = g;
        break;
      }
      g -= delta;
    } else {
      g = gamma_step(g, A);
    }
    if (t == T - lag) at_lag = g;
  }
  return {sign * at_lag, sign * g};
}

}  // namespace icg
