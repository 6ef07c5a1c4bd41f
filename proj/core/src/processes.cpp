#include "icg/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "icg/normal.hpp"

namespace icg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw std::invalid_argument(std::string(name) +
                                " must be positive and finite");
  }
}

std::vector<double> precision_sequence(const LearningSpec& spec, std::size_t T) {
  std::vector<double> prec(T);
  if (const auto* p = std::get_if<PowerPrecision>(&spec)) {
    require_positive(p->coeff, "PowerPrecision coeff");
    if (p->exponent < 0.0) {
      throw std::invalid_argument("PowerPrecision exponent must be >= 0");
    }
    for (std::size_t t = 1; t <= T; ++t) {
      prec[t - 1] = p->coeff * std::pow(static_cast<double>(t), p->exponent);
    }
  } else if (const auto* g = std::get_if<GeometricPrecision>(&spec)) {
    require_positive(g->coeff, "GeometricPrecision coeff");
    if (!(g->ratio > 1.0)) {
      throw std::invalid_argument("GeometricPrecision ratio must exceed 1");
    }
    double v = g->coeff;
    for (std::size_t t = 1; t <= T; ++t) {
      v *= g->ratio;
      // Clamp once the precision leaves the representable range; the
      // posterior variance is then effectively zero.
      prec[t - 1] = std::min(v, std::numeric_limits<double>::max());
    }
  }
  return prec;
}

}  // namespace

PosteriorSchedule materialize(const LearningSpec& spec, std::size_t T) {
  if (T == 0) {
    throw std::invalid_argument("materialize: horizon must be positive");
  }
  if (const auto* i = std::get_if<IidSignals>(&spec)) {
    require_positive(i->sigma, "IidSignals sigma");
    return PosteriorSchedule::from_variances(
        std::vector<double>(T, i->sigma * i->sigma));
  }
  if (const auto* o = std::get_if<OneShotSignal>(&spec)) {
    require_positive(o->sigma, "OneShotSignal sigma");
    std::vector<double> v(T, kInf);
    v[0] = o->sigma * o->sigma;
    return PosteriorSchedule::from_variances(std::move(v));
  }
  if (const auto* s = std::get_if<SocialDoubling>(&spec)) {
    require_positive(s->sigma, "SocialDoubling sigma");
    // eta_t^{-2} = sigma^{-2} 2^{t-1}
    std::vector<double> prec(T);
    double v = 1.0 / (s->sigma * s->sigma);
    for (std::size_t t = 1; t <= T; ++t) {
      prec[t - 1] = v;
      v = std::min(2.0 * v, std::numeric_limits<double>::max());
    }
    return PosteriorSchedule::from_precisions(std::move(prec));
  }
  if (const auto* e = std::get_if<ExplicitVariances>(&spec)) {
    if (e->sigma2.size() < T) {
      throw std::length_error("materialize: explicit spec shorter than horizon");
    }
    return PosteriorSchedule::from_variances(
        std::vector<double>(e->sigma2.begin(), e->sigma2.begin() + T));
  }
  auto prec = precision_sequence(spec, T);
  for (std::size_t t = 2; t <= T; ++t) {
    if (prec[t - 1] < prec[t - 2]) {
      throw std::invalid_argument("materialize: precision decreases at t = " +
                                  std::to_string(t));
    }
  }
  return PosteriorSchedule::from_precisions(std::move(prec));
}

GrowthReport classify_growth(const PosteriorSchedule& schedule,
                             std::size_t first, std::size_t last,
                             double delta) {
  if (first < 1 || last > schedule.size() || first > last) {
    throw std::length_error("classify_growth: window exceeds schedule");
  }
  if (last - first + 1 < 8) {
    throw std::invalid_argument("classify_growth: window length must be >= 8");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("classify_growth: delta must be positive");
  }

  auto slope_on = [&](std::size_t lo, std::size_t hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t t = lo; t <= hi; ++t) {
      double p = schedule.precision(t);
      if (!std::isfinite(p)) continue;
      double x = std::log(static_cast<double>(t));
      double y = std::log(p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    double denom = n * sxx - sx * sx;
    return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  };

  GrowthReport report{};
  report.exponent = slope_on(first, last);
  std::size_t mid = first + (last - first) / 2;
  double slope_early = slope_on(first, mid);
  double slope_late = slope_on(mid, last);
  report.super_polynomial = (slope_late - slope_early) > 0.5;

  if (report.super_polynomial) {
    report.verdict = GrowthClass::SuperQuadratic;
  } else if (report.exponent <= 2.0 - delta) {
    report.verdict = GrowthClass::SubQuadratic;
  } else if (report.exponent >= 2.0 + delta) {
    report.verdict = GrowthClass::SuperQuadratic;
  } else {
    report.verdict = GrowthClass::Indeterminate;
  }
  return report;
}

double sufficient_precision_constant(double q, double lambda0) {
  if (!(q > 2.0)) {
    throw std::domain_error("sufficient_precision_constant: q must exceed 2");
  }
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) {
    throw std::domain_error("sufficient_precision_constant: lambda0 in (0,1)");
  }
  double r = 0.5 * q;
  // S = sum_{t >= 2} t^{-r}: partial sum with a midpoint integral tail.
  double S = 0.0;
  std::size_t t = 2;
  for (; t <= 200000; ++t) {
    double term = std::pow(static_cast<double>(t), -r);
    S += term;
    if (term < 1e-14 * S) {
      ++t;
      break;
    }
  }
  double M = static_cast<double>(t) - 0.5;
  S += std::pow(M, 1.0 - r) / (r - 1.0);

  double gamma1 = normal_quantile(lambda0);
  double L = std::pow(2.0, -q) / (std::pow(2.0, -q) + 1.0);
  double K = normal_pdf(gamma1) / (2.0 * S);
  K *= K;
  return 1.0 / (L * K);
}

ExplicitVariances reduce_past_play_signals(const PastPlaySpec& spec,
                                           std::size_t T) {
  if (spec.sigma2.size() < T || (T >= 2 && spec.tau2.size() < T - 1)) {
    throw std::length_error("reduce_past_play_signals: spec shorter than horizon");
  }
  if (T == 0) return {};
  for (double v : spec.sigma2) {
    if (std::isnan(v) || v <= 0.0) {
      throw std::invalid_argument("PastPlaySpec: sigma2 entries in (0, +inf]");
    }
  }
  for (double v : spec.tau2) {
    if (std::isnan(v) || v <= 0.0) {
      throw std::invalid_argument("PastPlaySpec: tau2 entries in (0, +inf]");
    }
  }
  if (std::isinf(spec.sigma2[0])) {
    throw std::invalid_argument("PastPlaySpec: first period must be informative");
  }

  ExplicitVariances out;
  out.sigma2.reserve(T);
  double prec = 1.0 / spec.sigma2[0];
  out.sigma2.push_back(spec.sigma2[0]);
  for (std::size_t t = 2; t <= T; ++t) {
    double inv_tau2 = std::isinf(spec.tau2[t - 2]) ? 0.0 : 1.0 / spec.tau2[t - 2];
    double inv_sig2 = std::isinf(spec.sigma2[t - 1]) ? 0.0 : 1.0 / spec.sigma2[t - 1];
    double next = prec * (1.0 + inv_tau2) + inv_sig2;
    double inc = next - prec;
    out.sigma2.push_back(inc > 0.0 ? 1.0 / inc : kInf);
    prec = next;
  }
  return out;
}

PosteriorSchedule refine_time_grid(const LearningSpec& spec, std::size_t n,
                                   std::size_t T) {
  if (n == 0) {
    throw std::invalid_argument("refine_time_grid: n must be >= 1");
  }
  PosteriorSchedule base = materialize(spec, T);
  if (n == 1) return base;
  // Build cumulative precisions directly so integer-time anchors reproduce
  // the base schedule bit for bit: the j-th sub-period inside period s sits
  // at prec_{s-1} + j/n of the period's increment, with j = n taking the
  // full increment exactly.
  std::vector<double> prec;
  prec.reserve(n * T);
  double prev = 0.0;
  for (std::size_t s = 1; s <= T; ++s) {
    double inc = base.precision(s) - prev;
    for (std::size_t j = 1; j < n; ++j) {
      prec.push_back(prev + inc * static_cast<double>(j) / static_cast<double>(n));
    }
    prec.push_back(base.precision(s));
    prev = base.precision(s);
  }
  return PosteriorSchedule::from_precisions(std::move(prec));
}

std::pair<GameConfig, LearningSpec> rescale_payoffs(const GameConfig& config,
                                                    const LearningSpec& spec) {
  double ratio = config.a / config.b;       // sigma scale
  double var_scale = ratio * ratio;         // sigma^2 scale
  GameConfig normalized(config.c / config.b, config.lambda0);

  LearningSpec out = spec;
  if (auto* i = std::get_if<IidSignals>(&out)) {
    i->sigma *= ratio;
  } else if (auto* o = std::get_if<OneShotSignal>(&out)) {
    o->sigma *= ratio;
  } else if (auto* s = std::get_if<SocialDoubling>(&out)) {
    s->sigma *= ratio;
  } else if (auto* p = std::get_if<PowerPrecision>(&out)) {
    p->coeff /= var_scale;
  } else if (auto* g = std::get_if<GeometricPrecision>(&out)) {
    g->coeff /= var_scale;
  } else if (auto* e = std::get_if<ExplicitVariances>(&out)) {
    for (double& v : e->sigma2) v *= var_scale;
  }
  return {normalized, out};
}

}  // namespace icg
