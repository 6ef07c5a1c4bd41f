#include "icg/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "icg/normal.hpp"
#include "icg/processes.hpp"

namespace icg {

namespace {

constexpr double kTruncateA = 1e-16;
constexpr double kGamma2Width = 1e-14;
constexpr double kSlackTol = 1e-10;
constexpr double kSigmaClip = 1e-12;

// Phi(b) - Phi(a) for a <= b. Direct subtraction loses most digits once the
// gap shrinks, so narrow gaps integrate the density with Simpson's rule
// (relative error ~ (b-a)^4).
double cdf_gap(double a, double b) {
  double d = b - a;
  if (d >= 1e-3) return normal_cdf(b) - normal_cdf(a);
  double m = 0.5 * (a + b);
  return d / 6.0 * (normal_pdf(a) + 4.0 * normal_pdf(m) + normal_pdf(b));
}

// A_{gamma1}(x) = (Phi(gamma1) - Phi(x)) / x.
double step_from_gamma1(double gamma1, double x) {
  return cdf_gap(x, gamma1) / x;
}

// A_{gamma*}(x) = (Phi(x) - Phi((gamma*+x)/2)) / ((gamma*+x)/2).
double step_from_gamma_star(double gamma_star, double x) {
  double mid = 0.5 * (gamma_star + x);
  return cdf_gap(mid, x) / mid;
}

double pdf_over_x(double x) { return normal_pdf(x) / x; }

}  // namespace

DesignTarget::DesignTarget(double mu_target_, double lambda0_, double c_)
    : mu_target(mu_target_), lambda0(lambda0_), c(c_) {
  if (!std::isfinite(c) || !std::isfinite(mu_target)) {
    throw std::invalid_argument("DesignTarget: values must be finite");
  }
  if (!(lambda0 > 0.0 && lambda0 < 1.0) || lambda0 == 0.5) {
    throw std::invalid_argument(
        "DesignTarget: lambda0 must lie in (0, 1) away from 1/2");
  }
  double lo = std::min(c - lambda0, c - 0.5);
  double hi = std::max(c - lambda0, c - 0.5);
  if (!(mu_target > lo && mu_target < hi)) {
    throw std::invalid_argument(
        "DesignTarget: mu_target must lie strictly between c - lambda0 and "
        "c - 1/2");
  }
}

ASequenceDesign design_A_sequence(const DesignTarget& target) {
  // Reflect to the positive orientation (lambda0 > 1/2); the gamma recursion
  // is odd, so the A-sequence is unaffected and gammas flip sign on output.
  double sign = target.lambda0 > 0.5 ? 1.0 : -1.0;
  double g1 = sign * normal_quantile(target.lambda0);
  double gs = sign * normal_quantile(target.c - target.mu_target);

  double ratio_cap = std::sqrt(17.0 / 8.0);
  auto feasible = [&](double x) {
    return step_from_gamma1(g1, x) >
               std::sqrt(2.0) * step_from_gamma_star(gs, x) &&
           pdf_over_x(gs) / pdf_over_x(x) <= ratio_cap;
  };

  // Bisect the offset from gamma* downward until both sufficient conditions
  // hold, then take 10% more margin.
  double offset = 0.5 * (g1 - gs);
  while (!feasible(gs + offset)) {
    offset *= 0.5;
    if (offset < kGamma2Width) {
      throw std::runtime_error(
          "design_A_sequence: no feasible gamma2 above width 1e-14");
    }
  }
  offset *= 0.9;
  double g2 = gs + offset;

  ASequenceDesign out;
  out.gamma_star = sign * gs;
  out.gamma2 = sign * g2;
  out.c_lo = 4.0 * pdf_over_x(g2) * (g2 - gs);
  out.c_hi = 4.0 * pdf_over_x(gs) * (g2 - gs);
  out.gamma2_margin =
      step_from_gamma1(g1, g2) - std::sqrt(2.0) * step_from_gamma_star(gs, g2);
  out.ratio = out.c_hi / out.c_lo;

  out.gamma.push_back(sign * g1);
  out.gamma.push_back(sign * g2);
  out.A.push_back(step_from_gamma1(g1, g2));
  // Track the offset from gamma* directly: halving it is exact, whereas
  // subtracting the near-equal gammas would wipe out the tail gaps.
  double eps = g2 - gs;
  std::size_t t = 3;
  for (;; ++t) {
    eps *= 0.5;
    double next = gs + eps;
    double A;
    if (eps >= 1e-3) {
      A = (normal_cdf(gs + 2.0 * eps) - normal_cdf(next)) / next;
    } else {
      A = eps / 6.0 *
          (normal_pdf(next) + 4.0 * normal_pdf(gs + 1.5 * eps) +
           normal_pdf(gs + 2.0 * eps)) /
          next;
    }
    if (A < kTruncateA) break;
    out.gamma.push_back(sign * next);
    out.A.push_back(A);
  }
  out.truncation = t;
  // A_s <= c_hi 2^{-s}, so the omitted tail sums below c_hi 2^{1-t}.
  out.tail_bound = out.c_hi * std::pow(2.0, 1.0 - static_cast<double>(t));
  return out;
}

NoiseRealization realize_noise_process(const std::vector<double>& A) {
  if (A.empty()) {
    throw std::invalid_argument("realize_noise_process: empty A sequence");
  }
  std::vector<double> sq(A.size());
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (!(A[k] > 0.0) || !std::isfinite(A[k])) {
      throw std::invalid_argument(
          "realize_noise_process: A entries must be positive and finite");
    }
    sq[k] = A[k] * A[k];
  }

  std::size_t n = sq.size();
  auto at = [&](std::size_t k) { return k < n ? sq[k] : 0.0; };

  // eta_1^2 = sup over odd t of L_t, with
  //   L_{2m+1} = sum_{j<m} (A_{2j+2}^2 - A_{2j+3}^2) + A_{2m+2}^2 / 2.
  // For A_t -> 0 this equals the alternating series sum; for a constant tail
  // it gives the fixed point A^2 / 2.
  double eta1 = 0.0;
  double pairsum = 0.0;
  for (std::size_t m = 0;; ++m) {
    double lead = at(2 * m);
    eta1 = std::max(eta1, pairsum + 0.5 * lead);
    if (2 * m >= n) break;
    pairsum += lead - at(2 * m + 1);
  }

  // Slack against the full nested-interval sandwich L_t <= eta1^2 <= U_t.
  // Only pairs fully inside the supplied sequence constrain eta1: beyond it
  // the tail is unknown (a designed sequence truncates near zero, a constant
  // test input continues at its level), so no zero-tail bound is applied.
  double slack = std::numeric_limits<double>::infinity();
  pairsum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double lead = sq[2 * m];
    double nxt = sq[2 * m + 1];
    slack = std::min(slack, eta1 - (pairsum + 0.5 * lead));
    slack = std::min(slack, (pairsum + lead - 0.5 * nxt) - eta1);
    pairsum += lead - nxt;
  }
  if (slack < -kSlackTol) {
    throw std::runtime_error(
        "realize_noise_process: nested-interval constraints violated");
  }

  NoiseRealization out;
  out.eta1_sq = eta1;
  out.min_slack = slack;
  out.eta2.reserve(n + 1);
  out.eta2.push_back(eta1);
  double prev = eta1;
  for (std::size_t k = 0; k < n; ++k) {
    double next = sq[k] - prev;
    if (next < -kSlackTol || next - prev > kSlackTol) {
      throw std::runtime_error(
          "realize_noise_process: constraint violated at t = " +
          std::to_string(k + 2));
    }
    next = std::clamp(next, std::numeric_limits<double>::min(), prev);
    out.eta2.push_back(next);
    prev = next;
  }

  out.sigma2.reserve(n + 1);
  out.sigma2.push_back(eta1);
  for (std::size_t k = 1; k <= n; ++k) {
    double inv = 1.0 / out.eta2[k] - 1.0 / out.eta2[k - 1];
    if (inv < 0.0 && inv >= -kSigmaClip) inv = 0.0;  // rounding-level decrease
    out.sigma2.push_back(inv > 0.0 ? 1.0 / inv
                                   : std::numeric_limits<double>::infinity());
  }
  return out;
}

DesignResult design_process(const DesignTarget& target, std::size_t verify_T) {
  if (verify_T == 0) {
    throw std::invalid_argument("design_process: verify_T must be positive");
  }
  ASequenceDesign seq = design_A_sequence(target);
  NoiseRealization noise = realize_noise_process(seq.A);

  ExplicitVariances spec;
  spec.sigma2 = noise.sigma2;
  spec.sigma2.resize(std::max(verify_T, spec.sigma2.size()),
                     std::numeric_limits<double>::infinity());
  GameConfig config(target.c, target.lambda0);
  PosteriorSchedule schedule = materialize(spec, verify_T);
  ThresholdPath path = threshold_path(config, schedule, verify_T);

  DesignResult out;
  out.gamma_star = seq.gamma_star;
  out.gamma2 = seq.gamma2;
  out.gamma = std::move(seq.gamma);
  out.A = std::move(seq.A);
  out.truncation = seq.truncation;
  out.eta1_sq = noise.eta1_sq;
  out.eta2 = std::move(noise.eta2);
  out.sigma2 = std::move(noise.sigma2);
  out.achieved_mu_inf = path.mu_star.back();
  out.diagnostics.gamma2_margin = seq.gamma2_margin;
  out.diagnostics.ratio = seq.ratio;
  out.diagnostics.sandwich_min_slack = noise.min_slack;
  out.diagnostics.c_lo = seq.c_lo;
  out.diagnostics.c_hi = seq.c_hi;
  out.diagnostics.eta1_lower_bound =
      (seq.c_lo * seq.c_lo - 0.25 * seq.c_hi * seq.c_hi) / 15.0;
  out.diagnostics.tail_bound = seq.tail_bound;

  if (std::abs(out.achieved_mu_inf - target.mu_target) > 1e-3) {
    throw std::runtime_error(
        "design_process: forward verification missed the target");
  }
  return out;
}

}  // namespace icg
