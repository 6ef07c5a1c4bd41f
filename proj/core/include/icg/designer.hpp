#pragma once

#include <cstddef>
#include <vector>

#include "icg/kernel.hpp"

namespace icg {

// A limit belief threshold strictly between c - lambda0 (initial-play
// dominance) and c - 1/2 (risk dominance). Both boundaries are excluded.
struct DesignTarget {
  double mu_target;
  double lambda0;
  double c;

  DesignTarget(double mu_target_, double lambda0_, double c_);
};

struct DesignDiagnostics {
  double gamma2_margin;      // A2 - sqrt(2) * A_{gamma*}(gamma2), > 0
  double ratio;              // (phi(g*)/g*) / (phi(g2)/g2), <= sqrt(17/8)
  double sandwich_min_slack; // min over t of slack in L_t <= eta1^2 <= U_t
  double eta1_lower_bound;   // (c_lo^2 - c_hi^2 / 4) / 15
  double c_lo;               // lower sandwich constant on A_t * 2^t
  double c_hi;               // upper sandwich constant on A_t * 2^t
  double tail_bound;         // bound on sum of A_t^2 beyond truncation
};

struct DesignResult {
  double gamma_star;
  double gamma2;
  std::vector<double> gamma;   // designed gamma path (t = 1 onward)
  std::vector<double> A;       // step scales, A[k] is A_{k+2}
  std::size_t truncation;      // first omitted period index
  double eta1_sq;
  std::vector<double> eta2;    // realized posterior variances
  std::vector<double> sigma2;  // realized signal variances
  double achieved_mu_inf;
  DesignDiagnostics diagnostics;
};

// Proof-of-concept inverse: picks gamma2 in (gamma*, gamma1) satisfying both
// sufficiency conditions, then halves gamma toward gamma* to generate a
// geometrically decaying A-sequence. Works in the lambda0 > 1/2 orientation;
// callers with lambda0 < 1/2 are reflected internally.
struct ASequenceDesign {
  double gamma_star;
  double gamma2;
  std::vector<double> gamma;
  std::vector<double> A;
  std::size_t truncation;
  double c_lo;
  double c_hi;
  double gamma2_margin;
  double ratio;
  double tail_bound;
};

ASequenceDesign design_A_sequence(const DesignTarget& target);

struct NoiseRealization {
  double eta1_sq;
  std::vector<double> eta2;
  std::vector<double> sigma2;
  double min_slack;
};

// Recovers posterior variances from A_t^2 = eta_t^2 + eta_{t-1}^2 via the
// nested-interval choice of eta_1^2. A[k] is A_{k+2}; requires the
// squared-difference convexity A_{t+1}^2 - A_{t+2}^2 <= A_t^2 - A_{t+1}^2.
NoiseRealization realize_noise_process(const std::vector<double>& A);

// Full pipeline: design, realize, then verify by forward simulation over
// verify_T periods. Throws if the achieved threshold misses the target by
// more than 1e-3.
DesignResult design_process(const DesignTarget& target, std::size_t verify_T);

}  // namespace icg
