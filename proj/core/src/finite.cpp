#include "icg/finite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "icg/normal.hpp"

namespace icg {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t rep, std::uint64_t agent,
                      std::uint64_t period) {
  std::uint64_t h = mix64(seed + mix64(rep + mix64(agent + mix64(period))));
  // (0, 1) strictly: offset by half an ulp of the 53-bit grid.
  double u = (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
  return normal_quantile(u);
}

FiniteSimResult simulate_finite(const GameConfig& config,
                                const LearningSpec& spec,
                                const FiniteSimConfig& fsc) {
  if (fsc.N < 1 || fsc.T < 1 || fsc.replications < 1) {
    throw std::invalid_argument("simulate_finite: counts must be positive");
  }
  PosteriorSchedule schedule = materialize(spec, fsc.T);
  ThresholdPath path = threshold_path(config, schedule, fsc.T);

  FiniteSimResult result;
  result.N = fsc.N;
  PlayPath ref = aggregate_play(fsc.theta, path, schedule);
  result.lambda_ref = std::move(ref.lambda);
  result.lambda_N.resize(fsc.replications);
  result.sup_error.resize(fsc.replications);

  auto run_rep = [&](std::size_t rep) {
    std::vector<double> sum_wx(fsc.N, 0.0);
    std::vector<double>& lam = result.lambda_N[rep];
    lam.resize(fsc.T);
    double sup = 0.0;
    for (std::size_t t = 1; t <= fsc.T; ++t) {
      double s2 = schedule.sigma2(t);
      bool informative = std::isfinite(s2);
      double w = informative ? 1.0 / s2 : 0.0;
      double sd = informative ? std::sqrt(s2) : 0.0;
      double prec = schedule.precision(t);
      double cutoff = path.mu_star[t - 1];
      std::size_t risky = 0;
      for (std::size_t i = 0; i < fsc.N; ++i) {
        if (informative) {
          double x = fsc.theta + sd * counter_normal(fsc.seed, rep, i, t);
          sum_wx[i] += w * x;
        }
        risky += (sum_wx[i] / prec >= cutoff) ? 1 : 0;
      }
      lam[t - 1] = static_cast<double>(risky) / static_cast<double>(fsc.N);
      sup = std::max(sup, std::abs(lam[t - 1] - result.lambda_ref[t - 1]));
    }
    result.sup_error[rep] = sup;
  };

  std::size_t workers = std::max<std::size_t>(1, fsc.threads);
  workers = std::min(workers, fsc.replications);
  if (workers == 1) {
    for (std::size_t rep = 0; rep < fsc.replications; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t rep = w; rep < fsc.replications; rep += workers) {
          run_rep(rep);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

std::vector<ConcentrationRow> concentration_report(
    const std::vector<FiniteSimResult>& results) {
  if (results.size() < 2) {
    throw std::length_error("concentration_report: need at least two N values");
  }
  std::vector<ConcentrationRow> table;
  table.reserve(results.size());
  for (const auto& r : results) {
    if (r.sup_error.empty()) {
      throw std::invalid_argument("concentration_report: empty result entry");
    }
    std::vector<double> errs = r.sup_error;
    std::sort(errs.begin(), errs.end());
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    std::size_t idx =
        (errs.size() * 95 + 99) / 100;  // ceil(0.95 n), 1-based rank
    ConcentrationRow row;
    row.N = r.N;
    row.mean_sup_error = mean;
    row.p95_sup_error = errs[std::min(idx, errs.size()) - 1];
    table.push_back(row);
  }
  return table;
}

}  // namespace icg
