#include "relichoice/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "format_util.hpp"
#include "numeric.hpp"

namespace relichoice::montecarlo {

using model::ExprKind;
using model::SystemExpr;
using model::SystemSpec;

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kBlockTrials = 8192;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Counter-based stream: the state is a hash of (seed, trial), the sequence a
/// splitmix64 walk from it. Identical on every platform and thread layout.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : state_(mix64(mix64(trial * kGolden + seed) ^ kGolden)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

 private:
  std::uint64_t state_;
};

double sample_expr(const SystemExpr& e, const SystemSpec& spec, TrialRng& rng) {
  switch (e.kind) {
    case ExprKind::leaf: {
      const auto& cp = spec.components.at(e.component);
      return cp.t0 + -std::log(rng.next_unit()) / cp.lambda;
    }
    case ExprKind::series: {
      double first_failure = std::numeric_limits<double>::infinity();
      for (const auto& c : e.children) {
        first_failure = std::min(first_failure, sample_expr(c, spec, rng));
      }
      return first_failure;
    }
    case ExprKind::prob_choice: {
      const double u = rng.next_unit();
      double cum = 0.0;
      std::size_t pick = e.children.size() - 1;
      for (std::size_t k = 0; k < e.weights.size(); ++k) {
        cum += e.weights[k];
        if (u <= cum) {
          pick = k;
          break;
        }
      }
      return sample_expr(e.children[pick], spec, rng);
    }
    case ExprKind::uniform_choice: {
      const double u = rng.next_unit();
      const auto n = e.children.size();
      const auto pick = std::min(
          n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
      return sample_expr(e.children[pick], spec, rng);
    }
  }
  throw DomainError("malformed expression: unknown node kind");
}

struct BlockSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t hits = 0;
};

/// Runs every trial through `accumulate` in fixed per-block order and reduces
/// the blocks in index order, so the result is independent of thread count.
template <class PerTrial>
std::vector<BlockSums> run_blocks(const SystemSpec& spec,
                                  const SimulationConfig& cfg,
                                  PerTrial&& per_trial) {
  if (cfg.trials < 1) throw DomainError("trials must be >= 1");
  const std::uint64_t blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<BlockSums> sums(blocks);

  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(cfg.trials, begin + kBlockTrials);
    BlockSums s;
    for (std::uint64_t i = begin; i < end; ++i) {
      TrialRng rng(cfg.seed, i);
      per_trial(sample_expr(spec.root, spec, rng), s);
    }
    sums[b] = s;
  };

  unsigned lanes = 1;
  if (cfg.parallel_ok) {
    lanes = cfg.lanes > 0 ? static_cast<unsigned>(cfg.lanes)
                          : std::max(1u, std::thread::hardware_concurrency());
  }
  lanes = std::min<unsigned>(lanes, static_cast<unsigned>(blocks));

  if (lanes <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    return sums;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(lanes);
  for (unsigned w = 0; w < lanes; ++w) {
    workers.emplace_back([&] {
      for (std::uint64_t b = next.fetch_add(1); b < blocks;
           b = next.fetch_add(1)) {
        run_block(b);
      }
    });
  }
  for (auto& t : workers) t.join();
  return sums;
}

}  // namespace

double sample_failure_time(const SystemSpec& spec, std::uint64_t trial_index,
                           const SimulationConfig& cfg) {
  TrialRng rng(cfg.seed, trial_index);
  return sample_expr(spec.root, spec, rng);
}

SimulationEstimate estimate_survival(const SystemSpec& spec, double t,
                                     const SimulationConfig& cfg) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("time " + detail::human(t) + " must be finite and >= 0");
  }
  const auto sums = run_blocks(spec, cfg, [&](double lifetime, BlockSums& s) {
    if (lifetime > t) ++s.hits;
  });
  std::uint64_t hits = 0;
  for (const auto& s : sums) hits += s.hits;
  const double n = static_cast<double>(cfg.trials);
  const double p = static_cast<double>(hits) / n;
  SimulationEstimate est;
  est.value = p;
  est.std_error = std::sqrt(p * (1.0 - p) / n);
  est.trials = cfg.trials;
  est.seed = cfg.seed;
  return est;
}

SimulationEstimate estimate_mttf(const SystemSpec& spec,
                                 const SimulationConfig& cfg) {
  const auto sums = run_blocks(spec, cfg, [&](double lifetime, BlockSums& s) {
    s.sum += lifetime;
    s.sum_sq += lifetime * lifetime;
  });
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : sums) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double n = static_cast<double>(cfg.trials);
  const double mean = sum / n;
  SimulationEstimate est;
  est.value = mean;
  est.trials = cfg.trials;
  est.seed = cfg.seed;
  if (cfg.trials > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

namespace {

std::string pad(std::string s, std::size_t width) {
  s.append(2, ' ');
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

double quantile_time(const SystemSpec& spec, double q) {
  const double horizon = analysis::integration_horizon(spec);
  if (analysis::survival(spec, horizon) >= q) return horizon;
  return numeric::bisect_last_true(
      [&](double t) { return analysis::survival(spec, t) >= q; }, 0.0, horizon,
      1e-9);
}

}  // namespace

CompareReport compare(const SystemSpec& spec, analysis::Mode mode,
                      const SimulationConfig& cfg, double tolerance_sigmas) {
  if (!(tolerance_sigmas > 0.0)) {
    throw DomainError("tolerance must be > 0 sigmas");
  }
  CompareReport report;

  double max_t0 = 0.0;
  for (const auto& [id, cp] : spec.components) max_t0 = std::max(max_t0, cp.t0);

  for (double q : {0.9, 0.75, 0.5, 0.25, 0.1}) {
    const double t = quantile_time(spec, q);
    CompareRow row;
    row.quantity = "survival(t=" + detail::human(t) + ")";
    row.analytic = analysis::survival(spec, t);
    row.estimate = estimate_survival(spec, t, cfg);
    report.rows.push_back(std::move(row));
  }
  {
    analysis::AnalyzeOptions opts;
    opts.mode = mode;
    const auto analyzed = analysis::analyze(spec, opts);
    CompareRow row;
    row.quantity = "mttf";
    row.analytic = analyzed.mttf;
    row.estimate = estimate_mttf(spec, cfg);
    row.divergence = analyzed.mode == analysis::Mode::paper && max_t0 > 0.0;
    report.rows.push_back(std::move(row));
  }

  report.pass = true;
  for (auto& row : report.rows) {
    const double diff = std::fabs(row.analytic - row.estimate.value);
    row.sigma_distance =
        row.estimate.std_error > 0.0
            ? diff / row.estimate.std_error
            : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (!row.divergence && row.sigma_distance > tolerance_sigmas) {
      report.pass = false;
    }
  }

  std::string& out = report.text;
  out += "mode=" + std::string(analysis::to_string(mode)) +
         " trials=" + std::to_string(cfg.trials) +
         " seed=" + std::to_string(cfg.seed) +
         " tolerance=" + detail::human(tolerance_sigmas) + " sigma\n";
  out += pad("quantity", 26) + pad("analytic", 24) + pad("estimate", 24) +
         pad("std_error", 24) + pad("|diff|/se", 12) + "verdict\n";
  for (const auto& row : report.rows) {
    std::string verdict = "ok";
    if (row.divergence) {
      verdict = "documented-divergence";
    } else if (row.sigma_distance > tolerance_sigmas) {
      verdict = "FAIL";
    }
    out += pad(row.quantity, 26) + pad(detail::shortest(row.analytic), 24) +
           pad(detail::shortest(row.estimate.value), 24) +
           pad(detail::shortest(row.estimate.std_error), 24) +
           pad(detail::human(row.sigma_distance), 12) + verdict + "\n";
  }
  out += report.pass ? "overall: PASS\n" : "overall: FAIL\n";
  return report;
}

}  // namespace relichoice::montecarlo
